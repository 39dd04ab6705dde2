"""State constructors over the package's fixed basis layout.

Basis convention (authoritative for the whole package, used by every module):

* subsystem order of the full space: ``photon_a, friend_a, photon_b, friend_b``;
* per-subsystem encoding: photon ``h -> 0``, ``v -> 1``; friend ``F_h -> 0``,
  ``F_v -> 1``;
* index rule: big-endian, i.e. ``photon_a`` is the most significant bit of the
  16-dimensional basis index::

      index = 8*photon_a + 4*friend_a + 2*photon_b + friend_b

Smaller spaces apply the same rule to their own subsystem tuple, e.g. a
``(photon, friend)`` side indexes as ``2*photon + friend``. Keeping this in
one place is what protects the lifted 16x16 operators from the classic
tensor-factor transposition bug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

NORM_TOL = 1e-12

PHOTON_LABELS = ("h", "v")
FRIEND_LABELS = ("F_h", "F_v")
FULL_LAYOUT = ("photon_a", "friend_a", "photon_b", "friend_b")

FriendMapping = Literal["aligned", "anti_aligned"]


def labels_for(subsystem: str) -> tuple[str, str]:
    """Basis labels of one subsystem, resolved from its name prefix."""
    if subsystem.startswith("photon"):
        return PHOTON_LABELS
    if subsystem.startswith("friend"):
        return FRIEND_LABELS
    raise ValueError(f"unknown subsystem {subsystem!r}")


def basis_index(subsystems: tuple[str, ...], labels: tuple[str, ...]) -> int:
    """Big-endian basis index of a product label tuple."""
    if len(labels) != len(subsystems):
        raise ValueError(f"expected {len(subsystems)} labels, got {len(labels)}")
    index = 0
    for subsystem, label in zip(subsystems, labels):
        choices = labels_for(subsystem)
        if label not in choices:
            raise ValueError(f"label {label!r} is not valid for {subsystem}")
        index = 2 * index + choices.index(label)
    return index


def basis_labels(subsystems: tuple[str, ...], index: int) -> tuple[str, ...]:
    """Inverse of :func:`basis_index`."""
    dim = 2 ** len(subsystems)
    if not 0 <= index < dim:
        raise ValueError(f"index {index} out of range for dim {dim}")
    out = []
    for position, subsystem in enumerate(subsystems):
        bit = (index >> (len(subsystems) - 1 - position)) & 1
        out.append(labels_for(subsystem)[bit])
    return tuple(out)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitude vector over a labeled tensor-product basis."""

    subsystems: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        subsystems = tuple(self.subsystems)
        for name in subsystems:
            labels_for(name)  # raises on unknown subsystem
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != 2 ** len(subsystems):
            raise ValueError(
                f"amplitude count {amps.shape} does not match subsystems {subsystems}"
            )
        if amps.shape[0] not in (2, 4, 16):
            raise ValueError(f"unsupported dimension {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {np.linalg.norm(amps)!r} is not 1 within {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "subsystems", subsystems)
        object.__setattr__(self, "amplitudes", amps)

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.subsystems == other.subsystems and np.array_equal(
            self.amplitudes, other.amplitudes
        )

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, *labels: str) -> complex:
        """Amplitude on the product basis ket with the given labels."""
        return complex(self.amplitudes[basis_index(self.subsystems, labels)])

    def inner(self, other: "StateVector") -> complex:
        if self.subsystems != other.subsystems:
            raise ValueError("inner product needs states over the same subsystems")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_dict(self) -> dict:
        """JSON document: {"layout": [...], "amplitudes": [[re, im], ...]}."""
        return {
            "layout": list(self.subsystems),
            "amplitudes": [[z.real, z.imag] for z in self.amplitudes],
        }


def basis_state(subsystems: tuple[str, ...], labels: tuple[str, ...]) -> StateVector:
    """Product basis ket with the given per-subsystem labels."""
    amps = np.zeros(2 ** len(subsystems), dtype=complex)
    amps[basis_index(subsystems, labels)] = 1.0
    return StateVector(subsystems, amps)


def plus_photon() -> StateVector:
    """Equal superposition (|h> + |v>)/sqrt(2) of one photon."""
    r = 1.0 / math.sqrt(2.0)
    return StateVector(("photon",), np.array([r, r], dtype=complex))


def correlate_friend(photon: StateVector, mapping: FriendMapping = "aligned") -> StateVector:
    """Correlate a friend's memory with a photon's polarization.

    ``aligned`` maps a|h> + b|v> to a|h,F_h> + b|v,F_v>; ``anti_aligned``
    maps it to a|h,F_v> + b|v,F_h> (the convention of the four-photon
    experiment, where the friend records the opposite label). Both are
    isometries from the 2-dim photon space into the 4-dim pair space.
    """
    if photon.dim != 2 or not photon.subsystems[0].startswith("photon"):
        raise ValueError("correlate_friend expects a single-photon state")
    if mapping not in ("aligned", "anti_aligned"):
        raise ValueError(f"unknown mapping {mapping!r}")
    suffix = photon.subsystems[0][len("photon"):]
    subsystems = (photon.subsystems[0], "friend" + suffix)
    a, b = photon.amplitudes
    amps = np.zeros(4, dtype=complex)
    if mapping == "aligned":
        amps[basis_index(subsystems, ("h", "F_h"))] = a
        amps[basis_index(subsystems, ("v", "F_v"))] = b
    else:
        amps[basis_index(subsystems, ("h", "F_v"))] = a
        amps[basis_index(subsystems, ("v", "F_h"))] = b
    return StateVector(subsystems, amps)


def entangled_pair() -> StateVector:
    """Polarization singlet (|h>_a|v>_b - |v>_a|h>_b)/sqrt(2)."""
    subsystems = ("photon_a", "photon_b")
    r = 1.0 / math.sqrt(2.0)
    amps = np.zeros(4, dtype=complex)
    amps[basis_index(subsystems, ("h", "v"))] = r
    amps[basis_index(subsystems, ("v", "h"))] = -r
    return StateVector(subsystems, amps)


def bell_wigner_state() -> StateVector:
    """The four-photon state measured in the extended Wigner's-friend test.

    Four product kets carry all the weight: amplitude cos(pi/8)/sqrt(2) on
    |h,F_v>_a|v,F_h>_b and |v,F_h>_a|h,F_v>_b, amplitude sin(pi/8)/sqrt(2)
    on |h,F_v>_a|h,F_v>_b and -sin(pi/8)/sqrt(2) on |v,F_h>_a|v,F_h>_b.
    The remaining 12 amplitudes are exactly zero. The trig factors are
    computed at run time from pi, never hard-coded decimals.
    """
    c = math.cos(math.pi / 8.0) / math.sqrt(2.0)
    s = math.sin(math.pi / 8.0) / math.sqrt(2.0)
    amps = np.zeros(16, dtype=complex)
    amps[basis_index(FULL_LAYOUT, ("h", "F_v", "v", "F_h"))] = c
    amps[basis_index(FULL_LAYOUT, ("v", "F_h", "h", "F_v"))] = c
    amps[basis_index(FULL_LAYOUT, ("h", "F_v", "h", "F_v"))] = s
    amps[basis_index(FULL_LAYOUT, ("v", "F_h", "v", "F_h"))] = -s
    return StateVector(FULL_LAYOUT, amps)
