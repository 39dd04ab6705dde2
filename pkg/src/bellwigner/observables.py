"""The four CHSH observables with analytic spectral decompositions.

Each side (Alice, Bob) measures on its own photon-friend pair. Setting 0
reads out the friend's record (friend basis, outcomes +-1); setting 1 probes
the coherence between the two correlated photon-friend kets (outcomes +1,
-1 and 0, the 0 eigenspace being the rank-2 complement). Spectra are written
down in closed form, so no eigensolver is involved anywhere.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import commutator_norm, frobenius_norm, kron
from .states import basis_index

ALICE = "alice"
BOB = "bob"
OBSERVABLE_LABELS = ("A0", "A1", "B0", "B1")

_SIDE_SUBSYSTEMS = ("photon", "friend")
_I2 = np.eye(2, dtype=complex)
_I4 = np.eye(4, dtype=complex)


@dataclass(frozen=True, eq=False)
class Observable:
    """A 4x4 Hermitian observable together with its outcome spectrum.

    ``spectrum`` is a tuple of (outcome value, projector) pairs; the matrix
    must equal the value-weighted projector sum. Construction only checks
    shapes: algebraic properties are the business of :func:`verify_algebra`,
    which has to be able to inspect deliberately broken instances.
    """

    label: str
    side: str
    matrix: np.ndarray
    spectrum: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        if self.side not in (ALICE, BOB):
            raise ValueError(f"unknown side {self.side!r}")
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValueError(f"observable matrix must be 4x4, got {matrix.shape}")
        matrix.setflags(write=False)
        spectrum = []
        for value, projector in self.spectrum:
            p = np.array(projector, dtype=complex)
            if p.shape != (4, 4):
                raise ValueError(f"spectral projector must be 4x4, got {p.shape}")
            p.setflags(write=False)
            spectrum.append((float(value), p))
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "spectrum", tuple(spectrum))

    def to_dict(self) -> dict:
        def entries(m):
            return [[[z.real, z.imag] for z in row] for row in m]

        return {
            "label": self.label,
            "side": self.side,
            "matrix": entries(self.matrix),
            "spectrum": [
                {"value": value, "projector": entries(projector)}
                for value, projector in self.spectrum
            ],
        }


def _side_ket(photon: str, friend: str) -> np.ndarray:
    ket = np.zeros(4, dtype=complex)
    ket[basis_index(_SIDE_SUBSYSTEMS, (photon, friend))] = 1.0
    return ket


def _friend_readout(side: str, label: str) -> Observable:
    """Setting-0 observable: friend record F_v counts +1, F_h counts -1."""
    p_fv = kron(_I2, np.diag([0.0, 1.0]).astype(complex))
    p_fh = kron(_I2, np.diag([1.0, 0.0]).astype(complex))
    return Observable(label, side, p_fv - p_fh, ((+1.0, p_fv), (-1.0, p_fh)))


def _coherence_probe(side: str, label: str) -> Observable:
    """Setting-1 observable built from (|h,F_v> +- |v,F_h>)/sqrt(2)."""
    r = 1.0 / math.sqrt(2.0)
    phi_plus = r * (_side_ket("h", "F_v") + _side_ket("v", "F_h"))
    phi_minus = r * (_side_ket("h", "F_v") - _side_ket("v", "F_h"))
    p_plus = np.outer(phi_plus, phi_plus.conj())
    p_minus = np.outer(phi_minus, phi_minus.conj())
    p_zero = _I4 - p_plus - p_minus
    return Observable(
        label, side, p_plus - p_minus,
        ((+1.0, p_plus), (-1.0, p_minus), (0.0, p_zero)),
    )


@functools.cache
def make_a0() -> Observable:
    return _friend_readout(ALICE, "A0")


@functools.cache
def make_a1() -> Observable:
    return _coherence_probe(ALICE, "A1")


@functools.cache
def make_b0() -> Observable:
    return _friend_readout(BOB, "B0")


@functools.cache
def make_b1() -> Observable:
    return _coherence_probe(BOB, "B1")


def make_observable(label: str) -> Observable:
    builders = {"A0": make_a0, "A1": make_a1, "B0": make_b0, "B1": make_b1}
    if label not in builders:
        raise ValueError(f"unknown observable label {label!r}")
    return builders[label]()


def alice_observable(setting: int) -> Observable:
    return make_observable(f"A{_check_setting(setting)}")


def bob_observable(setting: int) -> Observable:
    return make_observable(f"B{_check_setting(setting)}")


def _check_setting(setting: int) -> int:
    if setting not in (0, 1):
        raise ValueError(f"setting must be 0 or 1, got {setting!r}")
    return setting


def lift(obs: Observable) -> np.ndarray:
    """Embed a side observable in the full 16-dim space.

    Alice acts on the leading (photon_a, friend_a) factors, Bob on the
    trailing ones, matching the big-endian layout of :mod:`.states`.
    """
    if obs.side == ALICE:
        return kron(obs.matrix, _I4)
    return kron(_I4, obs.matrix)


def lifted_spectrum(obs: Observable) -> tuple[tuple[float, np.ndarray], ...]:
    """The spectrum of :func:`lift`: projectors embed the same way."""
    if obs.side == ALICE:
        return tuple((value, kron(p, _I4)) for value, p in obs.spectrum)
    return tuple((value, kron(_I4, p)) for value, p in obs.spectrum)


@dataclass(frozen=True)
class AlgebraCheck:
    name: str
    passed: bool
    residual: float


@dataclass(frozen=True)
class AlgebraReport:
    checks: tuple[AlgebraCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def __getitem__(self, name: str) -> AlgebraCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "residual": c.residual}
                for c in self.checks
            ],
        }


_EXPECTED_SPECTRA = {
    "0": ((+1.0, 2), (-1.0, 2)),
    "1": ((+1.0, 1), (-1.0, 1), (0.0, 2)),
}


def _correlated_support() -> np.ndarray:
    """|h,F_v><h,F_v| + |v,F_h><v,F_h|, the square of a setting-1 observable."""
    k1 = _side_ket("h", "F_v")
    k2 = _side_ket("v", "F_h")
    return np.outer(k1, k1.conj()) + np.outer(k2, k2.conj())


def verify_algebra(
    a0: Observable | None = None,
    a1: Observable | None = None,
    b0: Observable | None = None,
    b1: Observable | None = None,
    tol: float = 1e-12,
) -> AlgebraReport:
    """Run every algebraic identity the observables must satisfy.

    Failures are report entries, never exceptions, so corrupted observables
    can be fed in as negative controls. Checks: squares of the setting-0
    observables are the identity; squares of the setting-1 observables equal
    the correlated-support projector; all four inter-side commutators vanish
    exactly; both intra-side commutator norms exceed 0.5; each spectrum
    reconstructs its matrix, has the expected outcome values and projector
    ranks, and consists of orthogonal projectors summing to the identity.
    """
    a0 = a0 or make_a0()
    a1 = a1 or make_a1()
    b0 = b0 or make_b0()
    b1 = b1 or make_b1()
    support = _correlated_support()
    checks: list[AlgebraCheck] = []

    def add(name: str, passed: bool, residual: float):
        checks.append(AlgebraCheck(name, bool(passed), float(residual)))

    for obs, target, name in (
        (a0, _I4, "A0_squared_identity"),
        (b0, _I4, "B0_squared_identity"),
        (a1, support, "A1_squared_support"),
        (b1, support, "B1_squared_support"),
    ):
        residual = frobenius_norm(obs.matrix @ obs.matrix - target)
        add(name, residual <= tol, residual)

    for alice_obs in (a0, a1):
        for bob_obs in (b0, b1):
            residual = commutator_norm(lift(alice_obs), lift(bob_obs))
            add(f"commute_{alice_obs.label}_{bob_obs.label}", residual == 0.0, residual)

    for first, second in ((a0, a1), (b0, b1)):
        residual = commutator_norm(lift(first), lift(second))
        add(f"noncommute_{first.label}_{second.label}", residual > 0.5, residual)

    for obs in (a0, a1, b0, b1):
        recon = sum(value * p for value, p in obs.spectrum)
        residual = frobenius_norm(recon - obs.matrix)
        add(f"spectrum_reconstruction_{obs.label}", residual <= tol, residual)

        expected = _EXPECTED_SPECTRA[obs.label[1]]
        values = tuple(value for value, _ in obs.spectrum)
        if values != tuple(v for v, _ in expected):
            add(f"spectrum_values_{obs.label}", False, 1.0)
        else:
            rank_dev = max(
                abs(np.trace(p).real - rank)
                for (_, p), (_, rank) in zip(obs.spectrum, expected)
            )
            add(f"spectrum_values_{obs.label}", rank_dev <= 1e-9, rank_dev)

        worst = 0.0
        projectors = [p for _, p in obs.spectrum]
        for i, p in enumerate(projectors):
            worst = max(worst, frobenius_norm(p @ p - p))
            worst = max(worst, frobenius_norm(p - p.conj().T))
            for q in projectors[i + 1:]:
                worst = max(worst, frobenius_norm(p @ q))
        worst = max(worst, frobenius_norm(sum(projectors) - _I4))
        add(f"spectrum_projectors_{obs.label}", worst <= tol, worst)

    return AlgebraReport(tuple(checks))
