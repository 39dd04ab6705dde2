"""CHSH engine: exact correlators, classical bound, seeded Monte Carlo runs.

The quantity of interest is S = <A1B1> + <A1B0> + <A0B1> - <A0B0>. Joint
measurement of one Alice setting with one Bob setting uses products of the
lifted spectral projectors, which is legitimate because the two sides
commute; no sequential collapse is involved.

Sampling determinism: each setting pair (i, j) draws from its own generator
seeded by hashing (seed, i, j), so the four settings can be sampled in any
order, serially or in parallel, and reproduce identical reports bit for bit.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import expectation
from .observables import alice_observable, bob_observable, lift, lifted_spectrum
from .states import StateVector

SETTING_PAIRS = ((1, 1), (1, 0), (0, 1), (0, 0))
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)

_S_CONSISTENCY_TOL = 1e-12


def s_from_correlators(correlators: dict[tuple[int, int], float]) -> float:
    """S = <A1B1> + <A1B0> + <A0B1> - <A0B0>."""
    return (
        correlators[(1, 1)] + correlators[(1, 0)]
        + correlators[(0, 1)] - correlators[(0, 0)]
    )


@dataclass(frozen=True)
class JointOutcome:
    """One cell of the joint outcome table of a commuting setting pair."""

    a_value: float
    b_value: float
    joint_probability: float

    def to_dict(self) -> dict:
        return {
            "a_value": self.a_value,
            "b_value": self.b_value,
            "joint_probability": self.joint_probability,
        }


@dataclass(frozen=True)
class ChshReport:
    """Four correlators and the S value, exact or sampled.

    ``shots_per_setting``, ``standard_error`` and ``sigma_violation`` are
    None in exact mode. The stored ``s_value`` always recomputes from the
    correlators within 1e-12, and exact-mode correlators cannot exceed 1 in
    magnitude beyond rounding.
    """

    mode: str
    correlators: dict[tuple[int, int], float]
    s_value: float
    shots_per_setting: int | None = None
    standard_error: float | None = None
    sigma_violation: float | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown report mode {self.mode!r}")
        if set(self.correlators) != set(SETTING_PAIRS):
            raise ValueError("correlator map must cover all four setting pairs")
        if abs(s_from_correlators(self.correlators) - self.s_value) > _S_CONSISTENCY_TOL:
            raise ValueError("s_value does not recompute from the stored correlators")
        if self.mode == "exact":
            worst = max(abs(v) for v in self.correlators.values())
            if worst > 1.0 + 1e-12:
                raise ValueError(f"exact correlator magnitude {worst} exceeds 1")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "correlators": {
                "A1B1": self.correlators[(1, 1)],
                "A1B0": self.correlators[(1, 0)],
                "A0B1": self.correlators[(0, 1)],
                "A0B0": self.correlators[(0, 0)],
            },
            "s_value": self.s_value,
            "shots_per_setting": self.shots_per_setting,
            "standard_error": self.standard_error,
            "sigma_violation": self.sigma_violation,
        }


def _require_full_state(state: StateVector) -> np.ndarray:
    if state.dim != 16:
        raise ValueError(f"CHSH engine needs the 16-dim state, got dim {state.dim}")
    return state.amplitudes


@functools.cache
def _lifted_products() -> dict[tuple[int, int], np.ndarray]:
    return {
        (i, j): lift(alice_observable(i)) @ lift(bob_observable(j))
        for i, j in SETTING_PAIRS
    }


@functools.cache
def _outcome_cells(i: int, j: int) -> tuple[tuple[float, float, np.ndarray], ...]:
    """(a_value, b_value, Pa@Pb) for every outcome cell of setting (i, j)."""
    cells = []
    for a_value, pa in lifted_spectrum(alice_observable(i)):
        for b_value, pb in lifted_spectrum(bob_observable(j)):
            cells.append((a_value, b_value, pa @ pb))
    return tuple(cells)


def chsh_exact(state: StateVector) -> ChshReport:
    """Exact quantum correlators and S value of a 16-dim state."""
    psi = _require_full_state(state)
    products = _lifted_products()
    correlators = {pair: expectation(psi, products[pair]) for pair in SETTING_PAIRS}
    return ChshReport("exact", correlators, s_from_correlators(correlators))


def joint_distribution(state: StateVector, i: int, j: int) -> list[JointOutcome]:
    """Full joint outcome table for setting pair (i, j), zero cells included."""
    psi = _require_full_state(state)
    return [
        JointOutcome(a_value, b_value, expectation(psi, projector))
        for a_value, b_value, projector in _outcome_cells(i, j)
    ]


def sample_products(
    probabilities: np.ndarray,
    products: np.ndarray,
    shots: int,
    stream_key: tuple[int, ...],
) -> np.ndarray:
    """Inverse-CDF draw of `shots` outcome products from one setting's table.

    The generator is seeded from the full ``stream_key`` tuple, so every
    setting (and caller) owns an independent, reproducible stream.
    """
    probs = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    cdf = np.cumsum(probs)
    if cdf[-1] <= 0.0:
        raise ValueError("outcome probabilities sum to zero")
    cdf /= cdf[-1]
    rng = np.random.default_rng(stream_key)
    draws = rng.random(shots)
    return np.asarray(products, dtype=float)[np.searchsorted(cdf, draws, side="right")]


def sample_setting_products(
    state: StateVector, i: int, j: int, shots: int, seed: int
) -> np.ndarray:
    """Products a*b of `shots` joint outcomes of setting (i, j)."""
    table = joint_distribution(state, i, j)
    probabilities = np.array([cell.joint_probability for cell in table])
    products = np.array([cell.a_value * cell.b_value for cell in table])
    return sample_products(probabilities, products, shots, (seed, i, j))


def report_from_setting_products(
    setting_products: dict[tuple[int, int], np.ndarray], shots: int
) -> ChshReport:
    """Assemble a sampled report from per-setting outcome-product arrays.

    The standard error combines per-setting sample variances in quadrature:
    SE = sqrt(sum_ij var_ij / shots); sigma_violation = (S - 2) / SE.
    """
    correlators = {}
    variance_sum = 0.0
    for pair in SETTING_PAIRS:
        products = setting_products[pair]
        correlators[pair] = float(np.mean(products))
        variance_sum += float(np.var(products, ddof=1))
    s_value = s_from_correlators(correlators)
    standard_error = math.sqrt(variance_sum / shots)
    if standard_error > 0.0:
        sigma = (s_value - 2.0) / standard_error
    else:
        sigma = math.copysign(math.inf, s_value - 2.0)
    return ChshReport(
        "sampled", correlators, s_value,
        shots_per_setting=shots, standard_error=standard_error, sigma_violation=sigma,
    )


def chsh_sampled(state: StateVector, shots_per_setting: int, seed: int) -> ChshReport:
    """Monte Carlo CHSH run: seeded, reproducible bit for bit."""
    if shots_per_setting < 2:
        raise ValueError("shots_per_setting must be at least 2 (sample variance)")
    setting_products = {
        (i, j): sample_setting_products(state, i, j, shots_per_setting, seed)
        for i, j in SETTING_PAIRS
    }
    return report_from_setting_products(setting_products, shots_per_setting)


def classical_assignments(
    a0_values=(-1, 1),
    a1_values=(-1, 0, 1),
    b0_values=(-1, 1),
    b1_values=(-1, 0, 1),
) -> list[tuple[int, int, int, int, int]]:
    """All simultaneous value assignments (a0, a1, b0, b1) and their CHSH value.

    The defaults are the allowed simultaneous outcomes: +-1 for the friend
    readouts, and +-1 or 0 for the coherence probes.
    """
    return [
        (a0, a1, b0, b1, a1 * b1 + a1 * b0 + a0 * b1 - a0 * b0)
        for a0, a1, b0, b1 in itertools.product(a0_values, a1_values, b0_values, b1_values)
    ]


def classical_max() -> int:
    """Exhaustive maximum of the CHSH combination over all 36 assignments."""
    return max(value for *_, value in classical_assignments())
