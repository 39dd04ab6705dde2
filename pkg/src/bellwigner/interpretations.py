"""Interpretation backends: spontaneous localization, pilot wave, many worlds.

All three treat a photon-scale friend as fully quantum (the correlated state
is kept intact) and a macroscopic instrument-scale friend as effectively
classical (one correlated term survives). The backends reach that verdict by
different routes:

* spontaneous localization: a Poisson collapse process at total rate
  n_particles * rate_per_particle decides whether localization happens
  within the measurement duration;
* pilot wave: the particle configuration of a macroscopic instrument
  concentrates in one support region, so the other term is dynamically
  irrelevant (effective, not fundamental, collapse);
* many worlds: splitting is tied to macroscopic systems; every branch is
  kept, each world governed by one term.

For CHSH statistics the macroscopic verdict is per-side dephasing in the
correlated basis, realized here as Born-weighted branch ensembles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import chsh as chsh_engine
from .chsh import SETTING_PAIRS, ChshReport, s_from_correlators
from .states import FRIEND_LABELS, StateVector, bell_wigner_state

MICROSCOPIC = "microscopic"
MACROSCOPIC = "macroscopic"
BACKENDS = ("pilot_wave", "grw", "many_worlds")

MICRO_MAX_PARTICLES = 1e6
MACRO_MIN_PARTICLES = 1e20
MIN_TOTAL_RATE = 1e-30
SUPPORT_LEAKAGE_TOL = 1e-9
BRANCH_WEIGHT_FLOOR = 1e-15
AGREEMENT_TOL = 1e-12


@dataclass(frozen=True)
class GrwParams:
    """Spontaneous-localization parameters: particle count, duration, rate.

    The default per-particle rate is the conventional 1e-16 per second.
    """

    n_particles: float
    duration_s: float
    rate_per_particle: float = 1e-16

    def __post_init__(self):
        for name in ("n_particles", "duration_s", "rate_per_particle"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and non-negative, got {value!r}")
        if self.n_particles < 1.0:
            raise ValueError("n_particles must be at least 1")

    @property
    def total_rate(self) -> float:
        return self.n_particles * self.rate_per_particle


# Worked parameter sets: an atom of ~100 particles observed for 1e3 s, and an
# instrument of ~1e25 particles resolved on nanosecond scale.
ATOM_PARAMS = GrwParams(n_particles=1e2, duration_s=1e3)
INSTRUMENT_PARAMS = GrwParams(n_particles=1e25, duration_s=1e3)


def grw_linear_probability(params: GrwParams) -> float:
    """First-order localization probability n*T*rate, clamped to 1."""
    return min(1.0, params.n_particles * params.duration_s * params.rate_per_particle)


def grw_exact_probability(params: GrwParams) -> float:
    """Poisson refinement 1 - exp(-n*rate*T) of the linear estimate."""
    return -math.expm1(-params.total_rate * params.duration_s)


@dataclass(frozen=True)
class GrwSimResult:
    collapsed_fraction: float
    mean_collapse_time_s: float | None

    def to_dict(self) -> dict:
        return {
            "collapsed_fraction": self.collapsed_fraction,
            "mean_collapse_time_s": self.mean_collapse_time_s,
        }


def grw_simulate(params: GrwParams, trials: int, seed: int) -> GrwSimResult:
    """Monte Carlo first-collapse times from a Poisson process at rate n*rate.

    Trial ``i`` consumes the i-th variate of the seeded stream, so block
    generation (e.g. with PCG64.advance) reproduces the serial run exactly.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rate = params.total_rate
    if rate < MIN_TOTAL_RATE:
        raise ValueError(f"total rate {rate!r} /s is below {MIN_TOTAL_RATE} (underflow risk)")
    rng = np.random.default_rng(seed)
    draws = rng.random(trials)
    times = -np.log1p(-draws) / rate
    # A continuous first-collapse time is strictly positive; the measure-zero
    # draw u == 0 maps to t == 0 and is excluded so duration 0 never collapses.
    collapsed = (times > 0.0) & (times <= params.duration_s)
    count = int(np.count_nonzero(collapsed))
    mean_time = float(times[collapsed].mean()) if count else None
    return GrwSimResult(count / trials, mean_time)


@dataclass(frozen=True)
class Branch:
    """One normalized component of a superposition with its Born weight."""

    weight: float
    state: StateVector
    label: str

    def to_dict(self) -> dict:
        return {"label": self.label, "weight": self.weight, "state": self.state.to_dict()}


def _require_pair_state(state: StateVector) -> StateVector:
    if state.dim != 4 or not (
        state.subsystems[0].startswith("photon") and state.subsystems[1].startswith("friend")
    ):
        raise ValueError("expected a 4-dim (photon, friend) state")
    return state


def _correlated_pair(state: StateVector) -> tuple[tuple[int, str], tuple[int, str]]:
    """The two correlated kets carrying the state's support.

    Accepts either correlation convention: support on {|h,F_h>, |v,F_v>} or
    on {|h,F_v>, |v,F_h>}, with at most 1e-9 of norm leaking outside the
    chosen pair.
    """
    amps = state.amplitudes
    pairs = (
        ((0, "h·F_h"), (3, "v·F_v")),
        ((1, "h·F_v"), (2, "v·F_h")),
    )
    for pair in pairs:
        inside = {index for index, _ in pair}
        leakage = math.sqrt(
            sum(abs(amps[k]) ** 2 for k in range(4) if k not in inside)
        )
        if leakage <= SUPPORT_LEAKAGE_TOL:
            return pair
    raise ValueError("state has non-negligible support outside a correlated ket pair")


def _born_select_term(state: StateVector, seed: int) -> Branch:
    """Pick one correlated term with its Born weight; keep the term's phase."""
    (i0, label0), (i1, label1) = _correlated_pair(state)
    amps = state.amplitudes
    w0 = abs(amps[i0]) ** 2
    w1 = abs(amps[i1]) ** 2
    total = w0 + w1
    w0, w1 = w0 / total, w1 / total
    rng = np.random.default_rng(seed)
    if rng.random() < w0:
        index, label, weight = i0, label0, w0
    else:
        index, label, weight = i1, label1, w1
    branch_amps = np.zeros(4, dtype=complex)
    branch_amps[index] = amps[index] / abs(amps[index])
    return Branch(weight, StateVector(state.subsystems, branch_amps), label)


def grw_collapse_state(state: StateVector, seed: int) -> Branch:
    """Spontaneous localization of a correlated photon-friend state.

    One correlated term survives, selected with its Born weight by the
    seeded generator; the returned branch is normalized and records the
    selection weight.
    """
    return _born_select_term(_require_pair_state(state), seed)


def many_worlds_branches(state: StateVector) -> list[Branch]:
    """Decompose a (photon, friend) state into friend-outcome branches.

    Both branches are kept whenever their weight exceeds the 1e-15 numerical
    floor; sqrt-weight recombination of the returned branches reproduces the
    input. Branch states keep their phases.
    """
    _require_pair_state(state)
    amps = state.amplitudes
    branches = []
    for friend_bit, label in enumerate(FRIEND_LABELS):
        component = np.zeros(4, dtype=complex)
        for photon_bit in (0, 1):
            index = 2 * photon_bit + friend_bit
            component[index] = amps[index]
        weight = float(np.vdot(component, component).real)
        if weight <= BRANCH_WEIGHT_FLOOR:
            continue
        branches.append(
            Branch(weight, StateVector(state.subsystems, component / math.sqrt(weight)), label)
        )
    return branches


@dataclass(frozen=True)
class FriendScale:
    """Whether the friend is an atom-scale or instrument-scale system."""

    kind: str
    grw: GrwParams

    def __post_init__(self):
        if self.kind not in (MICROSCOPIC, MACROSCOPIC):
            raise ValueError(f"unknown scale kind {self.kind!r}")
        if self.kind == MICROSCOPIC and self.grw.n_particles > MICRO_MAX_PARTICLES:
            raise ValueError(
                f"microscopic friend cannot have {self.grw.n_particles!r} particles"
                f" (> {MICRO_MAX_PARTICLES})"
            )
        if self.kind == MACROSCOPIC and self.grw.n_particles < MACRO_MIN_PARTICLES:
            raise ValueError(
                f"macroscopic friend cannot have {self.grw.n_particles!r} particles"
                f" (< {MACRO_MIN_PARTICLES})"
            )

    @classmethod
    def microscopic(cls, grw: GrwParams = ATOM_PARAMS) -> "FriendScale":
        return cls(MICROSCOPIC, grw)

    @classmethod
    def macroscopic(cls, grw: GrwParams = INSTRUMENT_PARAMS) -> "FriendScale":
        return cls(MACROSCOPIC, grw)


@dataclass(frozen=True)
class PilotWaveOutcome:
    """Either the untouched state (kept) or one effective branch (collapsed)."""

    kept: StateVector | None = None
    collapsed: Branch | None = None

    def __post_init__(self):
        if (self.kept is None) == (self.collapsed is None):
            raise ValueError("exactly one of kept/collapsed must be set")


def pilot_wave_effective_state(
    state: StateVector, scale: FriendScale, seed: int
) -> PilotWaveOutcome:
    """Pilot-wave verdict on a correlated photon-friend state.

    An atom's support regions can keep overlapping in configuration space,
    so the full state is returned untouched. An instrument's configuration
    concentrates in one region; the result is one Born-weighted branch,
    statistically identical to spontaneous-localization collapse.
    """
    _require_pair_state(state)
    if scale.kind == MICROSCOPIC:
        return PilotWaveOutcome(kept=state)
    return PilotWaveOutcome(collapsed=_born_select_term(state, seed))


def _friend_pair_branches(state: StateVector) -> list[Branch]:
    """Branch a 16-dim state by the joint (friend_a, friend_b) outcome.

    This is the per-side dephasing in the correlated basis: cross terms
    between different friend records vanish in the resulting ensemble.
    """
    amps = state.amplitudes
    branches = []
    for friend_a in (0, 1):
        for friend_b in (0, 1):
            component = np.zeros(16, dtype=complex)
            for photon_a in (0, 1):
                for photon_b in (0, 1):
                    index = 8 * photon_a + 4 * friend_a + 2 * photon_b + friend_b
                    component[index] = amps[index]
            weight = float(np.vdot(component, component).real)
            if weight <= BRANCH_WEIGHT_FLOOR:
                continue
            label = f"{FRIEND_LABELS[friend_a]}·{FRIEND_LABELS[friend_b]}"
            branches.append(
                Branch(weight, StateVector(state.subsystems, component / math.sqrt(weight)), label)
            )
    return branches


def _unitary_ensemble(state: StateVector) -> list[Branch]:
    return [Branch(1.0, state, "unitary")]


def pilot_wave_ensemble(state: StateVector, scale: FriendScale) -> list[Branch]:
    """Pilot wave: effective per-term dynamics iff the friends are macroscopic."""
    if scale.kind == MACROSCOPIC:
        return _friend_pair_branches(state)
    return _unitary_ensemble(state)


def grw_ensemble(state: StateVector, scale: FriendScale) -> list[Branch]:
    """Spontaneous localization: collapse iff it is likely within the run."""
    if grw_exact_probability(scale.grw) >= 0.5:
        return _friend_pair_branches(state)
    return _unitary_ensemble(state)


def many_worlds_ensemble(state: StateVector, scale: FriendScale) -> list[Branch]:
    """Many worlds: split on macroscopic friends, keep every branch."""
    if scale.kind == MACROSCOPIC:
        return _friend_pair_branches(state)
    return _unitary_ensemble(state)


_ENSEMBLE_BUILDERS = {
    "pilot_wave": pilot_wave_ensemble,
    "grw": grw_ensemble,
    "many_worlds": many_worlds_ensemble,
}


def _ensemble_chsh_exact(ensemble: list[Branch]) -> ChshReport:
    """Born-weighted average of the exact correlators over an ensemble."""
    correlators = {pair: 0.0 for pair in SETTING_PAIRS}
    for branch in ensemble:
        report = chsh_engine.chsh_exact(branch.state)
        for pair in SETTING_PAIRS:
            correlators[pair] += branch.weight * report.correlators[pair]
    return ChshReport("exact", correlators, s_from_correlators(correlators))


def _ensemble_chsh_sampled(ensemble: list[Branch], shots: int, seed: int) -> ChshReport:
    """Sampled CHSH run on the ensemble's mixture distribution.

    The per-setting streams hash only (seed, i, j): backends whose ensembles
    agree produce bit-identical reports under the same seed.
    """
    if shots < 2:
        raise ValueError("shots must be at least 2 (sample variance)")
    setting_products = {}
    for i, j in SETTING_PAIRS:
        mixture = None
        products = None
        for branch in ensemble:
            table = chsh_engine.joint_distribution(branch.state, i, j)
            probs = branch.weight * np.array([cell.joint_probability for cell in table])
            mixture = probs if mixture is None else mixture + probs
            if products is None:
                products = np.array([cell.a_value * cell.b_value for cell in table])
        setting_products[(i, j)] = chsh_engine.sample_products(
            mixture, products, shots, (seed, i, j)
        )
    return chsh_engine.report_from_setting_products(setting_products, shots)


@dataclass(frozen=True)
class AgreementReport:
    """CHSH predictions of the three backends side by side."""

    mode: str
    backends: dict[str, ChshReport]
    all_equal: bool

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "backends": {name: report.to_dict() for name, report in self.backends.items()},
            "all_equal": self.all_equal,
        }


def agreement_report(
    scale: FriendScale,
    shots: int = 10_000,
    seed: int = 0,
    sampled: bool = False,
) -> AgreementReport:
    """Run the four-photon CHSH experiment under each backend and compare.

    With microscopic friends every backend keeps the state intact and
    reports the unitary prediction S = 2*sqrt(2). With macroscopic friends
    each backend dephases the friends before the coherence measurements and
    S drops to sqrt(2)/2, below the classical bound. Reports are exact by
    default; ``sampled=True`` swaps in seeded Monte Carlo reports drawn from
    each backend's ensemble (shared per-setting streams, so agreeing
    ensembles yield bit-identical samples).
    """
    state = bell_wigner_state()
    mode = "micro" if scale.kind == MICROSCOPIC else "macro"
    reports: dict[str, ChshReport] = {}
    for name in BACKENDS:
        ensemble = _ENSEMBLE_BUILDERS[name](state, scale)
        if sampled:
            reports[name] = _ensemble_chsh_sampled(ensemble, shots, seed)
        else:
            reports[name] = _ensemble_chsh_exact(ensemble)
    s_values = [report.s_value for report in reports.values()]
    all_equal = max(s_values) - min(s_values) <= AGREEMENT_TOL
    return AgreementReport(mode, reports, all_equal)
