"""Finite-copy Monte Carlo simulation of the measurement protocols.

One repetition draws fresh SPAM noise, splits the copy budget equally over
the measurement settings, samples outcome counts per setting, turns
frequencies into probability estimates, and reconstructs the state. Copies
whose postselection fails still consume budget: every prepared copy counts.

Settings follow the scan-free structure of each protocol:

    pure C1   - d x 3   (interaction index n, probe basis); only the
                conjugate postselection is kept, failures are an outcome
    pure C2   - 3       (probe basis; all postselected |n> kept)
    mixed C1  - d x 3   (interaction n, basis; all conjugate k kept)
    mixed C2  - d x 3   (interaction k, basis; all postselected |n> kept)

Every repetition owns a random stream derived from (seed entropy,
repetition index), so results are independent of worker count and
reductions happen in repetition order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import ParameterError
from .metrics import trace_distance_mixed, trace_distance_pure
from .mixed_protocol import (
    conditional_tables,
    lambda_from_pauli,
    physicalize,
    reconstruct_mixed_c1,
    reconstruct_mixed_c2,
)
from .noise import perturb_pure_state, sample_kappas, white_noise_channel
from .pure_protocol import (
    PauliProbabilities,
    _check_config,
    pauli_probabilities,
    probe_state_c1,
    probe_state_c2,
    reconstruct_pure,
)
from .sampling import OutcomeDistribution, sample_counts
from .states import ConjugateState, DensityMatrix, PureState, conjugate_family, make_conjugate_state

BASES = ("Z", "X", "Y")
BASIS_OUTCOMES = {"Z": ("0", "1"), "X": ("+", "-"), "Y": ("L", "R")}
FAIL = "fail"

STATE_KINDS = ("pure", "mixed")


@dataclass(frozen=True)
class Setting:
    """One measurement setting: a probe basis plus a fixed interaction index.

    ``index`` is the interaction's basis index n (C1) or conjugate index k
    (mixed C2); pure C2 has a single interaction, so index is None.
    """

    mode: str
    config: str
    basis: str
    index: int | None = None


@dataclass(frozen=True)
class CopyBudget:
    total: int
    per_setting: dict

    def __post_init__(self):
        counts = list(self.per_setting.values())
        if any(c < 0 for c in counts) or sum(counts) != self.total:
            raise ParameterError("per-setting copies must be nonnegative and sum to the total")


def enumerate_settings(config: str, state_kind: str, d: int) -> list[Setting]:
    """Deterministically ordered settings for one protocol."""
    _check_config(config)
    if state_kind not in STATE_KINDS:
        raise ParameterError(f"state kind must be one of {STATE_KINDS}")
    if state_kind == "pure" and config == "C2":
        return [Setting("pure", "C2", basis) for basis in BASES]
    return [
        Setting(state_kind, config, basis, index)
        for index in range(d)
        for basis in BASES
    ]


def allocate_copies(total: int, settings) -> CopyBudget:
    """Equal split, remainder to the lowest-indexed settings."""
    if total < 1:
        raise ParameterError("copy budget must be positive")
    if not settings:
        raise ParameterError("no settings to allocate to")
    base, extra = divmod(total, len(settings))
    per = {s: base + (1 if i < extra else 0) for i, s in enumerate(settings)}
    return CopyBudget(total=total, per_setting=per)


def _distribution(labels, probs) -> OutcomeDistribution:
    probs = list(probs)
    fail_prob = 1.0 - sum(probs)
    return OutcomeDistribution(tuple(labels) + (FAIL,), np.array(probs + [fail_prob]))


def build_outcome_distribution(setting: Setting, *, psi_prime: PureState = None,
                               conj: ConjugateState = None,
                               rho_prime: DensityMatrix = None,
                               family=None, tables=None) -> OutcomeDistribution:
    """Joint outcome distribution for every copy assigned to a setting.

    Labels are (postselection result, probe eigenvalue) pairs for scan-free
    settings, bare probe eigenvalues for pure C1, plus a trailing failure
    outcome absorbing the remaining probability weight. Mixed settings may
    pass precomputed ``tables`` from conditional_tables so one repetition
    shares a single (n, k) table across its settings.
    """
    pair = BASIS_OUTCOMES[setting.basis]
    if setting.mode == "pure":
        if psi_prime is None or conj is None:
            raise ParameterError("pure settings need psi_prime and conj")
        if setting.config == "C1":
            table = pauli_probabilities(
                probe_state_c1(psi_prime, conj, setting.index)).as_dict()
            return _distribution(pair, [table[j] for j in pair])
        labels, probs = [], []
        for n in range(psi_prime.dim):
            table = pauli_probabilities(probe_state_c2(psi_prime, conj, n)).as_dict()
            for j in pair:
                labels.append((n, j))
                probs.append(table[j])
        return _distribution(labels, probs)
    if tables is None:
        if rho_prime is None or family is None:
            raise ParameterError("mixed settings need rho_prime and the "
                                 "conjugate family (or precomputed tables)")
        tables = conditional_tables(rho_prime, family, setting.config)
    m00, m01, m11 = tables
    if setting.config == "C1":
        # interaction index n fixed; branches run over the conjugate index k
        diag0, off, diag1 = m00[setting.index], m01[setting.index], m11[setting.index]
    else:
        diag0, off, diag1 = (m00[:, setting.index], m01[:, setting.index],
                             m11[:, setting.index])
    half_trace = 0.5 * (diag0 + diag1)
    if setting.basis == "Z":
        upper, lower = diag0, diag1
    elif setting.basis == "X":
        upper, lower = half_trace + off.real, half_trace - off.real
    else:
        upper, lower = half_trace - off.imag, half_trace + off.imag
    branches = diag0.shape[0]
    labels = [(branch, j) for branch in range(branches) for j in pair]
    probs = np.empty(2 * branches)
    probs[0::2] = upper
    probs[1::2] = lower
    return _distribution(labels, probs)


def estimate_pure_probabilities(samples: dict, budget: CopyBudget,
                                d: int) -> list[PauliProbabilities]:
    """Frequency estimates P_j = count / copies, one table row per index n."""
    probs = {n: {} for n in range(d)}
    for setting, (labels, counts) in samples.items():
        copies = budget.per_setting[setting]
        for label, count in zip(labels, counts):
            if label == FAIL:
                continue
            value = count / copies if copies else 0.0
            if setting.config == "C1":
                probs[setting.index][label] = value
            else:
                n, j = label
                probs[n][j] = value
    return [
        PauliProbabilities(
            p0=probs[n].get("0", 0.0), p1=probs[n].get("1", 0.0),
            p_plus=probs[n].get("+", 0.0), p_minus=probs[n].get("-", 0.0),
            p_l=probs[n].get("L", 0.0), p_r=probs[n].get("R", 0.0),
        )
        for n in range(d)
    ]


def estimate_lambda_tables(samples: dict, budget: CopyBudget, config: str,
                           d: int):
    """Frequency-estimated probe-matrix tables over (n, k)."""
    six = {(n, k): {} for n in range(d) for k in range(d)}
    for setting, (labels, counts) in samples.items():
        copies = budget.per_setting[setting]
        for label, count in zip(labels, counts):
            if label == FAIL:
                continue
            other, j = label
            value = count / copies if copies else 0.0
            cell = (setting.index, other) if config == "C1" else (other, setting.index)
            six[cell][j] = value
    off = np.empty((d, d), dtype=np.complex128)
    diag = np.empty((d, d), dtype=np.float64)
    for (n, k), table in six.items():
        est = lambda_from_pauli(
            PauliProbabilities(
                p0=table.get("0", 0.0), p1=table.get("1", 0.0),
                p_plus=table.get("+", 0.0), p_minus=table.get("-", 0.0),
                p_l=table.get("L", 0.0), p_r=table.get("R", 0.0),
            ),
            config,
        )
        off[n, k] = est.off_diag
        diag[n, k] = est.diag11
    return off, diag


@dataclass(frozen=True)
class ExperimentPoint:
    """One grid point of a sweep: fixed state, noise, budget, and seed."""

    mode: str
    config: str
    state: PureState
    num_copies: int
    repetitions: int
    seed_entropy: tuple
    sigma_prep: float = 0.0
    sigma_post: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.mode not in STATE_KINDS:
            raise ParameterError(f"mode must be one of {STATE_KINDS}")
        _check_config(self.config)
        if self.repetitions < 1:
            raise ParameterError("need at least one repetition")


@dataclass(frozen=True)
class RunResult:
    distances: np.ndarray
    states: tuple = field(repr=False)

    @property
    def mean(self) -> float:
        return float(np.mean(self.distances))

    @property
    def std_error(self) -> float:
        if self.distances.shape[0] < 2:
            return 0.0
        return float(np.std(self.distances, ddof=1) / np.sqrt(self.distances.shape[0]))


def _repetition_rng(point: ExperimentPoint, rep: int):
    seq = np.random.SeedSequence(tuple(point.seed_entropy) + (rep,))
    return np.random.default_rng(seq)


def run_single_repetition(point: ExperimentPoint, rep: int):
    """One noise draw, one sampled data set, one reconstruction.

    Returns (trace distance to the true state, reconstructed state).
    """
    rng = _repetition_rng(point, rep)
    d = point.state.dim
    if point.mode == "pure":
        psi_prime, _ = perturb_pure_state(point.state, point.sigma_prep, rng)
        conj = make_conjugate_state(d, 0, sample_kappas(d, point.sigma_post, rng))
        settings = enumerate_settings(point.config, "pure", d)
        budget = allocate_copies(point.num_copies, settings)
        samples = {}
        for setting in settings:
            dist = build_outcome_distribution(setting, psi_prime=psi_prime, conj=conj)
            samples[setting] = (dist.labels,
                                sample_counts(dist, budget.per_setting[setting], rng))
        table = estimate_pure_probabilities(samples, budget, d)
        recon = reconstruct_pure(table, config=point.config)
        return trace_distance_pure(point.state, recon), recon
    target = point.state.projector()
    rho_prime = white_noise_channel(target, point.epsilon)
    family = conjugate_family(d, sample_kappas(d, point.sigma_post, rng))
    tables = conditional_tables(rho_prime, family, point.config)
    settings = enumerate_settings(point.config, "mixed", d)
    budget = allocate_copies(point.num_copies, settings)
    samples = {}
    for setting in settings:
        dist = build_outcome_distribution(setting, tables=tables)
        samples[setting] = (dist.labels,
                            sample_counts(dist, budget.per_setting[setting], rng))
    off, diag = estimate_lambda_tables(samples, budget, point.config, d)
    if point.config == "C1":
        raw = reconstruct_mixed_c1(off, diag)
    else:
        raw = reconstruct_mixed_c2(off, diag)
    recon = physicalize(raw)
    return trace_distance_mixed(target, recon), recon


def run_repetitions(point: ExperimentPoint, threads: int = 1,
                    executor=None) -> RunResult:
    """All repetitions of one grid point, reduced in repetition order.

    Workers are separate processes (the repetition loop is Python-bound, so
    threads would serialize on the interpreter lock); every repetition owns
    its seed-derived stream, so the worker count never changes the result.
    Sweeps running many grid points should pass a shared ``executor`` to
    avoid per-point pool startup.
    """
    reps = range(point.repetitions)
    work = partial(run_single_repetition, point)
    if executor is not None:
        outcomes = list(executor.map(work, reps))
    elif threads > 1 and point.repetitions > 1:
        with ProcessPoolExecutor(max_workers=min(threads, point.repetitions)) as pool:
            outcomes = list(pool.map(work, reps))
    else:
        outcomes = [work(rep) for rep in reps]
    distances = np.array([dist for dist, _ in outcomes])
    return RunResult(distances=distances, states=tuple(state for _, state in outcomes))
