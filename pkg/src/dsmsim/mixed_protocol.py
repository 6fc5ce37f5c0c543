"""Quantum-controlled measurement of mixed states.

The joint input is rho' (x) |+><+|. After the controlled interaction the
probe is conditioned on a postselection outcome, leaving an unnormalized
2x2 probe matrix Lambda''(n, k): in C1 the interaction index is n and the
detector resolves the conjugate index k; in C2 the interaction projects
onto |c'_k> and the detector resolves |n>. Both configurations keep every
postselection outcome (scan-free), so the full (n, k) table is available
and an inverse Fourier sum over k recovers rho'_{nm} up to one overall
constant, which the final physicalization step removes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, ParameterError, PhysicsError
from .pure_protocol import PauliProbabilities, _check_config, nominal_coefficients
from .states import ConjugateState, DensityMatrix


@dataclass(frozen=True)
class ProbeConditional:
    """Unnormalized probe matrix Lambda''(n, k); trace = postselection weight."""

    m00: float
    m01: complex
    m11: float

    def __post_init__(self):
        if self.m00 < -1e-12 or self.m11 < -1e-12:
            raise PhysicsError("probe matrix diagonal must be nonnegative")
        if self.m00 + self.m11 > 1.0 + 1e-12:
            raise PhysicsError("probe matrix trace exceeds 1")
        object.__setattr__(self, "m00", max(self.m00, 0.0))
        object.__setattr__(self, "m11", max(self.m11, 0.0))

    @property
    def m10(self) -> complex:
        return self.m01.conjugate()

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [self.m10, self.m11]],
                        dtype=np.complex128)


@dataclass(frozen=True)
class RawReconstruction:
    """Pre-physicalization amplitude table; arbitrary scale, not a state."""

    elems: np.ndarray

    def __post_init__(self):
        elems = np.asarray(self.elems, dtype=np.complex128)
        if elems.ndim != 2 or elems.shape[0] != elems.shape[1]:
            raise ParameterError("raw reconstruction must be square")
        if not np.all(np.isfinite(elems)):
            raise ParameterError("raw reconstruction has non-finite entries")
        object.__setattr__(self, "elems", elems)

    @property
    def dim(self) -> int:
        return self.elems.shape[0]


def _check_mixed_inputs(rho: DensityMatrix, conj: ConjugateState, n: int):
    if conj.dim != rho.dim:
        raise ParameterError("state and conjugate-state dimensions differ")
    if not 0 <= n < rho.dim:
        raise ParameterError(f"basis index {n} outside [0, {rho.dim})")


def probe_conditional_c1(rho: DensityMatrix, n: int,
                         post: ConjugateState) -> ProbeConditional:
    """Probe matrix for interaction index n, postselected onto |c'_k>."""
    _check_mixed_inputs(rho, post, n)
    v = post.coeffs
    rv = rho.elems @ v
    overlap = float(np.vdot(v, rv).real)          # <c'_k| rho |c'_k>
    row = v[n].conjugate() * rv[n]                # <c'_k|n><n| rho |c'_k>
    col = complex(np.vdot(v, rho.elems[:, n]) * v[n])
    rnn = float(rho.elems[n, n].real)
    weight = float(abs(v[n]) ** 2)
    return ProbeConditional(
        m00=0.5 * (overlap - 2.0 * row.real + rnn * weight),
        m01=0.5 * (col - rnn * weight),
        m11=0.5 * rnn * weight,
    )


def probe_conditional_c2(rho: DensityMatrix, inter: ConjugateState,
                         n: int) -> ProbeConditional:
    """Probe matrix for conjugate-projector interaction, postselected onto |n>."""
    _check_mixed_inputs(rho, inter, n)
    v = inter.coeffs
    rv = rho.elems @ v
    overlap = float(np.vdot(v, rv).real)
    cross = complex(rv[n] * v[n].conjugate())     # <n| rho |c'_k><c'_k|n>
    rnn = float(rho.elems[n, n].real)
    weight = float(abs(v[n]) ** 2)
    return ProbeConditional(
        m00=0.5 * (rnn - 2.0 * cross.real + weight * overlap),
        m01=0.5 * (cross - weight * overlap),
        m11=0.5 * weight * overlap,
    )


def conditional_probabilities(lam: ProbeConditional) -> PauliProbabilities:
    """P_j = Tr(|j><j| Lambda'') for the six Pauli eigenstates."""
    half_trace = 0.5 * (lam.m00 + lam.m11)
    return PauliProbabilities(
        p0=lam.m00,
        p1=lam.m11,
        p_plus=half_trace + lam.m01.real,
        p_minus=half_trace - lam.m01.real,
        p_l=half_trace - lam.m01.imag,
        p_r=half_trace + lam.m01.imag,
    )


@dataclass(frozen=True)
class LambdaEstimate:
    """The measurable probe-matrix entries for one (n, k) cell.

    ``off_diag`` is Lambda''_10 in C1 and Lambda''_01 in C2; ``diag11`` is
    Lambda''_11 in both.
    """

    off_diag: complex
    diag11: float


def lambda_from_pauli(probs: PauliProbabilities, config: str) -> LambdaEstimate:
    """Recover the probe-matrix entries from Pauli readout probabilities."""
    _check_config(config)
    delta_x = probs.p_plus - probs.p_minus
    delta_y = probs.p_l - probs.p_r
    if config == "C1":
        off = 0.5 * complex(delta_x, delta_y)
    else:
        off = 0.5 * complex(delta_x, -delta_y)
    return LambdaEstimate(off_diag=off, diag11=probs.p1)


def conditional_tables(rho: DensityMatrix, family, config: str):
    """All probe-conditional entries over (n, k) in one vectorized pass.

    Returns (m00, m01, m11) arrays indexed [n, k]; cell (n, k) equals the
    matching probe_conditional_* entries. The Monte Carlo engine uses this
    to build one table per repetition instead of d^2 per-cell calls for
    each measurement setting.
    """
    _check_config(config)
    d = rho.dim
    if len(family) != d:
        raise ParameterError("need one conjugate state per index k")
    coeff_rows = np.array([state.coeffs for state in family])      # [k, n]
    rho_v = rho.elems @ coeff_rows.T                               # (rho v_k)[n]
    v_rho = coeff_rows.conj() @ rho.elems                          # (v_k^dag rho)[n]
    overlaps = np.einsum("kn,nk->k", coeff_rows.conj(), rho_v).real
    weights = family[0].magnitudes ** 2                            # |v_k[n]|^2, k-free
    diag = np.diag(rho.elems).real
    if config == "C1":
        m11 = 0.5 * np.outer(diag * weights, np.ones(d))
        m01 = 0.5 * (v_rho.T * coeff_rows.T - 2.0 * m11)
        m00 = 0.5 * (overlaps[None, :]
                     - 2.0 * (coeff_rows.T.conj() * rho_v).real
                     + (diag * weights)[:, None])
    else:
        cross = rho_v * coeff_rows.T.conj()
        mixer = np.outer(weights, overlaps)
        m11 = 0.5 * mixer
        m01 = 0.5 * (cross - mixer)
        m00 = 0.5 * (diag[:, None] - 2.0 * cross.real + mixer)
    return m00.real, m01, m11.real


def exact_lambda_tables(rho: DensityMatrix, family, config: str):
    """Noise-free (n, k) tables of off-diagonal and diagonal probe entries."""
    _check_config(config)
    d = rho.dim
    if len(family) != d:
        raise ParameterError("need one conjugate state per index k")
    off = np.empty((d, d), dtype=np.complex128)
    diag = np.empty((d, d), dtype=np.float64)
    for n in range(d):
        for k in range(d):
            if config == "C1":
                cell = probe_conditional_c1(rho, n, family[k])
                off[n, k] = cell.m10
            else:
                cell = probe_conditional_c2(rho, family[k], n)
                off[n, k] = cell.m01
            diag[n, k] = cell.m11
    return off, diag


def _check_tables(off_diag, diag11):
    off_diag = np.asarray(off_diag, dtype=np.complex128)
    diag11 = np.asarray(diag11, dtype=np.float64)
    d = off_diag.shape[0]
    if off_diag.shape != (d, d) or diag11.shape != (d, d):
        raise ParameterError("lambda tables must both be d x d over (n, k)")
    return off_diag, diag11, d


def reconstruct_mixed_c1(off_diag, diag11, nominal=None) -> RawReconstruction:
    """Inverse Fourier sum over k of Lambda''_10(n, k).

    The diagonal term uses the k-average of Lambda''_11(n, k): the exact
    entry is k-independent, so averaging the sampled estimates reduces
    variance without bias.
    """
    off_diag, diag11, d = _check_tables(off_diag, diag11)
    if nominal is None:
        nominal = nominal_coefficients(d)
    nominal = np.asarray(nominal, dtype=np.float64)
    diag_mean = diag11.mean(axis=1)
    ks = np.arange(d)
    raw = np.empty((d, d), dtype=np.complex128)
    for n in range(d):
        for m in range(d):
            phases = np.exp(2j * np.pi * (n - m) * ks / d)
            total = np.dot(off_diag[n], phases)
            if n == m:
                total = total + d * diag_mean[n]
            raw[n, m] = total / (nominal[n] * nominal[m])
    return RawReconstruction(raw)


def reconstruct_mixed_c2(off_diag, diag11, nominal=None) -> RawReconstruction:
    """Inverse Fourier sum over k of Lambda''_01(n, k) + Lambda''_11(n, k)."""
    off_diag, diag11, d = _check_tables(off_diag, diag11)
    if nominal is None:
        nominal = nominal_coefficients(d)
    nominal = np.asarray(nominal, dtype=np.float64)
    combined = off_diag + diag11
    ks = np.arange(d)
    raw = np.empty((d, d), dtype=np.complex128)
    for n in range(d):
        for m in range(d):
            phases = np.exp(2j * np.pi * (n - m) * ks / d)
            raw[n, m] = np.dot(combined[n], phases) / (nominal[n] * nominal[m])
    return RawReconstruction(raw)


def physicalize(raw: RawReconstruction) -> DensityMatrix:
    """Map a raw table to a legal state: rho~ = raw^dag raw / Tr(raw^dag raw).

    Hermitian, PSD, and trace-one by construction, but note the eigenvalue
    squaring: a raw table proportional to a non-projector state does not map
    back to that state.
    """
    gram = raw.elems.conj().T @ raw.elems
    trace = float(np.trace(gram).real)
    if not np.isfinite(trace) or trace <= 0.0:
        raise DegenerateDataError("raw reconstruction is zero; nothing to normalize")
    return DensityMatrix(gram / trace)
