"""Finite-copy outcome sampling.

Copies assigned to a measurement setting are simulated one inverse-CDF
lookup per copy: draw a uniform variate, find the first cumulative
probability above it. The lookup loop is the hot kernel of the Monte Carlo
engine, so a compiled extension handles it when available, with a
vectorized NumPy fallback selected at import time. Both backends perform
identical comparisons on identical variates and therefore return identical
counts; benchmarks/bench_sampling.py compares their throughput.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PhysicsError

try:
    from . import _invcdf

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _invcdf = None
    HAVE_COMPILED = False

DEFAULT_BACKEND = "compiled" if HAVE_COMPILED else "numpy"

PROB_SUM_ATOL = 1e-12
PROB_NEG_ATOL = -1e-12


def available_backends() -> tuple[str, ...]:
    return ("compiled", "numpy") if HAVE_COMPILED else ("numpy",)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Outcome labels and probabilities for one measurement setting."""

    labels: tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if len(self.labels) != probs.shape[0]:
            raise ParameterError("labels and probabilities must align")
        if probs.shape[0] == 0:
            raise ParameterError("distribution needs at least one outcome")
        low = float(probs.min())
        if low < PROB_NEG_ATOL:
            raise PhysicsError(f"negative outcome probability: {low!r}")
        probs = np.clip(probs, 0.0, None)
        total = float(probs.sum())
        if abs(total - 1.0) > PROB_SUM_ATOL:
            raise PhysicsError(f"outcome probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probs", probs)

    def cdf(self) -> np.ndarray:
        # An infinite last edge keeps every variate inside the table even
        # when rounding leaves the cumulative sum marginally below 1.
        edges = np.cumsum(self.probs)
        edges[-1] = np.inf
        return edges


def _counts_numpy(cdf: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cdf, uniforms, side="right")
    return np.bincount(idx, minlength=cdf.shape[0]).astype(np.int64)


def _counts_compiled(cdf: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    out = np.zeros(cdf.shape[0], dtype=np.int64)
    _invcdf.counts_from_uniforms(cdf, uniforms, out)
    return out


def sample_counts(dist: OutcomeDistribution, count: int, rng,
                  backend: str | None = None) -> np.ndarray:
    """Multinomial outcome counts for ``count`` copies, one variate per copy."""
    if count < 0:
        raise ParameterError("copy count must be nonnegative")
    if backend is None:
        backend = DEFAULT_BACKEND
    if backend not in available_backends():
        raise ParameterError(f"unknown or unavailable backend: {backend!r}")
    if count == 0:
        return np.zeros(len(dist.labels), dtype=np.int64)
    uniforms = rng.random(count)
    cdf = dist.cdf()
    if backend == "compiled":
        return _counts_compiled(cdf, uniforms)
    return _counts_numpy(cdf, uniforms)
