"""Throughput comparison of the sampling backends.

The inverse-CDF outcome counter is the Monte Carlo engine's hot kernel.
This script times the compiled extension against the NumPy fallback on a
distribution shaped like a scan-free measurement setting (2d + 1 outcomes)
and checks that both produce identical counts from identical variates.

Run:  python benchmarks/bench_sampling.py
"""

import time

import numpy as np

from dsmsim.sampling import (
    OutcomeDistribution,
    available_backends,
    sample_counts,
)


def representative_distribution(d: int = 8) -> OutcomeDistribution:
    rng = np.random.default_rng(3)
    weights = rng.random(2 * d + 1)
    return OutcomeDistribution(tuple(range(2 * d + 1)), weights / weights.sum())


def time_backend(dist, count, backend, repeats=7) -> float:
    best = float("inf")
    for trial in range(repeats):
        rng = np.random.default_rng(1234 + trial)
        start = time.perf_counter()
        sample_counts(dist, count, rng, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    dist = representative_distribution()
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled kernel not built; nothing to compare")

    for backend in backends:
        counts = sample_counts(dist, 10**6, np.random.default_rng(99), backend=backend)
        if backend == backends[0]:
            reference = counts
        elif not np.array_equal(reference, counts):
            raise SystemExit("backends disagree on identical variates")
    if len(backends) > 1:
        print("backend agreement on 1e6 copies: identical counts")

    header = f"{'copies':>12} " + " ".join(f"{b:>12}" for b in backends)
    if len(backends) > 1:
        header += f" {'speedup':>9}"
    print(header)
    for count in (10**5, 10**6, 10**7):
        times = [time_backend(dist, count, b) for b in backends]
        line = f"{count:>12d} " + " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) > 1:
            line += f" {times[1] / times[0]:>8.2f}x"
        print(line)


if __name__ == "__main__":
    main()
