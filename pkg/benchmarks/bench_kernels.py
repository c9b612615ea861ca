#!/usr/bin/env python3
"""Benchmark the compiled sieve kernel against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--x 1e8] [--repeat 3]

Times the raw segment-marking kernel on cache-sized segments and the
end-to-end race pipeline (race_series + exact density), once per backend,
and verifies the two backends produce identical output while timing them.
"""
import argparse
import math
import time

import numpy as np


def _base(hi):
    limit = math.isqrt(hi - 1)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    return primes[primes != 2]


def bench_marking(backend, X: int, repeat: int) -> float:
    from primerace.sieve import DEFAULT_SEGMENT_FLAGS

    base = _base(X + 1)
    span = 2 * DEFAULT_SEGMENT_FLAGS
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        lo = 3
        while lo < X:
            count = min(DEFAULT_SEGMENT_FLAGS, (X - lo) // 2 + 1)
            backend.mark_odd_flags(lo, count, base)
            lo += span
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pipeline(X: int, repeat: int) -> float:
    from primerace import exact_race_density, race_series

    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        rs = race_series(4, 3, 1, X)
        exact_race_density(rs)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--x", type=float, default=1e8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    X = int(args.x)

    from primerace._kernels import load_backend

    pure = load_backend("pure")
    try:
        compiled = load_backend("compiled")
    except ImportError:
        compiled = None
        print("compiled kernel not built; only the pure backend is timed")

    # correctness cross-check before timing
    base = _base(2_000_001)
    a = pure.mark_odd_flags(1_000_001, 100_000, base)
    if compiled is not None:
        b = compiled.mark_odd_flags(1_000_001, 100_000, base)
        assert np.array_equal(a, b), "backends disagree"

    print(f"segment marking to X = {X:.2e} (best of {args.repeat}):")
    t_pure = bench_marking(pure, X, args.repeat)
    print(f"  pure      {t_pure:8.3f} s   {X / t_pure / 1e6:8.1f} M numbers/s")
    if compiled is not None:
        t_comp = bench_marking(compiled, X, args.repeat)
        print(f"  compiled  {t_comp:8.3f} s   {X / t_comp / 1e6:8.1f} M numbers/s")
        print(f"  speedup   {t_pure / t_comp:8.2f} x")

    import primerace

    print(f"\nend-to-end race_series(4,3,1,{X:.0e}) + exact density "
          f"[active backend: {primerace.KERNEL_BACKEND}]:")
    t = bench_pipeline(X, args.repeat)
    print(f"  {t:8.3f} s")
    print("\nset PRIMERACE_PURE=1 to force the fallback for the pipeline timing")


if __name__ == "__main__":
    main()
