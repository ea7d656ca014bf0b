#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--uavs M] [--repeat R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from uavflow import _kernels_py

try:
    from uavflow import _kernels
except ImportError:
    _kernels = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--uavs", type=int, default=35)
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    m = args.uavs
    pos = np.column_stack(
        [rng.uniform(0, 1200, m), rng.uniform(0, 1200, m), rng.uniform(100, 200, m)]
    )
    gbs = np.array([0.0, 600.0, 0.0])
    gain_args = (pos, gbs, 1e-5, 9.61, 0.15, 10**0.1, 100.0, 2.0, 2.4e9, 3e8)

    _, h = _kernels_py.pair_gains(*gain_args)
    active = np.ones(m, dtype=np.uint8)
    sub = rng.integers(0, 25, size=m).astype(np.int64)
    sinr_args = (h, sub, active, 1.0 / 9.0, 8e-14, 25)

    z = rng.normal(size=(m, 9))

    cases = [
        ("sparsemax_batch", lambda k: k.sparsemax_batch(z)),
        ("pair_gains", lambda k: k.pair_gains(*gain_args)),
        ("sinr_table", lambda k: k.sinr_table(*sinr_args)),
    ]

    print(f"M = {m} UAVs, best of {args.repeat} runs")
    print(f"{'kernel':<18} {'numpy':>12} {'cython':>12} {'speedup':>9}")
    for name, call in cases:
        t_py = timeit(lambda: call(_kernels_py), args.repeat)
        if _kernels is None:
            print(f"{name:<18} {t_py*1e6:>10.1f}us {'n/a':>12} {'n/a':>9}")
            continue
        t_cy = timeit(lambda: call(_kernels), args.repeat)
        a = call(_kernels)
        b = call(_kernels_py)
        if isinstance(a, tuple):
            agree = all(np.allclose(x, y, rtol=1e-12) for x, y in zip(a, b))
        else:
            agree = np.allclose(a, b, rtol=1e-12)
        mark = "" if agree else "  MISMATCH"
        print(
            f"{name:<18} {t_py*1e6:>10.1f}us {t_cy*1e6:>10.1f}us "
            f"{t_py/t_cy:>8.2f}x{mark}"
        )


if __name__ == "__main__":
    main()
