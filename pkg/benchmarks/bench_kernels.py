#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-numpy fallback.

The numba path is the import-time default; RMCF_DISABLE_NUMBA=1 selects
the numpy path for the library. This script times both implementations
directly, so it works regardless of the flag.

Usage: python benchmarks/bench_kernels.py [--rows 200000] [--n 8] [--repeat 5]
"""

import argparse
import time

import numpy as np

from rmcf.kernels import (
    _complement_sigma_loops,
    _complement_sigma_numpy,
    _sigma_table_loops,
    _sigma_table_numpy,
)


def best_of(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=200_000)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    try:
        from numba import njit
    except ImportError:
        print("numba unavailable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    k = np.ascontiguousarray(rng.uniform(-2.0, 2.0, size=(args.rows, args.n)))
    r = max(1, args.n // 2)

    sigma_nb = njit(cache=True)(_sigma_table_loops)
    comp_nb = njit(cache=True)(_complement_sigma_loops)
    sigma_nb(k[:16])  # trigger compilation outside the timed region
    comp_nb(k[:16], r)

    rows = [
        ("sigma_table", _sigma_table_numpy, (k,), sigma_nb, (k,)),
        ("complement_sigma", _complement_sigma_numpy, (k, r), comp_nb, (k, r)),
    ]
    print(f"batch {args.rows} x {args.n} (r = {r}), best of {args.repeat}")
    print(f"{'kernel':<20}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for name, f_np, a_np, f_nb, a_nb in rows:
        out_np = f_np(*a_np)
        out_nb = f_nb(*a_nb)
        assert np.max(np.abs(out_np - out_nb)) < 1e-12
        t_np = best_of(f_np, a_np, args.repeat)
        t_nb = best_of(f_nb, a_nb, args.repeat)
        print(f"{name:<20}{t_np:>11.4f}s{t_nb:>11.4f}s{t_np / t_nb:>9.2f}x")


if __name__ == "__main__":
    main()
