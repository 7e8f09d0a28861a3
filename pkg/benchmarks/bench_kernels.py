#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs each of the four hot kernels on OFDM-symbol-sized blocks and reports
best-of-repeat wall times for both backends plus the speedup.  The numpy
side is imported directly from ``_fallback`` so a single process measures
both (no need to re-run with MMWLINK_FORCE_NUMPY=1).

Usage: python3 benchmarks/bench_kernels.py [--size 2192] [--blocks 256]
"""

import argparse
import sys
import time

import numpy as np

from mmwlink import _kernels
from mmwlink._kernels import _fallback

PA_COEFFS = np.array([1.0, -0.0103 + 0.0018j, -0.0009, -7e-5, -9e-6], dtype=np.complex128)
IQ_DIRECT = np.array([1.01, 0.02, -0.01], dtype=np.complex128)
IQ_IMAGE = np.array([0.01, -0.005, 0.002], dtype=np.complex128)
TDL_DELAYS = np.array([0, 4, 9, 15, 22, 30, 39, 49], dtype=np.int64)


def _best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=2192, help="samples per block (symbol + CP)")
    ap.add_argument("--blocks", type=int, default=256, help="blocks per timed call")
    ap.add_argument("--repeats", type=int, default=7, help="timed calls; the best is kept")
    args = ap.parse_args(argv)

    if _kernels.backend_name() != "compiled":
        print("compiled backend not importable; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    n = args.size * args.blocks
    x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    phi = 0.01 * rng.standard_normal(n)
    tdl_gains = (rng.standard_normal(8) + 1j * rng.standard_normal(8)) / 4.0

    cases = [
        ("polynomial_distort", (x, PA_COEFFS, 1.0)),
        ("phasor_rotate", (x, phi)),
        ("conjugate_branch_filter", (x, IQ_DIRECT, IQ_IMAGE)),
        ("tapped_delay_line", (x, TDL_DELAYS, tdl_gains)),
    ]

    total = n * 16 / 1e6  # MB of complex128 in+out, rough traffic figure
    print(f"block {args.size} x {args.blocks} blocks = {n} samples (~{total:.0f} MB round trip)")
    print(f"{'kernel':<26} {'compiled':>10} {'numpy':>10} {'speedup':>8}")
    for name, call_args in cases:
        fast = getattr(_kernels, name)
        slow = getattr(_fallback, name)
        mismatch = np.max(np.abs(fast(*call_args) - slow(*call_args)))
        if mismatch > 1e-10:
            print(f"{name}: backends disagree by {mismatch:.2e}", file=sys.stderr)
            return 1
        t_fast = _best_of(lambda: fast(*call_args), args.repeats)
        t_slow = _best_of(lambda: slow(*call_args), args.repeats)
        print(f"{name:<26} {t_fast * 1e3:>8.2f}ms {t_slow * 1e3:>8.2f}ms {t_slow / t_fast:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
