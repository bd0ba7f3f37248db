"""Benchmark the compiled kernel core against the pure-Python fallback.

Micro-benchmarks call both backend modules directly; the end-to-end
comparison re-runs a small simulation in subprocesses with the backend
forced through PERFSIG_PURE_PYTHON so import-time selection is exercised
exactly as users hit it.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from perfsig._kernels import fallback

try:
    from perfsig._kernels import _native as native
except ImportError:
    native = None


def timeit(fn, *args, repeats=5, inner=2000):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def micro_benchmarks(inner):
    rng = np.random.default_rng(0)
    window = rng.normal(100, 8, 30)  # hot path: one trial window
    other = rng.normal(100, 8, 30)
    year = rng.normal(100, 8, 360)

    cases = [
        ("znorm(30)", "znorm", (window,)),
        ("znorm(360)", "znorm", (year,)),
        ("pearson(30)", "pearson", (window, other)),
        ("cosine(30)", "cosine", (window, other)),
        ("euclidean(30)", "euclidean_distance", (window, other)),
        ("cusum_scan(30)", "cusum_scan", (window, 100.0, 4.0, 40.0)),
        ("cusum_scan(360)", "cusum_scan", (year, 100.0, 4.0, 40.0)),
    ]
    print(f"{'kernel':<16} {'fallback':>12} {'native':>12} {'speedup':>9}")
    for label, name, args in cases:
        t_fb = timeit(getattr(fallback, name), *args, inner=inner)
        if native is None:
            print(f"{label:<16} {t_fb * 1e6:>10.2f}us {'n/a':>12} {'n/a':>9}")
            continue
        t_nat = timeit(getattr(native, name), *args, inner=inner)
        print(
            f"{label:<16} {t_fb * 1e6:>10.2f}us {t_nat * 1e6:>10.2f}us "
            f"{t_fb / t_nat:>8.1f}x"
        )


END_TO_END = (
    "import time; from perfsig import _kernels; "
    "from perfsig.simharness import SimConfig, sweep_axis, AXIS_SIMILARITY; "
    "cfg = SimConfig(num_runs=20, similarity_thresholds=(0.3, 0.6, 0.9)); "
    "t = time.perf_counter(); sweep_axis(cfg, AXIS_SIMILARITY); "
    "print(f'{_kernels.BACKEND}: {time.perf_counter() - t:.2f}s')"
)


def end_to_end():
    print("\nend-to-end sweep (20 runs x 3 thresholds):")
    sys.stdout.flush()
    for forced in ("0", "1"):
        env = dict(os.environ, PERFSIG_PURE_PYTHON=forced)
        subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="fewer iterations")
    args = parser.parse_args()
    if native is None:
        print("note: compiled kernels unavailable; showing fallback only")
    micro_benchmarks(inner=300 if args.quick else 2000)
    end_to_end()


if __name__ == "__main__":
    main()
