"""Time the compiled and numpy kernels, and the effect of worker threads.

    python3 benchmarks/bench_delta.py --sizes 40,70,100 --workers 1,2,4
"""
import argparse
import os
import time

import numpy as np

from gromovlab import BACKENDS, FiniteMetricSpace, Method, hyperbolicity_delta, ultrametric_defect


def timed(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="40,70,100")
    ap.add_argument("--workers", default="1,2,4")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    workers = [int(s) for s in args.workers.split(",")]
    print(f"backends available: {sorted(BACKENDS)}; cpus usable: {len(os.sched_getaffinity(0))}")
    print(f"{'kernel':<14}{'backend':<9}{'n':>5}{'workers':>9}{'seconds':>12}{'value':>22}")
    rng = np.random.default_rng(args.seed)
    for n in sizes:
        X = FiniteMetricSpace.from_points(rng.uniform(0, 1, (n, 3)))
        cases = [
            ("fourpoint", lambda b, w: hyperbolicity_delta(X, Method.FOUR_POINT, w, b).delta),
            ("gromov", lambda b, w: hyperbolicity_delta(X, Method.GROMOV_PRODUCT, w, b).delta),
            ("ultra", lambda b, w: ultrametric_defect(X, w, b).defect),
        ]
        for name, run in cases:
            ref = None
            for backend in sorted(BACKENDS):
                for w in workers:
                    sec, value = timed(lambda: run(backend, w), args.repeat)
                    same = "" if ref is None or value == ref else "  MISMATCH"
                    ref = value if ref is None else ref
                    print(f"{name:<14}{backend:<9}{n:>5}{w:>9}{sec:>12.4f}{value:>22.17g}{same}")


if __name__ == "__main__":
    main()
