"""Timing comparison of the two pair-projection kernels.

Runs all_pairs over the same flats with FLATCLUSTER_BACKEND=numba and
=numpy and reports per-config wall times plus the worst distance
disagreement (which should sit at rounding level). The numba path gets
one untimed warmup call so JIT compilation is not billed to the kernel.

Usage: python3 benchmarks/bench_backends.py [--repeats N] [--seed S]
"""

from __future__ import annotations

import argparse
import os
import time

import numpy as np

from flatcluster import GenConfig, all_pairs, generate_dataset

CONFIGS = (
    (50, 12, 4),
    (50, 30, 10),
    (100, 60, 20),
    (200, 90, 30),
)


def make_flats(n: int, d: int, k: int, seed: int):
    centers = np.zeros((2, d))
    centers[0, 0] = -100.0
    centers[1, 0] = +100.0
    cfg = GenConfig(d=d, k=k, centers=centers, per_cluster=n // 2, seed=seed)
    return generate_dataset(cfg).flats


def timed(flats, backend: str, repeats: int):
    os.environ["FLATCLUSTER_BACKEND"] = backend
    best = float("inf")
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = all_pairs(flats)
        best = min(best, time.perf_counter() - start)
    return best, np.array([p.distance for p in out])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions per backend (best is kept)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    # warm up the JIT once on a tiny instance
    os.environ["FLATCLUSTER_BACKEND"] = "numba"
    all_pairs(make_flats(4, 6, 2, args.seed))

    header = (f"{'n':>5} {'d':>4} {'k':>4} {'pairs':>7} "
              f"{'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8} "
              f"{'max |diff|':>11}")
    print(header)
    print("-" * len(header))
    for n, d, k in CONFIGS:
        flats = make_flats(n, d, k, args.seed)
        t_nb, dist_nb = timed(flats, "numba", args.repeats)
        t_np, dist_np = timed(flats, "numpy", args.repeats)
        gap = float(np.max(np.abs(dist_nb - dist_np)))
        print(f"{n:>5} {d:>4} {k:>4} {n * (n - 1) // 2:>7} "
              f"{t_nb:>10.3f} {t_np:>10.3f} {t_np / t_nb:>8.2f} "
              f"{gap:>11.3e}")


if __name__ == "__main__":
    main()
