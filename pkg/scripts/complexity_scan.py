"""Median wall time per generation on SPHERE-2 as the population doubles.

Usage:
    python3 scripts/complexity_scan.py --sizes 40 80 160 320
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from imcmoead.algorithm import AlgoConfig, run
from imcmoead.core import get_problem


def generation_time(problem: str, N: int, generations: int, seed: int) -> float:
    stamps: list[float] = []
    run(
        get_problem(problem),
        AlgoConfig(N=N, max_fe=N * (generations + 1), seed=seed),
        on_generation=lambda s, p: stamps.append(time.perf_counter()),
    )
    return float(np.median(np.diff(stamps)))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--problem", default="SPHERE-2")
    parser.add_argument("--sizes", type=int, nargs="+", default=[40, 80, 160])
    parser.add_argument("--generations", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    prev = None
    print(f"{'N':>6} {'s/gen':>10} {'ratio':>7}")
    for N in args.sizes:
        t = generation_time(args.problem, N, args.generations, args.seed)
        ratio = "" if prev is None else f"{t / prev:7.2f}"
        print(f"{N:>6} {t:>10.4f} {ratio}")
        prev = t


if __name__ == "__main__":
    main()
