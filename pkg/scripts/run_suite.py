"""Run every built-in problem against IM-C-MOEA/D and the random-search baseline.

Usage:
    python3 scripts/run_suite.py --out results/suite --reps 10 --jobs 1
"""

from __future__ import annotations

import argparse
import logging

from imcmoead.harness import AlgorithmEntry, ExperimentConfig, format_table, run_experiment, summarize
from imcmoead.problems import builtin_suite


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/suite")
    parser.add_argument("--reps", type=int, default=10)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--N", type=int, default=80)
    parser.add_argument("--max-fe", type=int, default=20000)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)

    params = {"N": args.N, "max_fe": args.max_fe}
    config = ExperimentConfig(
        problems=[p.name for p in builtin_suite()],
        algorithms=[
            AlgorithmEntry("im-c-moead", "im-c-moead", dict(params)),
            AlgorithmEntry("random-search", "random-search", dict(params)),
        ],
        repetitions=args.reps,
        seed=args.seed,
        out_dir=args.out,
        jobs=args.jobs,
    )
    records = run_experiment(config)
    print(format_table(summarize(records)))


if __name__ == "__main__":
    main()
