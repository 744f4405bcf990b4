"""Command-line entry point.

    imcmoead run --config exp.json --out results/ [--jobs N] [--seed S]
    imcmoead summarize --in results/
    imcmoead plot --in results/

Exit status is 0 on success, 1 on a hard failure and 2 when some runs
failed but the rest completed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .harness import (
    RUNS_FILE,
    SUMMARY_FILE,
    ExperimentConfig,
    format_table,
    load_records,
    run_experiment,
    summarize,
    write_plots,
    write_summary_csv,
)

EXIT_OK, EXIT_FAILURE, EXIT_PARTIAL = 0, 1, 2


def _cmd_run(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_json(
        args.config, out_dir=args.out, jobs=args.jobs, seed=args.seed
    )
    records = run_experiment(config)
    failed = sum(not r.ok for r in records)
    if failed == len(records):
        print(f"all {failed} runs failed", file=sys.stderr)
        return EXIT_FAILURE
    print(format_table(summarize(records, config.algorithms[0].name)))
    if failed:
        print(f"{failed} of {len(records)} runs failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _load(directory: str):
    path = Path(directory) / RUNS_FILE
    if not path.exists():
        raise FileNotFoundError(f"{path} not found")
    return load_records(path)


def _cmd_summarize(args: argparse.Namespace) -> int:
    records = _load(args.indir)
    summary = summarize(records, args.baseline)
    write_summary_csv(summary, Path(args.indir) / SUMMARY_FILE)
    print(format_table(summary))
    return EXIT_PARTIAL if any(not r.ok for r in records) else EXIT_OK


def _cmd_plot(args: argparse.Namespace) -> int:
    for path in write_plots(_load(args.indir), args.indir):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imcmoead", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True, help="experiment JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--seed", type=int, default=None, help="override the base seed")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("summarize", help="rebuild summary.csv from runs.jsonl")
    p.add_argument("--in", dest="indir", required=True)
    p.add_argument("--baseline", default=None, help="config to compare against")
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("plot", help="redraw front plots from runs.jsonl")
    p.add_argument("--in", dest="indir", required=True)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
