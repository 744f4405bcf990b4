"""Seeded experiment runner, HV summary tables and front plots.

An experiment runs every (problem, algorithm config, repetition) triple,
with repetition ``r`` using seed ``base_seed + r`` for every config so that
configs are compared seed against seed. Hypervolume is measured after all
runs finish, in an objective space normalized per problem by the ideal and
nadir of the reference front joined with every observed feasible
nondominated point, with reference point 1.1 on every axis.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .algorithm import AlgoConfig, random_search, run
from .core import get_problem, nondominated_mask
from .metrics import MC_SAMPLES, HVResult, hypervolume, normalize, wilcoxon_rank_sum
from .problems import UnsupportedOracleError, cached_reference_front

logger = logging.getLogger(__name__)

ALGORITHMS = {"im-c-moead": run, "random-search": random_search}
REF_OFFSET = 1.1
RUNS_FILE = "runs.jsonl"
SUMMARY_FILE = "summary.csv"


@dataclass
class AlgorithmEntry:
    name: str
    algorithm: str = "im-c-moead"
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        AlgoConfig(**self.params)  # fail early on bad keys

    @classmethod
    def from_dict(cls, d: dict) -> AlgorithmEntry:
        d = dict(d)
        name = d.pop("name")
        algorithm = d.pop("algorithm", "im-c-moead")
        params = d.pop("params", {})
        params.update(d)
        return cls(name=name, algorithm=algorithm, params=params)

    def config(self, seed: int) -> AlgoConfig:
        return AlgoConfig(**{**self.params, "seed": seed})


@dataclass
class ExperimentConfig:
    problems: list[str]
    algorithms: list[AlgorithmEntry]
    repetitions: int = 30
    seed: int = 0
    hv_samples: int = MC_SAMPLES
    out_dir: str | None = None
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if not self.problems or not self.algorithms:
            raise ValueError("need at least one problem and one algorithm config")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ValueError(f"algorithm config names must be unique, got {names}")
        for name in self.problems:
            get_problem(name)

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> ExperimentConfig:
        algorithms = [
            a if isinstance(a, AlgorithmEntry) else AlgorithmEntry.from_dict(a)
            for a in d["algorithms"]
        ]
        kwargs = {
            "problems": list(d["problems"]),
            "algorithms": algorithms,
            "repetitions": d.get("repetitions", 30),
            "seed": d.get("seed", 0),
            "hv_samples": d.get("hv_samples", MC_SAMPLES),
        }
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path, **overrides) -> ExperimentConfig:
        with open(path) as fh:
            return cls.from_dict(json.load(fh), **overrides)


@dataclass
class RunRecord:
    problem: str
    config_id: str
    seed: int
    front: list[list[float]] = field(default_factory=list)
    hv: HVResult | None = None
    wall_time: float = 0.0
    n_evaluations: int = 0
    stats: list[dict] = field(default_factory=list)
    norm_ideal: list[float] | None = None
    norm_nadir: list[float] | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hv"] = None if self.hv is None else self.hv.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> RunRecord:
        d = dict(d)
        if d.get("hv") is not None:
            d["hv"] = HVResult.from_dict(d["hv"])
        return cls(**d)


def execute_run(problem_name: str, entry: AlgorithmEntry, seed: int) -> RunRecord:
    """One run; failures are captured in the record instead of raised."""
    record = RunRecord(problem=problem_name, config_id=entry.name, seed=seed)
    start = time.perf_counter()
    try:
        problem = get_problem(problem_name)
        population, stats = ALGORITHMS[entry.algorithm](problem, entry.config(seed))
        F = np.array([s.f for s in population if s.feasible]).reshape(-1, problem.m)
        F = F[nondominated_mask(F)] if len(F) else F
        F = F[np.lexsort(F.T[::-1])] if len(F) else F
        record.front = F.tolist()
        record.stats = [s.to_dict() for s in stats]
        record.n_evaluations = stats[-1].fe_used
    except Exception as exc:  # a failed run is recorded and skipped
        logger.error("run %s/%s/seed=%d failed: %s", problem_name, entry.name, seed, exc)
        record.error = "".join(traceback.format_exception_only(type(exc), exc)).strip()
    record.wall_time = time.perf_counter() - start
    return record


def _execute(task: tuple[str, AlgorithmEntry, int]) -> RunRecord:
    return execute_run(*task)


def normalization_bounds(problem_name: str, fronts: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Ideal and nadir of the reference front joined with observed fronts."""
    m = get_problem(problem_name).m
    parts = [np.asarray(f, dtype=float).reshape(-1, m) for f in fronts]
    try:
        parts.append(np.asarray(cached_reference_front(problem_name)))
    except UnsupportedOracleError:
        logger.warning("no reference front for %s; normalizing by observed points", problem_name)
    union = np.concatenate(parts) if parts else np.zeros((0, m))
    if len(union) == 0:
        return np.zeros(m), np.ones(m)
    union = union[nondominated_mask(union)]
    return union.min(axis=0), union.max(axis=0)


def normalized_hv(
    front, ideal, nadir, samples: int = MC_SAMPLES, seed: int = 0
) -> HVResult:
    m = len(ideal)
    front = np.asarray(front, dtype=float).reshape(-1, m)
    ref = np.full(m, REF_OFFSET)
    return hypervolume(normalize(front, ideal, nadir), ref, samples, np.random.default_rng(seed))


def score_records(records: list[RunRecord], hv_samples: int = MC_SAMPLES) -> None:
    """Attach normalization bounds and HV to every successful record, in place."""
    by_problem: dict[str, list[RunRecord]] = {}
    for r in records:
        if r.ok:
            by_problem.setdefault(r.problem, []).append(r)
    for problem, group in by_problem.items():
        ideal, nadir = normalization_bounds(problem, [np.array(r.front) for r in group])
        for r in group:
            r.norm_ideal = ideal.tolist()
            r.norm_nadir = nadir.tolist()
            r.hv = normalized_hv(r.front, ideal, nadir, hv_samples, r.seed)


def run_experiment(config: ExperimentConfig) -> list[RunRecord]:
    """Run all repetitions, score them, and write outputs if ``out_dir`` is set."""
    tasks = [
        (problem, entry, config.seed + rep)
        for problem in config.problems
        for entry in config.algorithms
        for rep in range(config.repetitions)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_execute, tasks))
    else:
        records = [_execute(t) for t in tasks]
    score_records(records, config.hv_samples)
    if config.out_dir is not None:
        write_outputs(records, config.out_dir, baseline=config.algorithms[0].name)
    return records


# ---------------------------------------------------------------- summary


def format_sci(value: float, digits: int) -> str:
    """Scientific notation with an unpadded exponent, e.g. ``5.0000e-1``."""
    mantissa, exponent = f"{value:.{digits}e}".split("e")
    return f"{mantissa}e{int(exponent):+d}"


def format_mean_std(mean: float, std: float) -> str:
    return f"{format_sci(mean, 4)} ({format_sci(std, 2)})"


@dataclass
class SummaryRow:
    problem: str
    config: str
    runs: int
    hv_mean: float
    hv_std: float
    verdict: str = ""
    p_value: float | None = None

    @property
    def text(self) -> str:
        cell = format_mean_std(self.hv_mean, self.hv_std)
        return f"{cell} {self.verdict}" if self.verdict else cell


@dataclass
class Summary:
    rows: list[SummaryRow]
    baseline: str
    totals: dict[str, tuple[int, int, int]]

    @property
    def problems(self) -> list[str]:
        return list(dict.fromkeys(r.problem for r in self.rows))

    @property
    def configs(self) -> list[str]:
        return list(dict.fromkeys(r.config for r in self.rows))

    def row(self, problem: str, config: str) -> SummaryRow:
        for r in self.rows:
            if r.problem == problem and r.config == config:
                return r
        raise KeyError((problem, config))


def _std(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def summarize(records: list[RunRecord], baseline: str | None = None, alpha: float = 0.05) -> Summary:
    """Mean/std HV per (problem, config) and rank-sum verdicts against ``baseline``.

    The baseline defaults to the first config seen. A verdict of "+" means
    the config beats the baseline significantly, "-" that it loses.
    """
    scored = [r for r in records if r.ok and r.hv is not None]
    if not scored:
        raise ValueError("no successful, scored runs to summarize")
    configs = list(dict.fromkeys(r.config_id for r in scored))
    problems = list(dict.fromkeys(r.problem for r in scored))
    baseline = configs[0] if baseline is None else baseline
    values: dict[tuple[str, str], list[float]] = {}
    for r in scored:
        values.setdefault((r.problem, r.config_id), []).append(r.hv.value)
    rows = []
    totals = {c: [0, 0, 0] for c in configs if c != baseline}
    for problem in problems:
        base = np.array(values.get((problem, baseline), []))
        for c in configs:
            v = np.array(values.get((problem, c), []))
            if len(v) == 0:
                continue
            row = SummaryRow(problem, c, len(v), float(np.mean(v)), _std(v))
            if c != baseline and len(v) >= 3 and len(base) >= 3:
                row.p_value, row.verdict = wilcoxon_rank_sum(v, base, alpha)
                totals[c]["+≈-".index(row.verdict)] += 1
            rows.append(row)
    return Summary(rows=rows, baseline=baseline, totals={c: tuple(t) for c, t in totals.items()})


SUMMARY_HEADER = ["problem", "config", "runs", "hv_mean", "hv_std", "mean_std", "verdict", "p_value"]


def summary_lines(summary: Summary) -> list[list[str]]:
    lines = [SUMMARY_HEADER]
    for r in summary.rows:
        p = "" if r.p_value is None else repr(r.p_value)
        lines.append(
            [r.problem, r.config, str(r.runs), repr(r.hv_mean), repr(r.hv_std),
             format_mean_std(r.hv_mean, r.hv_std), r.verdict, p]
        )
    for c, (w, t, l) in summary.totals.items():
        lines.append(["w/t/l", c, "", "", "", f"{w}/{t}/{l}", "", ""])
    return lines


def write_summary_csv(summary: Summary, path) -> None:
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(summary_lines(summary))


def read_summary_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def format_table(summary: Summary) -> str:
    """Problems as rows, configs as columns, "mean (std) verdict" cells."""
    configs = summary.configs
    head = ["Problem", *configs]
    body = []
    for p in summary.problems:
        cells = [p]
        for c in configs:
            try:
                cells.append(summary.row(p, c).text)
            except KeyError:
                cells.append("-")
        body.append(cells)
    totals = ["+/-/≈"] + [
        "" if c == summary.baseline else "{}/{}/{}".format(
            summary.totals[c][0], summary.totals[c][2], summary.totals[c][1]
        )
        for c in configs
    ]
    table = [head, *body, totals]
    widths = [max(len(row[k]) for row in table) for k in range(len(head))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in table)


# ---------------------------------------------------------------- records io


def save_records(records: list[RunRecord], path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def load_records(path) -> list[RunRecord]:
    with open(path) as fh:
        return [RunRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def best_runs(records: list[RunRecord]) -> dict[tuple[str, str], RunRecord]:
    """Highest-HV run per (problem, config); the lowest seed wins ties."""
    best: dict[tuple[str, str], RunRecord] = {}
    for r in records:
        if not r.ok or r.hv is None:
            continue
        key = (r.problem, r.config_id)
        cur = best.get(key)
        if cur is None or (r.hv.value, -r.seed) > (cur.hv.value, -cur.seed):
            best[key] = r
    return best


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text)


def plot_filename(record: RunRecord) -> str:
    return f"{_slug(record.problem)}__{_slug(record.config_id)}.svg"


def write_plots(records: list[RunRecord], out_dir) -> list[Path]:
    out = Path(out_dir)
    paths = []
    for (problem, _), record in sorted(best_runs(records).items()):
        try:
            reference = cached_reference_front(problem)
        except UnsupportedOracleError:
            reference = None
        paths.append(emit_front_plot(record, out / plot_filename(record), reference))
    return paths


def write_outputs(records: list[RunRecord], out_dir, baseline: str | None = None) -> None:
    """``runs.jsonl``, ``summary.csv`` and one SVG per (problem, config)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_records(records, out / RUNS_FILE)
    if any(r.ok for r in records):
        write_summary_csv(summarize(records, baseline), out / SUMMARY_FILE)
        write_plots(records, out)


# ---------------------------------------------------------------- plots

_PANEL = 360
_MARGIN = 48
_MAX_REFERENCE_MARKERS = 400


def plot_coordinates(record: RunRecord, points) -> np.ndarray:
    """Objective vectors in the record's normalized space."""
    m = len(record.norm_ideal) if record.norm_ideal is not None else None
    pts = np.asarray(points, dtype=float)
    if m is None:
        return pts.reshape(len(pts), -1) if pts.size else np.zeros((0, 2))
    pts = pts.reshape(-1, m)
    return normalize(pts, record.norm_ideal, record.norm_nadir)


def _panel_svg(
    ox: float, oy: float, run_pts: np.ndarray, ref_pts: np.ndarray, a: int, b: int
) -> list[str]:
    both = np.concatenate([run_pts[:, [a, b]], ref_pts[:, [a, b]]]) if len(ref_pts) else run_pts[:, [a, b]]
    lo = np.minimum(0.0, both.min(axis=0)) if len(both) else np.zeros(2)
    hi = np.maximum(REF_OFFSET, both.max(axis=0)) if len(both) else np.full(2, REF_OFFSET)
    span = hi - lo
    inner = _PANEL - 2 * _MARGIN

    def sx(v: float) -> float:
        return ox + _MARGIN + (v - lo[0]) / span[0] * inner

    def sy(v: float) -> float:
        return oy + _PANEL - _MARGIN - (v - lo[1]) / span[1] * inner

    out = [
        f'<rect x="{ox + _MARGIN:.2f}" y="{oy + _MARGIN:.2f}" width="{inner:.2f}" '
        f'height="{inner:.2f}" fill="none" stroke="black"/>',
        f'<text x="{ox + _PANEL / 2:.2f}" y="{oy + _PANEL - 12:.2f}" '
        f'text-anchor="middle" font-size="12">f{a + 1}</text>',
        f'<text x="{ox + 14:.2f}" y="{oy + _PANEL / 2:.2f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 {ox + 14:.2f} {oy + _PANEL / 2:.2f})">f{b + 1}</text>',
    ]
    for k, (vx, vy) in enumerate([(lo[0], lo[1]), (hi[0], hi[1])]):
        out.append(
            f'<text x="{sx(vx):.2f}" y="{oy + _PANEL - _MARGIN + 14:.2f}" '
            f'text-anchor="middle" font-size="10">{vx:.2f}</text>'
        )
        out.append(
            f'<text x="{ox + _MARGIN - 4:.2f}" y="{sy(vy) + 3:.2f}" '
            f'text-anchor="end" font-size="10">{vy:.2f}</text>'
        )
    if len(ref_pts):
        step = max(1, math.ceil(len(ref_pts) / _MAX_REFERENCE_MARKERS))
        for p in ref_pts[::step]:
            out.append(
                f'<circle class="reference" cx="{sx(p[a]):.2f}" cy="{sy(p[b]):.2f}" '
                f'r="1.5" fill="#999999"/>'
            )
    for p in run_pts:
        out.append(
            f'<circle class="run" cx="{sx(p[a]):.2f}" cy="{sy(p[b]):.2f}" r="3" '
            f'fill="none" stroke="#1f5fbf"/>'
        )
    return out


def emit_front_plot(record: RunRecord, path, reference=None) -> Path:
    """SVG scatter of the record's front over the reference front.

    Coordinates are in the normalized space used for HV. Two objectives
    give one panel; more give one panel per objective pair.
    """
    m = len(record.norm_ideal) if record.norm_ideal is not None else (
        len(record.front[0]) if record.front else 2
    )
    run_pts = plot_coordinates(record, record.front).reshape(-1, m)
    ref_pts = (
        plot_coordinates(record, reference).reshape(-1, m)
        if reference is not None and len(reference)
        else np.zeros((0, m))
    )
    pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
    cols = min(3, len(pairs))
    rows = math.ceil(len(pairs) / cols)
    width, height = cols * _PANEL, rows * _PANEL + 24
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{width / 2:.2f}" y="16" text-anchor="middle" font-size="13">'
        f"{record.problem} / {record.config_id} / seed {record.seed}</text>",
    ]
    for k, (a, b) in enumerate(pairs):
        ox, oy = (k % cols) * _PANEL, 24 + (k // cols) * _PANEL
        parts.extend(_panel_svg(ox, oy, run_pts, ref_pts, a, b))
    parts.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n")
    return path
