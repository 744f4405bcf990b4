"""Hypervolume and the Wilcoxon rank-sum test."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from .core import nondominated_mask

MC_SAMPLES = 1_000_000
_MC_CHUNK = 200_000


@dataclass(frozen=True)
class HVResult:
    value: float
    method: str  # "exact" or "monte-carlo"
    ref: tuple[float, ...]
    samples: int = 0
    stderr: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ref"] = list(self.ref)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> HVResult:
        return cls(
            value=d["value"],
            method=d["method"],
            ref=tuple(d["ref"]),
            samples=d.get("samples", 0),
            stderr=d.get("stderr", 0.0),
        )


def _prepare(points, ref) -> tuple[np.ndarray, np.ndarray]:
    ref = np.asarray(ref, dtype=float).reshape(-1)
    P = np.asarray(points, dtype=float).reshape(-1, len(ref))
    P = P[np.all(P <= ref, axis=1)]
    if len(P):
        P = P[nondominated_mask(P)]
    return P, ref


def _hv2d(P: np.ndarray, ref: np.ndarray) -> float:
    # P is nondominated, so sorting by f1 ascending gives f2 descending
    P = P[np.argsort(P[:, 0], kind="stable")]
    widths = np.diff(np.append(P[:, 0], ref[0]))
    return float(np.sum(widths * (ref[1] - P[:, 1])))


def _hv3d(P: np.ndarray, ref: np.ndarray) -> float:
    P = P[np.argsort(P[:, 2], kind="stable")]
    total = 0.0
    for k in range(len(P)):
        upper = P[k + 1, 2] if k + 1 < len(P) else ref[2]
        depth = upper - P[k, 2]
        if depth <= 0:
            continue
        slab = P[: k + 1, :2]
        slab = slab[nondominated_mask(slab)]
        total += depth * _hv2d(slab, ref[:2])
    return total


def hypervolume_exact(points, ref) -> float:
    """Exact dominated volume for two or three objectives.

    Points not weakly dominating ``ref`` are discarded first.
    """
    P, ref = _prepare(points, ref)
    if len(ref) not in (2, 3):
        raise ValueError(f"exact hypervolume supports m in {{2, 3}}, got m={len(ref)}")
    if len(P) == 0:
        return 0.0
    return _hv2d(P, ref) if len(ref) == 2 else _hv3d(P, ref)


def hypervolume_mc(
    points, ref, samples: int = MC_SAMPLES, rng: np.random.Generator | None = None
) -> HVResult:
    """Monte Carlo estimate over the box spanned by the points' ideal and ``ref``."""
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng() if rng is None else rng
    P, ref = _prepare(points, ref)
    ref_t = tuple(float(r) for r in ref)
    if len(P) == 0:
        return HVResult(0.0, "monte-carlo", ref_t, samples, 0.0)
    ideal = P.min(axis=0)
    box = float(np.prod(ref - ideal))
    hits = 0
    done = 0
    while done < samples:
        n = min(_MC_CHUNK, samples - done)
        S = ideal + rng.random((n, len(ref))) * (ref - ideal)
        dominated = np.zeros(n, dtype=bool)
        for p in P:
            dominated |= np.all(p <= S, axis=1)
        hits += int(dominated.sum())
        done += n
    frac = hits / samples
    stderr = box * math.sqrt(frac * (1 - frac) / samples)
    return HVResult(box * frac, "monte-carlo", ref_t, samples, stderr)


def hypervolume(
    points, ref, samples: int = MC_SAMPLES, rng: np.random.Generator | None = None
) -> HVResult:
    """Exact for m <= 3, Monte Carlo beyond."""
    ref = np.asarray(ref, dtype=float).reshape(-1)
    if len(ref) <= 3:
        return HVResult(hypervolume_exact(points, ref), "exact", tuple(map(float, ref)))
    return hypervolume_mc(points, ref, samples, rng)


def normalize(points, ideal, nadir) -> np.ndarray:
    """Map ``ideal`` to 0 and ``nadir`` to 1 per objective (flat axes keep scale 1)."""
    ideal = np.asarray(ideal, dtype=float)
    span = np.asarray(nadir, dtype=float) - ideal
    span = np.where(span > 0, span, 1.0)
    return (np.asarray(points, dtype=float) - ideal) / span


def wilcoxon_rank_sum(a, b, alpha: float = 0.05) -> tuple[float, str]:
    """Two-sided rank-sum test of ``a`` against ``b``.

    Uses exact enumeration when the pooled sample has at most 12 values and
    the tie-corrected normal approximation otherwise. The verdict is "≈"
    when ``p >= alpha``; otherwise "+" if ``a`` has the larger median
    (larger is better) and "-" if not.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = len(a), len(b)
    if n1 < 3 or n2 < 3:
        raise ValueError("each sample needs at least 3 values")
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return 1.0, "≈"
    ranks = rankdata(pooled)
    w = ranks[:n1].sum()
    expected = n1 * (n1 + n2 + 1) / 2.0
    dev = abs(w - expected)
    if n1 + n2 <= 12:
        count = total = 0
        for idx in itertools.combinations(range(n1 + n2), n1):
            total += 1
            if abs(ranks[list(idx)].sum() - expected) >= dev - 1e-9:
                count += 1
        p = count / total
    else:
        n = n1 + n2
        _, tie_counts = np.unique(pooled, return_counts=True)
        tie_term = np.sum(tie_counts**3 - tie_counts) / (n * (n - 1))
        var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
        p = math.erfc(dev / math.sqrt(2.0 * var)) if var > 0 else 1.0
    p = min(1.0, p)
    if p >= alpha:
        return p, "≈"
    return p, "+" if np.median(a) > np.median(b) else "-"
