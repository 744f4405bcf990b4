"""Objective-space k-means partitioning and feasibility-first tournaments."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import Solution, dominates

logger = logging.getLogger(__name__)


@dataclass
class Partition:
    assignments: np.ndarray
    centroids: np.ndarray
    K: int
    n_iter: int = 0
    sse_history: list[float] = field(default_factory=list)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == k)

    @property
    def sse(self) -> float:
        return self.sse_history[-1] if self.sse_history else 0.0


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.sum(diff * diff, axis=-1)


def _kmeans_pp(points: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    chosen = [int(rng.integers(n))]
    closest = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, K):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            idx = int(rng.integers(n))
        chosen.append(idx)
        closest = np.minimum(closest, np.sum((points - points[idx]) ** 2, axis=1))
    return points[chosen].copy()


def _sse(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    return float(np.sum((points - centroids[labels]) ** 2))


def _repair_empty(
    points: np.ndarray, labels: np.ndarray, centroids: np.ndarray, K: int
) -> None:
    """Give each empty cluster the point farthest from its own centroid."""
    for k in range(K):
        counts = np.bincount(labels, minlength=K)
        if counts[k] > 0:
            continue
        dist = np.sum((points - centroids[labels]) ** 2, axis=1)
        # only take from clusters that keep at least one member
        dist[counts[labels] < 2] = -1.0
        i = int(np.argmax(dist))
        labels[i] = k
        centroids[k] = points[i]


def kmeans(
    points: np.ndarray,
    K: int,
    rng: np.random.Generator,
    max_iters: int = 50,
) -> Partition:
    """Lloyd's algorithm with k-means++ seeding.

    Stops at an assignment fixpoint or after ``max_iters`` rounds. The
    returned centroids are the means of their assigned points.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n == 0:
        raise ValueError("cannot cluster an empty point set")
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    if K > n:
        logger.warning("K=%d exceeds the %d points; using K=%d", K, n, n)
        K = n

    centroids = _kmeans_pp(points, K, rng)
    labels = np.argmin(_sq_dists(points, centroids), axis=1)
    _repair_empty(points, labels, centroids, K)
    history: list[float] = []
    n_iter = 0
    for n_iter in range(1, max_iters + 1):
        centroids = np.array([points[labels == k].mean(axis=0) for k in range(K)])
        history.append(_sse(points, labels, centroids))
        new_labels = np.argmin(_sq_dists(points, centroids), axis=1)
        _repair_empty(points, new_labels, centroids, K)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    centroids = np.array([points[labels == k].mean(axis=0) for k in range(K)])
    final_sse = _sse(points, labels, centroids)
    if not history or final_sse != history[-1]:
        history.append(final_sse)
    return Partition(
        assignments=labels, centroids=centroids, K=K, n_iter=n_iter, sse_history=history
    )


def kmeans_objective_space(
    population: Sequence[Solution],
    K: int,
    rng: np.random.Generator,
    max_iters: int = 50,
) -> Partition:
    """Cluster a population by its objective vectors."""
    F = np.array([s.f for s in population])
    return kmeans(F, K, rng, max_iters=max_iters)


def tournament_winner(a: Solution, b: Solution, rng: np.random.Generator) -> Solution:
    if a.feasible != b.feasible:
        return a if a.feasible else b
    if not a.feasible:
        if a.cv != b.cv:
            return a if a.cv < b.cv else b
        return a if rng.random() < 0.5 else b
    if dominates(a.f, b.f):
        return a
    if dominates(b.f, a.f):
        return b
    return a if rng.random() < 0.5 else b


def tournament_select(
    subpop: Sequence[Solution], count: int, rng: np.random.Generator
) -> list[Solution]:
    """Winners of ``count`` binary tournaments drawn with replacement.

    Feasible beats infeasible, lower violation beats higher, and among
    feasible pairs Pareto dominance decides; otherwise a fair coin.
    Solutions are immutable, so winners are returned by reference.
    """
    if not subpop:
        raise ValueError("tournament needs a nonempty subpopulation")
    n = len(subpop)
    winners = []
    for _ in range(count):
        i, j = rng.integers(n, size=2)
        winners.append(tournament_winner(subpop[i], subpop[j], rng))
    return winners
