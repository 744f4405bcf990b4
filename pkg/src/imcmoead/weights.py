"""Das-Dennis simplex-lattice weights and their T-nearest neighborhoods."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np


def lattice_size(m: int, H: int) -> int:
    return math.comb(H + m - 1, m - 1)


def das_dennis(m: int, H: int) -> np.ndarray:
    """All weight vectors with components in {0, 1/H, ..., 1} summing to one.

    Rows are in ascending lexicographic order; there are C(H+m-1, m-1).
    """
    if m < 2:
        raise ValueError(f"need at least 2 objectives, got m={m}")
    if H < 1:
        raise ValueError(f"need at least 1 division, got H={H}")
    # stars and bars: choose m-1 bar positions among H+m-1 slots
    counts = []
    for bars in itertools.combinations(range(H + m - 1), m - 1):
        edges = (-1, *bars, H + m - 1)
        counts.append([edges[k + 1] - edges[k] - 1 for k in range(m)])
    counts = np.array(counts, dtype=np.int64)
    counts = counts[np.lexsort(counts.T[::-1])]
    return counts / H


def nearest_weights_for_population_size(m: int, n_target: int) -> tuple[int, np.ndarray]:
    """Smallest lattice with at least ``n_target`` points, truncated to ``n_target``.

    Trailing points (in lexicographic order) are dropped.
    """
    if n_target < 1:
        raise ValueError(f"population size must be positive, got {n_target}")
    H = 1
    while lattice_size(m, H) < n_target:
        H += 1
    return H, das_dennis(m, H)[:n_target]


def default_neighborhood_size(n: int, fraction: float = 0.1, minimum: int = 2) -> int:
    """``round(fraction * n)`` raised to ``minimum`` and capped at ``n``."""
    t = max(minimum, math.floor(fraction * n + 0.5))
    return max(1, min(t, n))


def build_neighborhoods(weights: np.ndarray, T: int) -> np.ndarray:
    """Indices of the ``T`` closest weights to each weight, self included.

    Distance ties (up to rounding noise) go to the lower index.
    """
    weights = np.asarray(weights, dtype=float)
    n = len(weights)
    if not 1 <= T <= n:
        raise ValueError(f"neighborhood size must be in [1, {n}], got {T}")
    diff = weights[:, None, :] - weights[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    # lattice distances that are equal in exact arithmetic can differ by an ulp
    dist = np.round(dist, 12)
    return np.argsort(dist, axis=1, kind="stable")[:, :T]


@dataclass(frozen=True)
class WeightLattice:
    weights: np.ndarray
    H: int
    T: int
    neighborhoods: np.ndarray

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def m(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def for_population(cls, m: int, n: int, T: int | None = None) -> WeightLattice:
        H, weights = nearest_weights_for_population_size(m, n)
        T = default_neighborhood_size(n) if T is None else min(T, n)
        weights.flags.writeable = False
        neighborhoods = build_neighborhoods(weights, T)
        neighborhoods.flags.writeable = False
        return cls(weights=weights, H=H, T=T, neighborhoods=neighborhoods)

    def to_csv(self, path) -> None:
        header = ",".join([f"w{j}" for j in range(self.m)] + ["neighbors"])
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for w, b in zip(self.weights, self.neighborhoods):
                cells = [repr(float(v)) for v in w] + [" ".join(map(str, b))]
                fh.write(",".join(cells) + "\n")
