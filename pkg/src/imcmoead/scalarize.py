"""Tchebycheff decomposition and global-replacement weight matching."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .weights import WeightLattice

WEIGHT_FLOOR = 1e-6


def tchebycheff(f: np.ndarray, lam: np.ndarray, z: np.ndarray) -> np.ndarray | float:
    """``max_j max(lam_j, 1e-6) * |f_j - z_j|``, broadcast over leading axes.

    Zero weights are floored so that boundary subproblems still see every
    objective. The stored lattice is left untouched.
    """
    f = np.asarray(f, dtype=float)
    lam = np.maximum(np.asarray(lam, dtype=float), WEIGHT_FLOOR)
    value = np.max(lam * np.abs(f - np.asarray(z, dtype=float)), axis=-1)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class ScalarizationContext:
    lattice: WeightLattice
    z: np.ndarray

    def __post_init__(self) -> None:
        if len(self.z) != self.lattice.m:
            raise ValueError("reference point and weights disagree on m")


def best_weight_index(f: np.ndarray, ctx: ScalarizationContext) -> int:
    """Index of the weight minimizing the Tchebycheff value of ``f``.

    Searches all weights; the lowest index wins ties.
    """
    values = tchebycheff(np.asarray(f)[None, :], ctx.lattice.weights, ctx.z)
    return int(np.argmin(values))
