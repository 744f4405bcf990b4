"""Built-in constrained benchmark problems and reference-front oracles.

All formulas are written over the last axis so the same function evaluates
a single d-vector or an ``(n, d)`` batch. Inequalities are expressed in
``g(x) <= 0`` form.

References:
    Binh, T. T., & Korn, U. (1997). MOBES: A multiobjective evolution
    strategy for constrained optimization problems.
    Srinivas, N., & Deb, K. (1994). Multiobjective optimization using
    nondominated sorting in genetic algorithms.
    Tanaka, M. et al. (1995). GA-based decision support system for
    multicriteria optimization.
    Osyczka, A., & Kundu, S. (1995). A new method to solve generalized
    multicriteria optimization problems using the simple genetic algorithm.
    Deb, K. (2001). Multi-Objective Optimization Using Evolutionary
    Algorithms (CONSTR).
"""

from __future__ import annotations

import functools
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .core import EQ_TOL, Problem, nondominated_mask, register_problem

FrontSampler = Callable[[int], np.ndarray]

# total grid size used by the brute-force oracle
BRUTE_FORCE_POINTS = 1_000_000
MAX_BRUTE_FORCE_DIM = 3


class UnsupportedOracleError(ValueError):
    """No analytic front and too many variables for a grid search."""


@dataclass(frozen=True)
class ProblemSpec(Problem):
    """A problem with closed-form, batch-capable formulas.

    ``front_sampler(n)`` returns decision vectors on (or containing) the
    Pareto set; the oracle evaluates and filters them.
    """

    front_sampler: FrontSampler | None = field(default=None, repr=False, compare=False)

    def evaluate_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=float)
        f, g, h = self.evaluate(X)
        n = len(X)
        return (
            np.asarray(f).reshape(n, self.m),
            np.asarray(g).reshape(n, self.ng),
            np.asarray(h).reshape(n, self.nh),
        )


def _stack(*cols) -> np.ndarray:
    if not cols:
        return np.zeros(0)
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


def _empty(x: np.ndarray) -> np.ndarray:
    return np.zeros(x.shape[:-1] + (0,))


def bnh(x):
    x1, x2 = x[..., 0], x[..., 1]
    f = _stack(4 * x1**2 + 4 * x2**2, (x1 - 5) ** 2 + (x2 - 5) ** 2)
    g = _stack((x1 - 5) ** 2 + x2**2 - 25, 7.7 - (x1 - 8) ** 2 - (x2 + 3) ** 2)
    return f, g, _empty(x)


def srn(x):
    x1, x2 = x[..., 0], x[..., 1]
    f = _stack(2 + (x1 - 2) ** 2 + (x2 - 1) ** 2, 9 * x1 - (x2 - 1) ** 2)
    g = _stack(x1**2 + x2**2 - 225, x1 - 3 * x2 + 10)
    return f, g, _empty(x)


def tnk(x):
    x1, x2 = x[..., 0], x[..., 1]
    f = _stack(x1, x2)
    # arctan2 equals atan(x1/x2) on the positive box and is defined at x2 = 0
    g1 = -(x1**2) - x2**2 + 1 + 0.1 * np.cos(16 * np.arctan2(x1, x2))
    g2 = (x1 - 0.5) ** 2 + (x2 - 0.5) ** 2 - 0.5
    return f, _stack(g1, g2), _empty(x)


def osy(x):
    x1, x2, x3, x4, x5, x6 = (x[..., k] for k in range(6))
    f1 = -(25 * (x1 - 2) ** 2 + (x2 - 2) ** 2 + (x3 - 1) ** 2 + (x4 - 4) ** 2 + (x5 - 1) ** 2)
    f2 = np.sum(x**2, axis=-1)
    g = _stack(
        2 - x1 - x2,
        x1 + x2 - 6,
        x2 - x1 - 2,
        x1 - 3 * x2 - 2,
        (x3 - 3) ** 2 + x4 - 4,
        4 - (x5 - 3) ** 2 - x6,
    )
    return _stack(f1, f2), g, _empty(x)


def constr(x):
    x1, x2 = x[..., 0], x[..., 1]
    f = _stack(x1, (1 + x2) / x1)
    g = _stack(6 - x2 - 9 * x1, 1 + x2 - 9 * x1)
    return f, g, _empty(x)


def sphere2(x):
    x1 = x[..., 0]
    return _stack(x1**2, (x1 - 1) ** 2), _empty(x), _empty(x)


def eq_line(x):
    x1, x2 = x[..., 0], x[..., 1]
    f = _stack(x1, x2**2)
    h = _stack(x1 + x2 - 1)
    return f, _empty(x), h


def _srn_front(n: int) -> np.ndarray:
    x2 = np.linspace(2.5, math.sqrt(225 - 2.5**2), n)
    return _stack(np.full(n, -2.5), x2)


def _osy_front(n: int) -> np.ndarray:
    """Union of the five known Pareto-set segments."""
    k = max(2, n // 5)
    t = np.linspace(0.0, 1.0, k)
    one, zero = np.ones(k), np.zeros(k)
    x1_c = 4.056 + t * (5 - 4.056)
    segments = [
        _stack(5 * one, one, 1 + 4 * t, zero, 5 * one, zero),
        _stack(5 * one, one, 1 + 4 * t, zero, one, zero),
        _stack(x1_c, (x1_c - 2) / 3, one, zero, one, zero),
        _stack(zero, 2 * one, 1 + t * (3.732 - 1), zero, one, zero),
        _stack(t, 2 - t, one, zero, one, zero),
    ]
    return np.concatenate(segments)


def _sphere2_front(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)[:, None]


def _eq_line_front(n: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    return _stack(t, 1 - t)


def _bnh_front(n: int) -> np.ndarray:
    # x1 = x2 on [0, 3], then x2 = 3 with x1 on [3, 5]
    k = max(2, n // 2)
    t = np.linspace(0.0, 1.0, k)
    return np.concatenate([_stack(3 * t, 3 * t), _stack(3 + 2 * t, np.full(k, 3.0))])


def builtin_suite() -> list[ProblemSpec]:
    """The built-in problems, freshly constructed."""
    return [
        ProblemSpec("BNH", 2, 2, 2, 0, [0, 0], [5, 3], bnh, _bnh_front),
        ProblemSpec("SRN", 2, 2, 2, 0, [-20, -20], [20, 20], srn, _srn_front),
        ProblemSpec("TNK", 2, 2, 2, 0, [0, 0], [math.pi, math.pi], tnk),
        ProblemSpec(
            "OSY", 2, 6, 6, 0, [0, 0, 1, 0, 1, 0], [10, 10, 5, 6, 5, 10], osy, _osy_front
        ),
        ProblemSpec("CONSTR-RING", 2, 2, 2, 0, [0.1, 0], [1, 5], constr),
        ProblemSpec("SPHERE-2", 2, 1, 0, 0, [-1], [2], sphere2, _sphere2_front),
        ProblemSpec("EQ-LINE", 2, 2, 0, 1, [0, 0], [1, 1], eq_line, _eq_line_front),
    ]


def _grid(spec: ProblemSpec, per_axis: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(spec.lower, spec.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([a.reshape(-1) for a in mesh], axis=1)


def feasible_front(spec: Problem, X: np.ndarray, eq_tol: float = EQ_TOL) -> np.ndarray:
    """Nondominated objective vectors among the feasible rows of ``X``."""
    F, G, Hq = spec.evaluate_batch(X)
    cv = np.sum(np.maximum(G, 0.0), axis=1) + np.sum(
        np.maximum(np.abs(Hq) - eq_tol, 0.0), axis=1
    )
    F = F[cv == 0.0]
    return F[nondominated_mask(F)] if len(F) else F.reshape(0, spec.m)


def reference_front(
    spec: Problem, resolution: int | None = None, eq_tol: float = EQ_TOL
) -> np.ndarray:
    """Dense feasible nondominated front, sorted by the first objective.

    Problems with an analytic Pareto-set sampler use ``resolution``
    samples (default 2000). Otherwise a uniform grid with ``resolution``
    points per axis is searched, by default the smallest grid with at
    least a million points.
    """
    sampler = getattr(spec, "front_sampler", None)
    if sampler is not None:
        X = np.clip(sampler(resolution or 2000), spec.lower, spec.upper)
    elif spec.d <= MAX_BRUTE_FORCE_DIM:
        per_axis = resolution or math.ceil(BRUTE_FORCE_POINTS ** (1.0 / spec.d) - 1e-9)
        X = _grid(spec, per_axis)
    else:
        raise UnsupportedOracleError(
            f"{spec.name!r} has no analytic front and d={spec.d} > {MAX_BRUTE_FORCE_DIM}"
        )
    F = feasible_front(spec, X, eq_tol)
    return F[np.lexsort(F.T[::-1])]


@functools.lru_cache(maxsize=32)
def cached_reference_front(name: str, resolution: int | None = None) -> np.ndarray:
    from .core import get_problem

    front = reference_front(get_problem(name), resolution)
    front.flags.writeable = False
    return front


for _spec in builtin_suite():
    register_problem(_spec.name, _spec)
