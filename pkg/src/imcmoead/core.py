"""Problem and solution types for constrained multi-objective optimization.

A problem minimizes ``m`` objectives over a box in ``R^d`` subject to
``ng`` inequality constraints ``g_j(x) <= 0`` and ``nh`` equality
constraints ``h_j(x) = 0``. Equalities are relaxed to ``|h_j| <= eq_tol``.
"""

from __future__ import annotations

import threading
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

EQ_TOL = 1e-4

EvaluateFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


class OutOfBoundsError(ValueError):
    """Raised when a decision vector lies outside the problem box."""


@dataclass(frozen=True)
class Problem:
    """A constrained multi-objective problem.

    ``evaluate`` maps a d-vector to ``(f, g, h)`` with lengths ``m``,
    ``ng`` and ``nh``. It must be a pure function.
    """

    name: str
    m: int
    d: int
    ng: int
    nh: int
    lower: np.ndarray
    upper: np.ndarray
    evaluate: EvaluateFn = field(repr=False, compare=False)

    def __post_init__(self) -> None:
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if self.m < 2 or self.d < 1 or self.ng < 0 or self.nh < 0:
            raise ValueError(f"invalid problem shape for {self.name!r}")
        if lower.shape != (self.d,) or upper.shape != (self.d,):
            raise ValueError(f"bounds of {self.name!r} must have length {self.d}")
        if not np.all(lower < upper):
            raise ValueError(f"bounds of {self.name!r} need lower < upper")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def evaluate_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Evaluate the rows of ``X``; returns ``(F, G, H)`` matrices."""
        X = np.asarray(X, dtype=float).reshape(-1, self.d)
        rows = [self.evaluate(x) for x in X]
        n = len(X)
        return tuple(
            np.array([r[k] for r in rows], dtype=float).reshape(n, width)
            for k, width in enumerate((self.m, self.ng, self.nh))
        )

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(frozen=True)
class Solution:
    """An evaluated decision vector. Arrays are read-only."""

    x: np.ndarray
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    cv: float
    feasible: bool

    def dominates(self, other: Solution) -> bool:
        return dominates(self.f, other.f)


class EvaluationCounter:
    """Thread-safe tally of problem evaluations."""

    def __init__(self) -> None:
        self._count = 0
        self._lock = threading.Lock()

    def increment(self, n: int = 1) -> int:
        with self._lock:
            self._count += n
            return self._count

    @property
    def count(self) -> int:
        return self._count


def constraint_violation(
    g: Sequence[float] | np.ndarray,
    h: Sequence[float] | np.ndarray = (),
    eq_tol: float = EQ_TOL,
) -> float:
    """Sum of inequality excesses plus equality excesses beyond ``eq_tol``."""
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    cv = np.sum(np.maximum(g, 0.0)) + np.sum(np.maximum(np.abs(h) - eq_tol, 0.0))
    return float(cv)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float).reshape(-1)
    a.flags.writeable = False
    return a


def evaluate_solution(
    problem: Problem,
    x: Sequence[float] | np.ndarray,
    eq_tol: float = EQ_TOL,
    counter: EvaluationCounter | None = None,
) -> Solution:
    """Evaluate ``x`` on ``problem``; out-of-box vectors are rejected."""
    x = _frozen(x)
    if x.shape != (problem.d,):
        raise ValueError(f"expected a {problem.d}-vector, got shape {x.shape}")
    if not problem.contains(x):
        raise OutOfBoundsError(f"x={x} lies outside the bounds of {problem.name!r}")
    f, g, h = problem.evaluate(x)
    f, g, h = _frozen(f), _frozen(g), _frozen(h)
    if f.shape != (problem.m,) or g.shape != (problem.ng,) or h.shape != (problem.nh,):
        raise ValueError(
            f"{problem.name!r} returned shapes {f.shape}, {g.shape}, {h.shape}; "
            f"expected ({problem.m},), ({problem.ng},), ({problem.nh},)"
        )
    if counter is not None:
        counter.increment()
    cv = constraint_violation(g, h, eq_tol)
    return Solution(x=x, f=f, g=g, h=h, cv=cv, feasible=cv == 0.0)


def evaluate_population(
    problem: Problem,
    X: np.ndarray,
    eq_tol: float = EQ_TOL,
    counter: EvaluationCounter | None = None,
) -> list[Solution]:
    """Evaluate the rows of ``X`` in one batch call; same contract as
    :func:`evaluate_solution`."""
    X = np.asarray(X, dtype=float).reshape(-1, problem.d)
    if len(X) == 0:
        return []
    outside = np.any((X < problem.lower) | (X > problem.upper), axis=1)
    if outside.any():
        raise OutOfBoundsError(
            f"{int(outside.sum())} rows lie outside the bounds of {problem.name!r}"
        )
    F, G, H = problem.evaluate_batch(X)
    if counter is not None:
        counter.increment(len(X))
    cv = np.sum(np.maximum(G, 0.0), axis=1) + np.sum(np.maximum(np.abs(H) - eq_tol, 0.0), axis=1)
    return [
        Solution(x=_frozen(x), f=_frozen(f), g=_frozen(g), h=_frozen(h), cv=float(c), feasible=c == 0.0)
        for x, f, g, h, c in zip(X, F, G, H, cv)
    ]


def update_reference_point(
    z: np.ndarray, offspring_objectives: Iterable[Sequence[float]]
) -> np.ndarray:
    """Componentwise minimum of ``z`` and every offspring objective vector."""
    fs = np.asarray(list(offspring_objectives), dtype=float)
    if fs.size == 0:
        raise ValueError("offspring_objectives must be nonempty")
    return np.minimum(np.asarray(z, dtype=float), fs.min(axis=0))


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """Pareto dominance for minimization."""
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated_mask(points: np.ndarray) -> np.ndarray:
    """Boolean mask of the mutually nondominated rows of ``points``.

    Exact duplicates are kept once (the first occurrence).
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n == 0:
        return np.zeros(0, dtype=bool)
    mask = np.zeros(n, dtype=bool)
    if points.shape[1] == 2:
        # lexsort is stable: among duplicates the lowest index comes first
        order = np.lexsort((points[:, 1], points[:, 0]))
        f2 = points[order, 1]
        prev_best = np.concatenate(([np.inf], np.minimum.accumulate(f2)[:-1]))
        mask[order[f2 < prev_best]] = True
        return mask
    order = np.lexsort(points.T[::-1])
    kept: list[int] = []
    for i in order:
        p = points[i]
        if kept:
            q = points[kept]
            if np.any(np.all(q <= p, axis=1)):
                # dominated, or a duplicate of a kept point
                continue
        kept.append(i)
    mask[kept] = True
    return mask


_REGISTRY: dict[str, Callable[[], Problem]] = {}


def register_problem(name: str, factory: Callable[[], Problem] | Problem) -> None:
    """Register a problem (or a zero-argument factory) under ``name``."""
    if isinstance(factory, Problem):
        problem = factory
        factory = lambda: problem  # noqa: E731
    _REGISTRY[name.upper()] = factory


def get_problem(name: str) -> Problem:
    try:
        factory = _REGISTRY[name.upper()]
    except KeyError:
        raise KeyError(
            f"unknown problem {name!r}; registered: {', '.join(sorted(_REGISTRY))}"
        ) from None
    return factory()


def available_problems() -> list[str]:
    return sorted(_REGISTRY)
