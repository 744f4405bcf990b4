"""Gaussian-process inverse models from objective space to decision space.

Each decision variable ``x_i`` is regressed on a single objective ``f_j``
by a univariate GP with additive Gaussian noise. Offspring are produced by
sampling objective values around a cluster and pushing them through the
models, one draw from the noisy predictive distribution per variable.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular

from .core import Problem, Solution

SAMPLE_MARGIN = 0.1


class ModelDegenerateError(ValueError):
    """Raised when a GP cannot be fitted (fewer than two points)."""


@dataclass(frozen=True)
class GroupingPlan:
    groups: list[tuple[int, np.ndarray]]
    L: int

    @property
    def objectives(self) -> list[int]:
        return sorted({j for j, _ in self.groups})


def random_grouping(m: int, d: int, L: int, rng: np.random.Generator) -> GroupingPlan:
    """Shuffle the variables, cut them into chunks of at most ``L``, and give
    each chunk a uniformly random objective."""
    if L < 1:
        raise ValueError(f"group size must be positive, got L={L}")
    perm = rng.permutation(d)
    groups = []
    for start in range(0, d, L):
        j = int(rng.integers(m))
        groups.append((j, np.sort(perm[start : start + L])))
    return GroupingPlan(groups=groups, L=L)


@dataclass(frozen=True)
class UnivariateGP:
    train_in: np.ndarray
    train_out: np.ndarray
    lengthscale: float
    signal_var: float
    noise_var: float
    mean: float
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float = 0.0

    def _cross(self, query: np.ndarray) -> np.ndarray:
        diff = query[:, None] - self.train_in[None, :]
        return self.signal_var * np.exp(-0.5 * (diff / self.lengthscale) ** 2)

    def predict(self, query, noisy: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Predictive mean and variance at ``query`` (scalar or 1-D array).

        With ``noisy`` the observation noise is added to the variance.
        """
        q = np.atleast_1d(np.asarray(query, dtype=float))
        ks = self._cross(q)
        mu = self.mean + ks @ self.alpha
        v = solve_triangular(self.chol, ks.T, lower=True, check_finite=False)
        var = np.maximum(self.signal_var - np.sum(v * v, axis=0), 0.0)
        if noisy:
            var = var + self.noise_var
        return mu, var


def _median_lengthscale(diff: np.ndarray) -> float:
    dists = np.abs(diff[np.triu_indices(len(diff), 1)])
    ell = float(np.median(dists))
    if ell > 0:
        return ell
    positive = dists[dists > 0]
    return float(np.median(positive)) if positive.size else 1.0


def _cholesky(A: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor, adding diagonal jitter only if rounding breaks
    positive definiteness."""
    jitter = 0.0
    scale = float(np.mean(np.diag(A)))
    for _ in range(12):
        try:
            c, _ = cho_factor(A + jitter * np.eye(len(A)), lower=True, check_finite=False)
            return np.tril(c), jitter
        except LinAlgError:
            jitter = scale * 1e-15 if jitter == 0.0 else jitter * 10.0
    raise LinAlgError("kernel matrix is not positive definite even with jitter")


def fit_gp(train_in, train_out, noise_std: float | None = None) -> UnivariateGP:
    """Fit a squared-exponential GP with closed-form hyperparameters.

    Lengthscale is the median pairwise input distance, signal std is the
    std of the targets, noise std is ``0.01 * signal_std + 1e-6`` unless
    ``noise_std`` is given. Targets are centred on their mean.
    """
    x = np.asarray(train_in, dtype=float).reshape(-1)
    y = np.asarray(train_out, dtype=float).reshape(-1)
    if len(x) != len(y):
        raise ValueError("train_in and train_out differ in length")
    if len(x) < 2:
        raise ModelDegenerateError(f"need at least 2 training points, got {len(x)}")
    diff = x[:, None] - x[None, :]
    ell = _median_lengthscale(diff)
    sigma_f = float(np.std(y))
    if sigma_f == 0.0:
        sigma_f = 1.0
    sigma_n = 0.01 * sigma_f + 1e-6 if noise_std is None else float(noise_std)
    if sigma_n <= 0:
        raise ValueError("noise std must be positive")
    mean = float(np.mean(y))
    K = sigma_f**2 * np.exp(-0.5 * (diff / ell) ** 2)
    L, jitter = _cholesky(K + sigma_n**2 * np.eye(len(x)))
    alpha = cho_solve((L, True), y - mean, check_finite=False)
    return UnivariateGP(
        train_in=x,
        train_out=y,
        lengthscale=ell,
        signal_var=sigma_f**2,
        noise_var=sigma_n**2,
        mean=mean,
        chol=L,
        alpha=alpha,
        jitter=jitter,
    )


def gp_predict_sample(gp: UnivariateGP, query, rng: np.random.Generator):
    """One draw from the noisy predictive distribution at ``query``."""
    mu, var = gp.predict(query)
    draw = mu + rng.standard_normal(mu.shape) * np.sqrt(var)
    return float(draw[0]) if np.ndim(query) == 0 else draw


@dataclass(frozen=True)
class SubpopModel:
    plan: GroupingPlan
    gps: dict[tuple[int, int], UnivariateGP]
    objective_ranges: dict[int, tuple[float, float]]


def build_subpop_model(training: Sequence[Solution], plan: GroupingPlan) -> SubpopModel:
    F = np.array([s.f for s in training])
    X = np.array([s.x for s in training])
    gps = {}
    for j, variables in plan.groups:
        for i in variables:
            gps[(j, int(i))] = fit_gp(F[:, j], X[:, i])
    ranges = {j: (float(F[:, j].min()), float(F[:, j].max())) for j in plan.objectives}
    return SubpopModel(plan=plan, gps=gps, objective_ranges=ranges)


def reproduce_subpop(
    training: Sequence[Solution],
    plan: GroupingPlan,
    problem: Problem,
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample ``count`` decision vectors from the inverse models of ``training``.

    For every group a query is drawn uniformly from the training range of
    its objective widened by 10% on each side; each variable of the group
    is then drawn from its GP at that query. Results are clipped to bounds.
    """
    out = np.empty((count, problem.d))
    if count == 0:
        return out
    model = build_subpop_model(training, plan)
    for j, variables in plan.groups:
        lo, hi = model.objective_ranges[j]
        margin = SAMPLE_MARGIN * (hi - lo)
        queries = rng.uniform(lo - margin, hi + margin, size=count)
        for i in variables:
            out[:, i] = gp_predict_sample(model.gps[(j, int(i))], queries, rng)
    return np.clip(out, problem.lower, problem.upper)


def polynomial_mutation(
    x: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    pm: float,
    eta: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Polynomial mutation scaled by the distance to the bound being approached.

    A mutated coordinate moves by ``delta * (x - lower)`` when ``u < 0.5``
    and by ``delta * (upper - x)`` otherwise, so it never leaves the box.
    """
    if not 0.0 <= pm <= 1.0:
        raise ValueError(f"mutation probability must lie in [0, 1], got {pm}")
    if eta <= 0:
        raise ValueError(f"distribution index must be positive, got {eta}")
    x = np.asarray(x, dtype=float)
    lower = np.broadcast_to(np.asarray(lower, dtype=float), x.shape)
    upper = np.broadcast_to(np.asarray(upper, dtype=float), x.shape)
    mutate = rng.random(x.shape) < pm
    u = rng.random(x.shape)
    expo = 1.0 / (eta + 1.0)
    low_side = u < 0.5
    delta = np.where(
        low_side,
        (2.0 * u) ** expo - 1.0,
        1.0 - (2.0 * (1.0 - u)) ** expo,
    )
    step = np.where(low_side, delta * (x - lower), delta * (upper - x))
    y = np.where(mutate, x + step, x)
    return np.clip(y, lower, upper)
