"""IM-C-MOEA/D: inverse-modeling constrained MOEA/D.

One generation partitions the population with k-means in objective space,
fits GP inverse models per cluster on a tournament-selected training set,
samples offspring through the models, mutates them, and then lets every
offspring compete for the neighborhood of its best-matching weight vector
under feasibility-first replacement rules.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cluster import kmeans_objective_space, tournament_select
from .core import (
    EQ_TOL,
    EvaluationCounter,
    Problem,
    Solution,
    evaluate_population,
    nondominated_mask,
    update_reference_point,
)
from .invmodel import polynomial_mutation, random_grouping, reproduce_subpop
from .scalarize import tchebycheff
from .weights import WeightLattice

logger = logging.getLogger(__name__)

SCENARIOS = "scenarios"
CONJUNCTIVE = "conjunctive"


@dataclass
class AlgoConfig:
    """Settings for one IM-C-MOEA/D run.

    ``L``, ``pm`` and ``T`` default to problem-dependent values when left
    as ``None``: group size 2 for two-variable problems and 3 otherwise,
    mutation probability ``1/d``, and neighborhood size ``round(0.1 N)``
    (at least 2).
    """

    N: int = 80
    max_fe: int = 20000
    K: int = 10
    L: int | None = None
    T: int | None = None
    eq_tol: float = EQ_TOL
    pm: float | None = None
    eta: float = 20.0
    seed: int = 0
    replacement: str = SCENARIOS
    kmeans_iters: int = 50
    snapshot_dir: str | None = None

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError(f"population size must be positive, got {self.N}")
        if self.K < 1:
            raise ValueError(f"cluster count must be positive, got {self.K}")
        if self.replacement not in (SCENARIOS, CONJUNCTIVE):
            raise ValueError(f"unknown replacement rule {self.replacement!r}")

    def group_size(self, d: int) -> int:
        if self.L is not None:
            return self.L
        return 2 if d == 2 else 3

    def mutation_probability(self, d: int) -> float:
        return 1.0 / d if self.pm is None else self.pm


@dataclass
class GenerationStats:
    gen: int
    fe_used: int
    feasible_count: int
    best_cv: float
    mean_cv: float
    replacements: int = 0
    z: list[float] = field(default_factory=list)
    hv: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def offspring_survives(
    o_feasible: bool, o_cv: float, o_tch: float, x_feasible: bool, x_cv: float, x_tch: float
) -> bool:
    """Feasibility-first decision on precomputed violation and TCH values."""
    if o_feasible and x_feasible:
        return o_tch < x_tch
    if o_feasible != x_feasible:
        return o_feasible
    return o_cv < x_cv


def conjunctive_survives(
    o_feasible: bool, o_cv: float, o_tch: float, x_feasible: bool, x_cv: float, x_tch: float
) -> bool:
    """Offspring must be no worse in both TCH value and violation."""
    return o_tch <= x_tch and o_cv <= x_cv


_RULES = {SCENARIOS: offspring_survives, CONJUNCTIVE: conjunctive_survives}


def replace_with_constraints(
    offspring: Solution, incumbent: Solution, lam: np.ndarray, z: np.ndarray
) -> Solution:
    """Survivor of offspring vs. incumbent under feasibility-first rules.

    Feasible beats infeasible; two infeasible solutions compare by
    violation; two feasible ones by Tchebycheff value. Ties keep the
    incumbent.
    """
    won = offspring_survives(
        offspring.feasible,
        offspring.cv,
        tchebycheff(offspring.f, lam, z),
        incumbent.feasible,
        incumbent.cv,
        tchebycheff(incumbent.f, lam, z),
    )
    return offspring if won else incumbent


def replace_conjunctive(
    offspring: Solution, incumbent: Solution, lam: np.ndarray, z: np.ndarray
) -> Solution:
    """Replace only when the offspring is no worse in both TCH and CV."""
    won = conjunctive_survives(
        offspring.feasible,
        offspring.cv,
        tchebycheff(offspring.f, lam, z),
        incumbent.feasible,
        incumbent.cv,
        tchebycheff(incumbent.f, lam, z),
    )
    return offspring if won else incumbent


def global_replacement_pass(
    offspring: Solution,
    population: list[Solution],
    lattice: WeightLattice,
    z: np.ndarray,
    rule: str = SCENARIOS,
) -> int:
    """Offer ``offspring`` to the neighborhood of its best weight vector.

    ``population`` is updated in place; returns the number of slots taken.
    """
    survives = _RULES[rule]
    # offspring TCH against every weight; the argmin is the best weight index
    o_all = tchebycheff(offspring.f, lattice.weights, z)
    i = int(np.argmin(o_all))
    neighbors = lattice.neighborhoods[i]
    o_tch = o_all[neighbors]
    x_tch = tchebycheff(
        np.array([population[j].f for j in neighbors]), lattice.weights[neighbors], z
    )
    replaced = 0
    for k, j in enumerate(neighbors):
        x = population[j]
        if survives(offspring.feasible, offspring.cv, o_tch[k], x.feasible, x.cv, x_tch[k]):
            population[j] = offspring
            replaced += 1
    return replaced


def _stats(gen: int, population: Sequence[Solution], fe: int, z, replaced: int):
    cv = np.array([s.cv for s in population])
    return GenerationStats(
        gen=gen,
        fe_used=fe,
        feasible_count=int(np.sum(cv == 0.0)),
        best_cv=float(cv.min()),
        mean_cv=float(cv.mean()),
        replacements=replaced,
        z=[float(v) for v in z],
    )


def _snapshot(directory: str, gen: int, population: Sequence[Solution]) -> None:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / f"gen_{gen:05d}.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        d, m = len(population[0].x), len(population[0].f)
        writer.writerow([f"x{i}" for i in range(d)] + [f"f{j}" for j in range(m)] + ["cv"])
        for s in population:
            writer.writerow([repr(float(v)) for v in (*s.x, *s.f, s.cv)])


def _offspring_vectors(
    problem: Problem,
    config: AlgoConfig,
    population: Sequence[Solution],
    rng: np.random.Generator,
    streams: Sequence[np.random.Generator],
) -> np.ndarray:
    """Decision vectors for one generation, in cluster order."""
    partition = kmeans_objective_space(population, config.K, rng, config.kmeans_iters)
    L = config.group_size(problem.d)
    pm = config.mutation_probability(problem.d)
    blocks = []
    for k in range(partition.K):
        members = [population[i] for i in partition.members(k)]
        crng = streams[k]
        if len(members) >= 2:
            training = tournament_select(members, len(members), crng)
            plan = random_grouping(problem.m, problem.d, L, crng)
            X = reproduce_subpop(training, plan, problem, len(members), crng)
        else:
            X = np.array([s.x for s in members])
        blocks.append(polynomial_mutation(X, problem.lower, problem.upper, pm, config.eta, crng))
    return np.concatenate(blocks)


def run(
    problem: Problem,
    config: AlgoConfig,
    on_generation: Callable[[GenerationStats, list[Solution]], None] | None = None,
) -> tuple[list[Solution], list[GenerationStats]]:
    """Run IM-C-MOEA/D until the evaluation budget is spent.

    Returns the final population (slot ``j`` belongs to weight ``j``) and
    one stats entry per generation, the initial population being gen 0.
    """
    if config.max_fe < config.N:
        raise ValueError(
            f"budget of {config.max_fe} evaluations cannot cover a population of {config.N}"
        )
    seeds = np.random.SeedSequence(config.seed)
    rng = np.random.default_rng(seeds.spawn(1)[0])
    counter = EvaluationCounter()

    X0 = problem.lower + rng.random((config.N, problem.d)) * (problem.upper - problem.lower)
    population = evaluate_population(problem, X0, config.eq_tol, counter)
    lattice = WeightLattice.for_population(problem.m, config.N, config.T)
    z = np.min([s.f for s in population], axis=0)

    history = [_stats(0, population, counter.count, z, 0)]
    if on_generation:
        on_generation(history[-1], population)
    if config.snapshot_dir:
        _snapshot(config.snapshot_dir, 0, population)

    gen = 0
    while counter.count < config.max_fe:
        gen += 1
        streams = [np.random.default_rng(s) for s in seeds.spawn(config.K)]
        X = _offspring_vectors(problem, config, population, rng, streams)
        X = X[: config.max_fe - counter.count]
        offspring = evaluate_population(problem, X, config.eq_tol, counter)
        z = update_reference_point(z, [o.f for o in offspring])
        replaced = 0
        for o in offspring:
            replaced += global_replacement_pass(o, population, lattice, z, config.replacement)
        history.append(_stats(gen, population, counter.count, z, replaced))
        if on_generation:
            on_generation(history[-1], population)
        if config.snapshot_dir:
            _snapshot(config.snapshot_dir, gen, population)
        logger.debug(
            "gen %d fe=%d feasible=%d", gen, counter.count, history[-1].feasible_count
        )
    return population, history


def random_search(
    problem: Problem, config: AlgoConfig
) -> tuple[list[Solution], list[GenerationStats]]:
    """Baseline: uniform sampling in batches of N under the same budget.

    Keeps at most N solutions: the feasible nondominated set first (thinned
    evenly along its sorted order when larger than N), then infeasible
    solutions by increasing violation.
    """
    if config.max_fe < config.N:
        raise ValueError(
            f"budget of {config.max_fe} evaluations cannot cover a population of {config.N}"
        )
    rng = np.random.default_rng(config.seed)
    counter = EvaluationCounter()
    archive: list[Solution] = []
    history = []
    gen = 0
    while counter.count < config.max_fe:
        n = min(config.N, config.max_fe - counter.count)
        X = problem.lower + rng.random((n, problem.d)) * (problem.upper - problem.lower)
        archive.extend(evaluate_population(problem, X, config.eq_tol, counter))
        feasible = [s for s in archive if s.feasible]
        if feasible:
            F = np.array([s.f for s in feasible])
            keep = np.flatnonzero(nondominated_mask(F))
            keep = keep[np.lexsort(F[keep].T[::-1])]
            if len(keep) > config.N:
                keep = keep[np.round(np.linspace(0, len(keep) - 1, config.N)).astype(int)]
            feasible = [feasible[i] for i in keep]
        infeasible = sorted((s for s in archive if not s.feasible), key=lambda s: s.cv)
        archive = (feasible + infeasible)[: config.N]
        z = np.min([s.f for s in archive], axis=0)
        history.append(_stats(gen, archive, counter.count, z, 0))
        gen += 1
    return archive, history
