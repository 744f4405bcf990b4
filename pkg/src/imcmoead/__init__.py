"""Inverse-modeling constrained MOEA/D with hypervolume benchmarking tools."""

from . import problems  # noqa: F401  registers the built-in suite
from .algorithm import AlgoConfig, GenerationStats, random_search, run
from .core import Problem, Solution, available_problems, get_problem, register_problem
from .metrics import HVResult, hypervolume, wilcoxon_rank_sum
from .problems import ProblemSpec, builtin_suite, reference_front

__all__ = [
    "AlgoConfig",
    "GenerationStats",
    "HVResult",
    "Problem",
    "ProblemSpec",
    "Solution",
    "available_problems",
    "builtin_suite",
    "get_problem",
    "hypervolume",
    "random_search",
    "reference_front",
    "register_problem",
    "run",
    "wilcoxon_rank_sum",
]

__version__ = "0.1.0"
