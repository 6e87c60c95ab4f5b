"""Exact and asymptotic analysis of multi-base representations of integers."""

from .errors import (
    DomainError,
    MultibaseError,
    NonCoprimeBases,
    NumericError,
    OutOfMemory,
    ResourceLimit,
)
from .exact import (
    build_count_table,
    build_moment_tables,
    count_brute_force,
    count_via_power_partition,
    exact_distribution,
)
from .model import BaseSystem, Representation, Statistic, validate_base_system
from .saddle import GFKind, estimate_count, estimate_moments, evaluate_f, solve_saddle
from .sampling import build_sampler, normality_report, sample
from .smooth import cardinality_estimate, count_upto, elements_upto, generate_upto
from .tails import sigma_sum, tail_ratio, verify_tail_bounds

__version__ = "0.1.0"

__all__ = [
    "BaseSystem", "DomainError", "GFKind", "MultibaseError", "NonCoprimeBases",
    "NumericError", "OutOfMemory", "Representation", "ResourceLimit", "Statistic",
    "build_count_table", "build_moment_tables", "build_sampler", "cardinality_estimate",
    "count_brute_force", "count_upto", "count_via_power_partition", "elements_upto",
    "estimate_count", "estimate_moments", "evaluate_f", "exact_distribution",
    "generate_upto", "normality_report", "sample", "sigma_sum", "solve_saddle",
    "tail_ratio", "validate_base_system", "verify_tail_bounds",
]
