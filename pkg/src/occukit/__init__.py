"""Exact occupancy weights, norms, moments, and inequality sweeps for
multi-subset draws from a finite population."""

from .combinat import binomial, falling_factorial, iter_k_subsets, stirling2
from .core import (
    Params,
    SizeSpec,
    joint_weight,
    membership_counts,
    occupancy_norm,
    pattern_weight,
    power_weight,
    weight_sum_dp,
    weight_sum_naive,
    weight_sum_table,
)
from .errors import BudgetExceededError, DegenerateDenominatorError, OccupancyError
from .inequality import (
    GridSpec,
    InductionAudit,
    InequalityVerdict,
    ProximityClass,
    ReducedCheck,
    SweepSummary,
    audit_induction_step,
    check_inequality,
    classify_sizes,
    factorization_identity_check,
    full_size_reduction,
    grid_search,
    induction_profile,
    induction_ratios,
    minimal_admissible_n,
    near_full_size_reduction,
    summarize_sweep,
)
from .moments import (
    DeltaBoundVerdict,
    MomentReport,
    TailMode,
    delta_ev_bound_check,
    moment_report,
    raw_moment,
    threshold_sizes,
)
from .oracle import (
    DEFAULT_BUDGET,
    ComparisonReport,
    ComparisonRow,
    EmpiricalMoments,
    ExactPmf,
    compare_report,
    element_inclusion_counts,
    exhaustive_outcome_count,
    exhaustive_pmf,
    monte_carlo,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ComparisonReport",
    "ComparisonRow",
    "DEFAULT_BUDGET",
    "DegenerateDenominatorError",
    "DeltaBoundVerdict",
    "EmpiricalMoments",
    "ExactPmf",
    "GridSpec",
    "InductionAudit",
    "InequalityVerdict",
    "MomentReport",
    "OccupancyError",
    "Params",
    "ProximityClass",
    "ReducedCheck",
    "SizeSpec",
    "SweepSummary",
    "TailMode",
    "audit_induction_step",
    "binomial",
    "check_inequality",
    "classify_sizes",
    "compare_report",
    "delta_ev_bound_check",
    "element_inclusion_counts",
    "exhaustive_outcome_count",
    "exhaustive_pmf",
    "factorization_identity_check",
    "falling_factorial",
    "full_size_reduction",
    "grid_search",
    "induction_profile",
    "induction_ratios",
    "iter_k_subsets",
    "joint_weight",
    "membership_counts",
    "minimal_admissible_n",
    "moment_report",
    "monte_carlo",
    "near_full_size_reduction",
    "occupancy_norm",
    "pattern_weight",
    "power_weight",
    "raw_moment",
    "stirling2",
    "summarize_sweep",
    "threshold_sizes",
    "weight_sum_dp",
    "weight_sum_naive",
    "weight_sum_table",
]
