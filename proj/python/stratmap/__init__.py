"""Strategy-map exploration engine: Python bindings over the C++ core."""

from stratmap._core import (  # noqa: F401
    AbstractState,
    ApplyResult,
    AttributedRewards,
    CreditAssignment,
    EditOp,
    Milestone,
    MilestoneStats,
    RngStream,
    SelectionPolicy,
    StrategyMap,
    compare_policies,
    compute_credits_dag,
    compute_credits_sequential,
    coverage_entropy,
    final_k,
    run_experiment,
    select_next,
    thompson_score,
    thompson_sigma,
    ucb_score,
    update_stats,
)

__all__ = [
    "AbstractState",
    "ApplyResult",
    "AttributedRewards",
    "CreditAssignment",
    "EditOp",
    "Milestone",
    "MilestoneStats",
    "RngStream",
    "SelectionPolicy",
    "StrategyMap",
    "compare_policies",
    "compute_credits_dag",
    "compute_credits_sequential",
    "coverage_entropy",
    "final_k",
    "run_experiment",
    "select_next",
    "thompson_score",
    "thompson_sigma",
    "ucb_score",
    "update_stats",
]

__version__ = "0.1.0"
