"""Estimate the number of marked items hidden behind a pooled membership oracle.

The oracle answers one bit per query: does this pool contain at least one
marked item? The estimators here return a count within a (1 ± epsilon)
factor of the truth, trading queries for confidence in three regimes:
deterministic, small expected cost, and small worst-case cost.
"""

from .bounds import BOUND_NAMES, BoundQuery, BoundValue, evaluate, log_star
from .doubling import (
    DoublingResult,
    Schedule,
    builtin_schedules,
    first_index_above,
    run_doubling,
    schedule_by_name,
)
from .estimators import (
    EstimateOutcome,
    EstimatorConfig,
    estimate_deterministic,
    estimate_expected,
    estimate_monte_carlo,
    find_defectives,
)
from .harness import (
    ESTIMATOR_NAMES,
    SAMPLER_NAMES,
    ExperimentSpec,
    TrialStatistics,
    compare_with_bounds,
    fit_constants,
    run_experiment,
    sample_defectives,
    statistics_to_csv,
    statistics_to_json,
    wilson_interval,
)
from .oracle import Instance, Oracle, QueryBudgetExceeded, Transcript
from .scale import ExtendedScale

__version__ = "0.1.0"

__all__ = [
    "BOUND_NAMES",
    "BoundQuery",
    "BoundValue",
    "DoublingResult",
    "ESTIMATOR_NAMES",
    "EstimateOutcome",
    "EstimatorConfig",
    "ExperimentSpec",
    "ExtendedScale",
    "Instance",
    "Oracle",
    "QueryBudgetExceeded",
    "SAMPLER_NAMES",
    "Schedule",
    "Transcript",
    "TrialStatistics",
    "builtin_schedules",
    "compare_with_bounds",
    "estimate_deterministic",
    "estimate_expected",
    "estimate_monte_carlo",
    "evaluate",
    "find_defectives",
    "first_index_above",
    "fit_constants",
    "log_star",
    "run_doubling",
    "run_experiment",
    "sample_defectives",
    "schedule_by_name",
    "statistics_to_csv",
    "statistics_to_json",
    "wilson_interval",
]
