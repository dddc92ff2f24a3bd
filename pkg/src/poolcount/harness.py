"""Monte Carlo harness: run estimators over instance grids, summarize, check.

Every trial gets its own random stream derived from
SeedSequence(master_seed, spawn_key=(point_index, trial_index)), a
splittable counter-style keying, so results are bit-identical however the
trials are scheduled across workers. Aggregation always happens over the
merged per-trial records in trial order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bounds import BoundQuery, evaluate, log_star
from .estimators import (
    EstimatorConfig,
    estimate_deterministic,
    estimate_expected,
    estimate_monte_carlo,
)
from .fitted import FITTED
from .oracle import Instance, Oracle, QueryBudgetExceeded

ESTIMATOR_NAMES = ("deterministic", "expected", "monte-carlo")
SAMPLER_NAMES = ("uniform-random", "adversarial-prefix", "singleton-spread")

# Guard against float fuzz when turning the real interval [(1-eps)d, (1+eps)d]
# into its integer points {ceil(.), ..., floor(.)}.
_ROUND_GUARD = 1e-9


@dataclass(frozen=True)
class ExperimentSpec:
    """One harness run: an estimator against a grid of defective counts."""

    estimator: str
    n: int
    d_values: tuple[int, ...]
    config: EstimatorConfig = field(default_factory=EstimatorConfig)
    trials: int = 1000
    master_seed: int = 0
    sampler: str = "uniform-random"
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.estimator not in ESTIMATOR_NAMES:
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.sampler not in SAMPLER_NAMES:
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.trials < 1 or self.jobs < 1 or self.n < 1:
            raise ValueError("trials, jobs and n must be positive")
        object.__setattr__(self, "d_values", tuple(int(d) for d in self.d_values))
        for d in self.d_values:
            if not 0 <= d <= self.n:
                raise ValueError(f"d = {d} outside 0..{self.n}")


@dataclass(frozen=True)
class TrialStatistics:
    """Aggregate over all trials of one (estimator, n, d) point."""

    estimator: str
    n: int
    d: int
    epsilon: float
    delta: float
    trials: int
    successes: int
    success_rate: float
    wilson_low: float
    wilson_high: float
    wrapper_rate: float
    queries_mean: float
    queries_min: int
    queries_max: int
    queries_p50: float
    queries_p90: float
    queries_p99: float
    stage_means: dict[str, float]
    stage_maxes: dict[str, int]
    anomalies: int


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion (z pinned at 1.96)."""
    if trials <= 0:
        return (0.0, 1.0)
    phat = successes / trials
    zz = z * z
    denom = 1.0 + zz / trials
    center = (phat + zz / (2.0 * trials)) / denom
    margin = z * math.sqrt(phat * (1.0 - phat) / trials + zz / (4.0 * trials * trials)) / denom
    return (max(0.0, center - margin), min(1.0, center + margin))


def success_interval(d: int, epsilon: float) -> tuple[int, int]:
    """Integer window of acceptable estimates for true count d."""
    lo = math.ceil((1.0 - epsilon) * d - _ROUND_GUARD)
    hi = math.floor((1.0 + epsilon) * d + _ROUND_GUARD)
    return lo, hi


def query_budget(n: int, d: int) -> int:
    """Per-trial abort threshold; no sound estimator should get near it."""
    return math.ceil(64 * (d + 1) * math.log2(n + 2))


def sample_defectives(kind: str, n: int, d: int, rng: np.random.Generator) -> frozenset[int]:
    """Draw a defective set of size d by the named rule."""
    if not 0 <= d <= n:
        raise ValueError(f"d = {d} outside 0..{n}")
    if kind == "uniform-random":
        return frozenset(int(x) + 1 for x in rng.choice(n, size=d, replace=False))
    if kind == "adversarial-prefix":
        return frozenset(range(1, d + 1))
    if kind == "singleton-spread":
        return frozenset(int(k * n) // d + 1 for k in range(d))
    raise ValueError(f"unknown sampler {kind!r}")


# One trial's outcome, small and picklable for the worker pool:
# (estimate, queries, succeeded, wrapper_fired, stages, anomaly)
_TrialRecord = tuple[int, int, bool, bool, tuple[tuple[str, int], ...], bool]


def _run_trial(spec: ExperimentSpec, point_index: int, d: int, trial: int) -> _TrialRecord:
    seq = np.random.SeedSequence(spec.master_seed, spawn_key=(point_index, trial))
    instance_seq, algorithm_seq = seq.spawn(2)
    instance = Instance(
        spec.n,
        sample_defectives(spec.sampler, spec.n, d, np.random.default_rng(instance_seq)),
    )
    oracle = Oracle(
        instance,
        rng=np.random.default_rng(algorithm_seq),
        max_queries=query_budget(spec.n, d),
    )
    try:
        if spec.estimator == "deterministic":
            outcome = estimate_deterministic(spec.n, spec.config.epsilon, oracle)
        elif spec.estimator == "expected":
            outcome = estimate_expected(spec.n, spec.config, oracle)
        else:
            outcome = estimate_monte_carlo(spec.n, spec.config, oracle)
    except QueryBudgetExceeded:
        return (-1, oracle.query_count, False, False, (), True)
    if outcome.queries_asked != oracle.query_count:
        raise AssertionError(
            f"estimator reported {outcome.queries_asked} queries, "
            f"oracle counted {oracle.query_count}"
        )
    lo, hi = success_interval(d, spec.config.epsilon)
    succeeded = lo <= outcome.estimate <= hi
    return (
        outcome.estimate,
        outcome.queries_asked,
        succeeded,
        outcome.wrapper_fired,
        tuple(outcome.stage_breakdown),
        False,
    )


def _run_chunk(args: tuple[dict, int, int, int, int]) -> list[_TrialRecord]:
    spec_state, point_index, d, start, stop = args
    spec = _spec_from_state(spec_state)
    return [_run_trial(spec, point_index, d, t) for t in range(start, stop)]


def _spec_state(spec: ExperimentSpec) -> dict:
    state = asdict(spec)
    state["config"] = asdict(spec.config)
    return state


def _spec_from_state(state: dict) -> ExperimentSpec:
    state = dict(state)
    state["config"] = EstimatorConfig(**state["config"])
    return ExperimentSpec(**state)


def _aggregate(spec: ExperimentSpec, d: int, records: list[_TrialRecord]) -> TrialStatistics:
    clean = [r for r in records if not r[5]]
    anomalies = len(records) - len(clean)
    queries = np.array([r[1] for r in records], dtype=np.int64)
    successes = sum(1 for r in records if r[2])
    wrapper = sum(1 for r in records if r[3])
    stage_totals: dict[str, float] = {}
    stage_maxes: dict[str, int] = {}
    for r in clean:
        for name, q in r[4]:
            stage_totals[name] = stage_totals.get(name, 0.0) + q
            if q > stage_maxes.get(name, -1):
                stage_maxes[name] = q
    stage_means = {
        name: total / len(clean) for name, total in sorted(stage_totals.items())
    } if clean else {}
    stage_maxes = dict(sorted(stage_maxes.items()))
    low, high = wilson_interval(successes, len(records))
    return TrialStatistics(
        estimator=spec.estimator,
        n=spec.n,
        d=d,
        epsilon=spec.config.epsilon,
        delta=spec.config.delta,
        trials=len(records),
        successes=successes,
        success_rate=successes / len(records),
        wilson_low=low,
        wilson_high=high,
        wrapper_rate=wrapper / len(records),
        queries_mean=float(queries.mean()),
        queries_min=int(queries.min()),
        queries_max=int(queries.max()),
        queries_p50=float(np.percentile(queries, 50)),
        queries_p90=float(np.percentile(queries, 90)),
        queries_p99=float(np.percentile(queries, 99)),
        stage_means=stage_means,
        stage_maxes=stage_maxes,
        anomalies=anomalies,
    )


def run_experiment(spec: ExperimentSpec) -> list[TrialStatistics]:
    """Run every (d, trial) cell of the experiment and aggregate per point.

    Trial records are merged in trial order before aggregation, so the
    statistics do not depend on spec.jobs; two runs with the same
    master_seed produce identical output whatever the worker count.
    """
    out: list[TrialStatistics] = []
    chunk = max(1, math.ceil(spec.trials / max(spec.jobs, 1)))
    chunk_args = []
    for point_index, d in enumerate(spec.d_values):
        for start in range(0, spec.trials, chunk):
            chunk_args.append(
                (_spec_state(spec), point_index, d, start, min(start + chunk, spec.trials))
            )
    if spec.jobs == 1:
        chunk_results = [_run_chunk(a) for a in chunk_args]
    else:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            chunk_results = list(pool.map(_run_chunk, chunk_args))
    per_point = len(chunk_results) // len(spec.d_values)
    for point_index, d in enumerate(spec.d_values):
        records: list[_TrialRecord] = []
        for part in chunk_results[point_index * per_point : (point_index + 1) * per_point]:
            records.extend(part)
        out.append(_aggregate(spec, d, records))
    return out


# ---------------------------------------------------------------------------
# Output formats
# ---------------------------------------------------------------------------

_CSV_COLUMNS = [
    "estimator", "n", "d", "epsilon", "delta", "trials", "successes",
    "success_rate", "wilson_low", "wilson_high", "wrapper_rate",
    "queries_mean", "queries_min", "queries_max", "queries_p50",
    "queries_p90", "queries_p99", "stage_means", "stage_maxes", "anomalies",
]


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, dict):
        return ";".join(f"{k}={v!r}" for k, v in sorted(value.items()))
    return str(value)


def statistics_to_csv(stats: list[TrialStatistics]) -> str:
    """Render per-point statistics as CSV, byte-stable for identical inputs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for stat in stats:
        row = asdict(stat)
        writer.writerow([_csv_cell(row[c]) for c in _CSV_COLUMNS])
    return buf.getvalue()


def statistics_to_json(spec: ExperimentSpec, stats: list[TrialStatistics],
                       bounds_report: list[dict] | None = None) -> str:
    """JSON summary: the resolved spec, per-point statistics, bound checks."""
    payload = {
        "spec": _spec_state(spec),
        "results": [asdict(s) for s in stats],
    }
    if bounds_report is not None:
        payload["bounds"] = bounds_report
    return json.dumps(payload, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Bound comparison and constant fitting
# ---------------------------------------------------------------------------


def _hard_bound(stat: TrialStatistics, constants: dict[str, float]) -> tuple[str, float, float]:
    """(metric name, empirical value, bound value) for the hard check."""
    if stat.estimator == "deterministic":
        base = evaluate(BoundQuery("det_upper", n=stat.n, d=stat.d, epsilon=stat.epsilon)).value
        bound = base + constants["det_c"] * stat.d + constants["det_c0"]
        return ("queries_max", stat.queries_max, bound)
    if stat.estimator == "expected":
        fitted = {"c1": constants["expected_c1"], "c2": constants["expected_c2"]}
        bound = evaluate(
            BoundQuery("expected_upper", n=stat.n, d=stat.d,
                       epsilon=stat.epsilon, delta=stat.delta),
            constants=fitted,
        ).value
        return ("queries_mean", stat.queries_mean, bound)
    fitted = {"c1": constants["mc_c1"], "c2": constants["mc_c2"]}
    bound = evaluate(
        BoundQuery("mc_upper", n=stat.n, d=stat.d, epsilon=stat.epsilon, delta=stat.delta),
        constants=fitted,
    ).value
    return ("queries_max", stat.queries_max, bound)


_INFORMATIONAL = {
    "deterministic": "det_lower",
    "expected": "expected_lower",
    "monte-carlo": "mc_lower_loglog",
}


def compare_with_bounds(
    stats: list[TrialStatistics], constants: dict[str, float] | None = None
) -> list[dict]:
    """Check each point's empirical cost against its closed-form bound.

    Returns one row per check: hard rows carry passed True/False, the
    matching lower bounds are attached as informational rows (never fail).
    """
    constants = dict(FITTED, **(constants or {}))
    report: list[dict] = []
    for stat in stats:
        metric, empirical, bound = _hard_bound(stat, constants)
        report.append({
            "estimator": stat.estimator, "n": stat.n, "d": stat.d,
            "metric": metric, "empirical": empirical, "bound": bound,
            "kind": "hard", "passed": bool(empirical <= bound),
        })
        lower = evaluate(BoundQuery(
            _INFORMATIONAL[stat.estimator], n=stat.n, d=stat.d,
            epsilon=stat.epsilon, delta=stat.delta,
        ))
        report.append({
            "estimator": stat.estimator, "n": stat.n, "d": stat.d,
            "metric": "lower-bound:" + _INFORMATIONAL[stat.estimator],
            "empirical": stat.queries_mean, "bound": lower.value,
            "kind": "informational", "passed": None,
        })
        if stat.anomalies:
            report.append({
                "estimator": stat.estimator, "n": stat.n, "d": stat.d,
                "metric": "anomalies", "empirical": stat.anomalies, "bound": 0,
                "kind": "hard", "passed": False,
            })
    return report


def _fit_linear_in_d(points: list[tuple[int, float]], intercept: float) -> float:
    """Smallest slope c with excess <= c*d + intercept at every point."""
    return max((excess - intercept) / d for d, excess in points if d >= 1)


def fit_constants(master_seed: int = 20260821) -> dict[str, float]:
    """Re-run the regression sweeps and fit minimal bound constants.

    Returns the same keys as FITTED, without headroom; freezing adds it by
    hand. Used by the `fixtures` CLI subcommand to check for drift.
    """
    out: dict[str, float] = {}

    # find_defectives over items at n = 256, all pairs is the acceptance
    # sweep; for fitting, d in {1, 2} exhaustive plus random larger sets.
    from .estimators import find_defectives  # local import to avoid cycle at load

    n = 256
    points: list[tuple[int, float]] = []
    rng = np.random.default_rng(master_seed)
    for d in (1, 2, 8, 32):
        worst = 0
        for _ in range(400):
            inst = Instance(n, sample_defectives("uniform-random", n, d, rng))
            oracle = Oracle(inst)
            find_defectives(n, oracle)
            worst = max(worst, oracle.query_count)
        prefix = Instance(n, frozenset(range(1, d + 1)))
        oracle = Oracle(prefix)
        find_defectives(n, oracle)
        worst = max(worst, oracle.query_count)
        points.append((d, worst - d * math.log2(n / d)))
    out["find_c"] = _fit_linear_in_d(points, 0.0)

    # deterministic estimator regression sweep: n = 1024, eps = 0.5.
    spec = ExperimentSpec(
        estimator="deterministic", n=1024, d_values=(1, 10, 50),
        config=EstimatorConfig(epsilon=0.5), trials=500,
        master_seed=master_seed, sampler="uniform-random",
    )
    det_points = []
    for stat in run_experiment(spec):
        base = evaluate(BoundQuery("det_upper", n=stat.n, d=stat.d, epsilon=stat.epsilon)).value
        det_points.append((stat.d, stat.queries_max - base))
    out["det_c0"] = 3.0
    out["det_c"] = _fit_linear_in_d(det_points, out["det_c0"])

    # randomized estimators at the acceptance grid (reduced trial count).
    for name, keys in (("expected", ("expected_c1", "expected_c2")),
                       ("monte-carlo", ("mc_c1", "mc_c2"))):
        spec = ExperimentSpec(
            estimator=name, n=2**20, d_values=(10, 100, 1000),
            config=EstimatorConfig(epsilon=0.5, delta=0.1), trials=2000,
            master_seed=master_seed,
        )
        c1 = 0.0
        worst_c2 = 0.0
        for stat in run_experiment(spec):
            ll = math.log2(max(math.log2(max(stat.d, 2)), 2))
            if name == "expected":
                lead = (1.0 - stat.delta + stat.delta**2) * ll
                empirical = stat.queries_mean
            else:
                lead = log_star(stat.n) + ll
                empirical = stat.queries_max
            tail = (1.0 / stat.epsilon**2) * math.log2(1.0 / stat.delta)
            worst_c2 = max(worst_c2, (empirical - lead - c1 * math.sqrt(ll)) / tail)
        out[keys[0]] = c1
        out[keys[1]] = worst_c2
    return out
