"""Estimators for the number of defective items.

Three tradeoffs of the same question "how many defectives are there,
up to a factor 1 +- epsilon":

* estimate_deterministic: zero failure probability, query count scaling
  with d * log((1-eps)n / d). Partitions the universe into groups small
  enough that distinct defectives rarely share one, then finds every
  defective group exactly.
* estimate_expected: tiny expected query count (iterated-log in d), at the
  price of a deliberate delta - delta**c chance of answering 0 immediately;
  the remaining runs use a doubling search plus three refinement stages.
* estimate_monte_carlo: worst-case bounded queries. A cascade of four
  capped doubling searches squeezes the overshoot risk step by step, then
  the same refinement stages finish.

find_defectives is the exact-identification workhorse the deterministic
estimator runs on groups; it is also useful on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import log_star
from .doubling import first_index_above, run_doubling, schedule_by_name
from .oracle import Oracle
from .scale import ExtendedScale

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs shared by the randomized estimators.

    Args:
        epsilon: target relative accuracy, in (0, 1).
        delta: failure probability budget, in (0, 1).
        wrapper_exponent: c > 1; the expected-query estimator answers 0
            outright with probability delta - delta**c and otherwise runs
            its stages at confidence delta**c.
        grid_width_factor: half-width multiplier for the stage-3 refinement
            grid, in units of log2(1/stage confidence).
        sample_multiplier: K in the stage-4 sample size
            ceil(K * (1/eps^2) * ln(1/stage confidence)); the default gives
            comfortable concentration whenever stage 3 lands within a
            factor 2 of d.
        stage1_schedule: name of the doubling schedule the expected-query
            estimator opens with.
    """

    epsilon: float = 0.5
    delta: float = 0.1
    wrapper_exponent: float = 2.0
    grid_width_factor: float = 2.0
    sample_multiplier: float = 48.0
    stage1_schedule: str = "double-exp-sq"

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.wrapper_exponent <= 1.0:
            raise ValueError("wrapper_exponent must exceed 1")
        if self.grid_width_factor <= 0.0 or self.sample_multiplier <= 0.0:
            raise ValueError("grid_width_factor and sample_multiplier must be positive")


@dataclass
class EstimateOutcome:
    """One estimator run: the estimate, query cost, and per-stage split."""

    estimate: int
    queries_asked: int
    stage_breakdown: list[tuple[str, int]] = field(default_factory=list)
    wrapper_fired: bool = False

    def __post_init__(self) -> None:
        total = sum(q for _, q in self.stage_breakdown)
        if total != self.queries_asked:
            raise ValueError(
                f"stage breakdown sums to {total}, not queries_asked={self.queries_asked}"
            )


# ---------------------------------------------------------------------------
# Exact identification
# ---------------------------------------------------------------------------


def find_defectives(n: int, oracle) -> set[int]:
    """Identify every defective item exactly.

    Repeatedly queries the whole remaining universe; while it answers 1,
    scans prefix blocks sized near remaining/(found+1), doubling the block
    on consecutive clean answers, and bisects the first positive block down
    to a single defective. Clean blocks and the bisection's cleared left
    halves leave the remaining set for good, so the count comes out near
    d * log2(n/d) plus a small per-defective overhead.

    Args:
        n: universe size (items are 1..n).
        oracle: anything with answer_subset(array-of-items).

    Returns:
        The defective set. Exact, never probabilistic: every item is either
        inside some 0-answer query or isolated by a positive bisection.
    """
    if n < 1:
        raise ValueError(f"universe size must be >= 1, got {n}")
    remaining = np.arange(1, n + 1, dtype=np.int64)
    found: set[int] = set()
    while remaining.size:
        if oracle.answer_subset(remaining) == 0:
            break
        # One more defective is in `remaining` for sure; hunt it down.
        guess = len(found) + 1
        ratio = remaining.size // guess  # aim blocks near remaining/(found+1)
        size = 1 << (ratio.bit_length() - 1) if ratio >= 1 else 1
        while True:
            size = min(size, remaining.size)
            if size == remaining.size:
                break  # block is everything left, positivity already known
            if oracle.answer_subset(remaining[:size]) == 1:
                break
            remaining = remaining[size:]  # certified clean
            size *= 2
        lo, hi = 0, size
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if oracle.answer_subset(remaining[lo:mid]) == 1:
                hi = mid
            else:
                lo = mid  # left half clean, defective sits in the right half
        found.add(int(remaining[lo]))
        # Everything before lo was certified clean during bisection, and lo
        # itself is the found defective; unknown right parts stay.
        remaining = remaining[lo + 1 :]
    return found


class GroupOracle:
    """Presents a fixed-size contiguous-group partition as its own universe.

    Group g of size s covers items (g-1)s+1 .. min(gs, n); a "subset" query
    against this oracle is the union-of-groups query against the parent,
    charged and recorded there.
    """

    def __init__(self, parent: Oracle, group_size: int) -> None:
        self.parent = parent
        self.group_size = group_size
        self.n_groups = -(-parent.instance.n // group_size)

    def answer_subset(self, group_ids) -> int:
        return self.parent.answer_group_union(group_ids, self.group_size)


# ---------------------------------------------------------------------------
# Deterministic estimator
# ---------------------------------------------------------------------------


def estimate_deterministic(n: int, epsilon: float, oracle: Oracle) -> EstimateOutcome:
    """Estimate the defective count with zero failure probability.

    The universe is cut into groups of uniform size s = floor(1/(1-eps))
    (final group possibly smaller) and every defective group is identified
    exactly. d defectives occupy at most d groups and at least ceil(d/s)
    >= ceil((1-eps)d) groups, so the group count D always satisfies
    (1-eps)d <= D <= d, whatever the instance.

    Args:
        n: universe size.
        epsilon: accuracy target in [0, 1) with (1-eps)*n >= 1.
        oracle: the item-level oracle; every group query is charged to it.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
    if (1.0 - epsilon) * n < 1.0:
        raise ValueError(f"epsilon {epsilon} leaves no groups for n = {n}")
    size = max(1, int(1.0 / (1.0 - epsilon)))
    start = oracle.query_count
    if size == 1:
        groups = find_defectives(n, oracle)
    else:
        grouped = GroupOracle(oracle, size)
        groups = find_defectives(grouped.n_groups, grouped)
    queries = oracle.query_count - start
    return EstimateOutcome(len(groups), queries, [("group-find", queries)])


# ---------------------------------------------------------------------------
# Refinement stages shared by the randomized estimators
# ---------------------------------------------------------------------------


def _odd(k: int) -> int:
    return k if k % 2 == 1 else k + 1


def _majority_d_at_least(width: ExtendedScale, votes: int, oracle: Oracle) -> bool:
    """Majority-vote the comparison d >= width with `votes` pooled queries.

    A pool at width Delta answers 1 with probability 1 - 2**(-d/Delta),
    which crosses 1/2 exactly at Delta = d; a strict majority of 1s votes
    "d is at least this wide". votes must be odd so there are no ties.
    """
    answers = oracle.answer_bernoulli_batch(width.inclusion_probability(), votes)
    return int(answers.sum()) * 2 > votes


def _exponent_search(
    n: int, d1: ExtendedScale, confidence: float, oracle: Oracle
) -> ExtendedScale:
    """Binary-search log2(d) over the integer exponents 0..M.

    M is log2 of the stage-1 estimate, never more than log2(n) since d <= n
    (this also keeps M finite when stage 1 stopped on a saturated width).
    Each probe majority-votes d >= 2**m; errors at exponents far from
    log2(d) need wildly improbable vote runs, and errors near it are
    harmless because the output contract is only polynomial-in-1/confidence
    tight.
    """
    m_cap = math.log2(n)
    m_top = int(math.ceil(min(d1.log2_value, m_cap))) if not d1.saturated else int(math.ceil(m_cap))
    m_top = max(m_top, 1)
    votes = _odd(math.ceil(math.log2(max(m_top, 2) / confidence)))
    lo, hi = 0, m_top
    while lo < hi:
        mid = (lo + hi) // 2
        if _majority_d_at_least(ExtendedScale(float(mid)), votes, oracle):
            lo = mid + 1
        else:
            hi = mid
    return ExtendedScale(float(lo))


def _grid_refine(
    d2: ExtendedScale, confidence: float, width_factor: float, oracle: Oracle
) -> ExtendedScale:
    """Narrow the exponent estimate to a constant-factor estimate of d.

    Searches the symmetric grid {d2 * 2**j : j in -J..J} with
    J = ceil(width_factor * log2(1/confidence)), wide enough to cover the
    stage-2 contract in both directions, again by majority votes.
    """
    half_width = math.ceil(width_factor * math.log2(1.0 / confidence))
    votes = _odd(math.ceil(math.log2((2 * half_width + 1) / confidence)))
    lo, hi = -half_width, half_width
    while lo < hi:
        mid = (lo + hi) // 2
        width = ExtendedScale(max(d2.log2_value + mid, 0.0))
        if _majority_d_at_least(width, votes, oracle):
            lo = mid + 1
        else:
            hi = mid
    return ExtendedScale(max(d2.log2_value + lo, 0.0))


def _invert_count(
    d_hat: ExtendedScale,
    epsilon: float,
    confidence: float,
    sample_multiplier: float,
    oracle: Oracle,
) -> int:
    """Final estimate by inverting the negative-answer rate.

    Asks m = ceil(K * (1/eps^2) * ln(1/confidence)) pools at width
    Delta = d_hat/ln2, where the 0-answer probability 2**(-d/Delta) is
    maximally informative, and solves the observed 0-fraction back for d.
    An all-positive sample is clamped at 1/(2m) before taking the log.
    """
    m = max(1, math.ceil(sample_multiplier * math.log(1.0 / confidence) / epsilon**2))
    width = d_hat.scaled_by(1.0 / _LN2)
    answers = oracle.answer_bernoulli_batch(width.inclusion_probability(), m)
    zero_fraction = 1.0 - int(answers.sum()) / m
    if zero_fraction >= 1.0:
        return 0
    # The cap matters only when d_hat is absurdly large, which already
    # means an earlier stage blew its failure budget; keep the arithmetic
    # finite rather than meaningful there.
    width_f = 2.0 ** min(width.log2_value, 512.0)
    return int(round(-width_f * math.log2(max(zero_fraction, 1.0 / (2.0 * m)))))


def _refinement_stages(
    n: int,
    d1: ExtendedScale,
    confidence: float,
    config: EstimatorConfig,
    oracle: Oracle,
) -> tuple[int, list[tuple[str, int]]]:
    """Stages 2-4: exponent search, grid refinement, rate inversion."""
    marks = [oracle.query_count]
    d2 = _exponent_search(n, d1, confidence, oracle)
    marks.append(oracle.query_count)
    d_hat = _grid_refine(d2, confidence, config.grid_width_factor, oracle)
    marks.append(oracle.query_count)
    estimate = _invert_count(d_hat, config.epsilon, confidence, config.sample_multiplier, oracle)
    marks.append(oracle.query_count)
    breakdown = [
        ("exponent-search", marks[1] - marks[0]),
        ("grid-refine", marks[2] - marks[1]),
        ("rate-inversion", marks[3] - marks[2]),
    ]
    return estimate, breakdown


# ---------------------------------------------------------------------------
# Expected-query estimator
# ---------------------------------------------------------------------------


def estimate_expected(n: int, config: EstimatorConfig, oracle: Oracle) -> EstimateOutcome:
    """Estimate with tiny expected query count.

    With probability delta - delta**c the answer is 0 immediately and no
    query is spent; otherwise a doubling search at confidence delta**c / 5
    and the three refinement stages (same confidence each) produce the
    estimate. The immediate-0 branch is what pushes the expected count down
    to (1 - delta + delta**c) times the working-branch cost.
    """
    delta, c = config.delta, config.wrapper_exponent
    if oracle.rng.random() < delta - delta**c:
        return EstimateOutcome(0, 0, [("wrapper-zero", 0)], wrapper_fired=True)
    stage_confidence = delta**c / 5.0
    start = oracle.query_count
    result = run_doubling(schedule_by_name(config.stage1_schedule), stage_confidence, oracle)
    stage1 = oracle.query_count - start
    estimate, tail = _refinement_stages(n, result.estimate, stage_confidence, config, oracle)
    breakdown = [("stop-rule", stage1)] + tail
    return EstimateOutcome(estimate, oracle.query_count - start, breakdown)


# ---------------------------------------------------------------------------
# Monte Carlo estimator
# ---------------------------------------------------------------------------

_CASCADE = ("quad-exp", "triple-exp", "double-exp-sq")


def estimate_monte_carlo(n: int, config: EstimatorConfig, oracle: Oracle) -> EstimateOutcome:
    """Estimate with a hard worst-case query bound.

    Four capped doubling searches run in sequence: a tower-schedule walk
    capped at log_star(n) (the universe size bounds d a priori), then
    quad-exp, triple-exp, and double-exp-sq walks, each capped at the first
    step exceeding the previous stage's estimate. Every cap is a hard stop,
    so the query count is bounded whatever the coins do, and a stage that
    was cut short merely hands the next stage a width it will overshoot
    enormously, keeping the cascade's final estimate an upper bound on d
    with high probability. The refinement stages then finish as usual, all
    at confidence delta/5.
    """
    stage_confidence = config.delta / 5.0
    start = oracle.query_count
    breakdown: list[tuple[str, int]] = []
    result = run_doubling(
        schedule_by_name("tower"), stage_confidence, oracle, cap=log_star(n)
    )
    breakdown.append(("tower", oracle.query_count - start))
    upper = result.estimate
    for name in _CASCADE:
        schedule = schedule_by_name(name)
        cap = first_index_above(schedule, upper)
        mark = oracle.query_count
        result = run_doubling(schedule, stage_confidence, oracle, cap=cap)
        breakdown.append((name, oracle.query_count - mark))
        upper = result.estimate
    estimate, tail = _refinement_stages(n, upper, stage_confidence, config, oracle)
    return EstimateOutcome(estimate, oracle.query_count - start, breakdown + tail)
