"""Doubling search for a coarse upper estimate of the defective count.

Walk a schedule of pooling widths Delta_1 < Delta_2 < ... (each step at
least doubling), asking one Bernoulli pooled query per width. A query at
width Delta answers 0 with probability 2**(-d/Delta), so the first 0-answer
lands, with high probability, at a width comparable to d. Reporting
D = 2 * Delta_stop * log2(2/confidence) turns the stop width into a value
that is at least d except with probability confidence/2, while overshooting
the analytic index i1 (first width above 2d/confidence) with probability at
most confidence/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .scale import ExtendedScale

_VALIDATION_STEPS = 64


class Schedule:
    """A named walk schedule Delta_1, Delta_2, ... of pooling widths.

    The generator maps a 1-based step index to an ExtendedScale. At
    construction the first 64 steps are checked: Delta_1 >= 1 (by type) and
    every consecutive ratio >= 2. Values and inclusion probabilities are
    cached per instance since runs revisit the same prefix constantly.
    """

    def __init__(self, name: str, generator: Callable[[int], ExtendedScale]) -> None:
        self.name = name
        self._generator = generator
        self._deltas: dict[int, ExtendedScale] = {}
        self._probs: dict[int, float] = {}
        for i in range(1, _VALIDATION_STEPS):
            a, b = self[i], self[i + 1]
            if not a.ratio_at_least_two(b):
                raise ValueError(
                    f"schedule {name!r} grows too slowly at step {i}: "
                    f"{a!r} -> {b!r}"
                )

    def __getitem__(self, index: int) -> ExtendedScale:
        if index < 1:
            raise IndexError("schedule steps are 1-based")
        delta = self._deltas.get(index)
        if delta is None:
            delta = self._generator(index)
            self._deltas[index] = delta
        return delta

    def inclusion_probability(self, index: int) -> float:
        p = self._probs.get(index)
        if p is None:
            p = self[index].inclusion_probability()
            self._probs[index] = p
        return p

    def __repr__(self) -> str:
        return f"Schedule({self.name!r})"


def _pow2f(x: float) -> float:
    return math.inf if x >= 1024.0 else 2.0 ** x


def _tower_log2(i: int) -> float:
    # log2(Delta_i) for Delta_1 = 1, Delta_{i+1} = 2**Delta_i.
    log2v = 0.0
    for _ in range(i - 1):
        log2v = _pow2f(log2v)
    return log2v


_BUILTIN_LAWS: dict[str, Callable[[int], float]] = {
    # name -> log2(Delta_i); power_of_two saturates on inf
    "double-exp": lambda i: _pow2f(float(i)),
    "double-exp-sq": lambda i: _pow2f(float(i * i)),
    "double-exp-half-sq": lambda i: _pow2f(i * i / 2.0),
    "triple-exp": lambda i: _pow2f(_pow2f(float(i))),
    "quad-exp": lambda i: _pow2f(_pow2f(_pow2f(float(i)))),
    "tower": _tower_log2,
}


def builtin_schedules() -> list[Schedule]:
    """All built-in schedules, cheapest-growing first."""
    return [schedule_by_name(name) for name in _BUILTIN_LAWS]


def schedule_by_name(name: str) -> Schedule:
    """Look up a built-in schedule; raises ValueError on unknown names."""
    law = _BUILTIN_LAWS.get(name)
    if law is None:
        known = ", ".join(sorted(_BUILTIN_LAWS))
        raise ValueError(f"unknown schedule {name!r} (known: {known})")
    return Schedule(name, lambda i, law=law: ExtendedScale.power_of_two(law(i)))


@dataclass(frozen=True)
class DoublingResult:
    """Outcome of one doubling search.

    estimate is D = 2 * Delta_stop * log2(2/confidence) as an ExtendedScale;
    capped means the walk was cut at the cap index with its query still
    answering 1, in which case delta_at_stop is the cap-step width.
    """

    stop_index: int
    delta_at_stop: ExtendedScale
    estimate: ExtendedScale
    queries_asked: int
    capped: bool


def run_doubling(
    schedule: Schedule,
    confidence: float,
    oracle,
    cap: int | None = None,
) -> DoublingResult:
    """Walk the schedule until the first 0-answer (or the cap) and report D.

    Args:
        schedule: widths to walk.
        confidence: failure budget delta in (0, 1); the reported D drops
            below the true d with probability at most confidence/2.
        oracle: anything with answer_bernoulli(p).
        cap: optional hard stop index (Monte Carlo mode). When the walk
            reaches the cap without a 0-answer it stops there anyway.

    Returns:
        DoublingResult; queries_asked == stop_index always, and a saturated
        width answers 0 deterministically so the walk always terminates.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    if cap is not None and cap < 1:
        raise ValueError("cap must be >= 1")
    factor = 2.0 * math.log2(2.0 / confidence)
    i = 0
    while True:
        i += 1
        delta = schedule[i]
        answer = oracle.answer_bernoulli(schedule.inclusion_probability(i))
        if answer == 0:
            capped = False
            break
        if cap is not None and i >= cap:
            capped = True
            break
    return DoublingResult(
        stop_index=i,
        delta_at_stop=delta,
        estimate=delta.scaled_by(factor),
        queries_asked=i,
        capped=capped,
    )


def first_index_above(
    schedule: Schedule, threshold: ExtendedScale, max_steps: int = 256
) -> int:
    """Smallest step index whose width exceeds the threshold.

    Used for the analytic overshoot index i1 (threshold 2d/confidence) and
    for Monte Carlo caps (threshold = previous stage's estimate). A
    saturated width ends the search unconditionally: it answers 0 for sure,
    so walking past it is pointless even against a saturated threshold.
    """
    for i in range(1, max_steps + 1):
        delta = schedule[i]
        if delta.saturated or delta > threshold:
            return i
    raise ValueError(f"no step of {schedule!r} exceeds the threshold within {max_steps}")
