"""Closed-form query-count bounds for the estimators.

Each formula is evaluated at concrete (n, d, epsilon, delta) and reported
with two flags: `asymptotic` marks formulas whose hidden constants are not
pinned down (evaluated with unit constants unless fitted ones are passed),
and `clamped` marks evaluations where an inner logarithm argument below 2
was raised to 2 so iterated logs of tiny counts stay finite.

All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def log_star(value: float) -> int:
    """Iterated-logarithm count: 1 for value <= 2, else 1 + log_star(log2 value)."""
    if value < 0:
        raise ValueError("log_star needs a nonnegative argument")
    count = 1
    while value > 2.0:
        value = math.log2(value)
        count += 1
    return count


class _Clamp:
    """Tracks whether any inner log argument needed raising to 2."""

    def __init__(self) -> None:
        self.fired = False

    def log2(self, x: float) -> float:
        if x < 2.0:
            self.fired = True
            x = 2.0
        return math.log2(x)

    def loglog2(self, x: float) -> float:
        return self.log2(self.log2(x))


@dataclass(frozen=True)
class BoundQuery:
    """One bound evaluation request."""

    name: str
    n: int = 1
    d: int = 1
    epsilon: float = 0.5
    delta: float = 0.1
    wrapper_exponent: float = 2.0

    def __post_init__(self) -> None:
        if self.name not in BOUND_NAMES:
            raise ValueError(f"unknown bound {self.name!r} (known: {', '.join(BOUND_NAMES)})")
        if self.d < 0 or self.n < 1:
            raise ValueError("need n >= 1 and d >= 0")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must be in [0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")


@dataclass(frozen=True)
class BoundValue:
    """A bound evaluation: always-finite value plus provenance flags.

    log2_value carries the magnitude for bounds that overflow a double
    (value is then inf); it is None for ordinarily sized results.
    """

    value: float
    asymptotic: bool = False
    clamped: bool = False
    log2_value: float | None = None


#: fitted-constant keys accepted by evaluate(); missing keys default to 1.
_CONSTANT_KEYS = ("c1", "c2")

BOUND_NAMES = (
    "det_lower",
    "det_upper",
    "mc_lower_loglog",
    "mc_lower_eps",
    "expected_lower",
    "expected_lower_refined",
    "expected_upper",
    "mc_upper",
    "stage1_output_range",
)


def evaluate(query: BoundQuery, constants: dict[str, float] | None = None) -> BoundValue:
    """Evaluate one named bound at the query's parameters.

    Args:
        query: which bound and at which point.
        constants: optional fitted constants {"c1": ..., "c2": ...} for the
            upper bounds with hidden constants; omitted means unit constants
            and an `asymptotic` flag on the result.

    Returns:
        BoundValue with a finite value for every d >= 1 (inner log arguments
        below 2 are clamped to 2 and flagged).
    """
    n, d, eps, delta = query.n, query.d, query.epsilon, query.delta
    cl = _Clamp()
    d_eff = max(d, 1)

    if query.name in ("det_lower", "det_upper"):
        # d * log2((1-eps) n / d), the group-count search floor and ceiling.
        value = d * cl.log2((1.0 - eps) * n / d_eff)
        return BoundValue(value, clamped=cl.fired)

    if query.name == "mc_lower_loglog":
        value = cl.loglog2(d_eff) - 1.0
        return BoundValue(value, clamped=cl.fired)

    if query.name == "mc_lower_eps":
        value = (1.0 / eps) * math.log2(1.0 / delta) if eps > 0.0 else math.inf
        if eps == 0.0:
            return BoundValue(math.inf, asymptotic=True, log2_value=math.inf)
        return BoundValue(value, asymptotic=True)

    if query.name == "expected_lower":
        value = (1.0 - delta) * cl.loglog2(d_eff)
        return BoundValue(value, clamped=cl.fired)

    if query.name == "expected_lower_refined":
        ll = cl.loglog2(d_eff)
        lll = cl.log2(cl.loglog2(d_eff))
        value = (1.0 - delta) * (ll - lll - 2.0)
        return BoundValue(value, clamped=cl.fired)

    if query.name in ("expected_upper", "mc_upper"):
        c = dict.fromkeys(_CONSTANT_KEYS, 1.0)
        if constants:
            c.update({k: float(v) for k, v in constants.items() if k in _CONSTANT_KEYS})
        ll = cl.loglog2(d_eff)
        tail = c["c1"] * math.sqrt(ll) + c["c2"] * (1.0 / eps**2) * math.log2(1.0 / delta)
        if query.name == "expected_upper":
            lead = (1.0 - delta + delta**query.wrapper_exponent) * ll
        else:
            lead = log_star(n) + ll
        return BoundValue(lead + tail, asymptotic=constants is None, clamped=cl.fired)

    # stage1_output_range: upper end of the doubling-stage output range for
    # the 2**(2**i) schedule, 2 * (2d/delta)**(2**(2*sqrt(loglog(2d/delta)) + 1))
    # * log2(1/delta). Huge; computed in log domain and reported via
    # log2_value with value = inf when it cannot fit a double.
    base = 2.0 * d_eff / delta
    exponent = 2.0 ** (2.0 * math.sqrt(cl.loglog2(base)) + 1.0)
    log2_log_term = math.log2(max(math.log2(1.0 / delta), 1.0))
    log2_value = 1.0 + exponent * cl.log2(base) + log2_log_term
    value = 2.0 ** log2_value if log2_value < 1024.0 else math.inf
    return BoundValue(value, asymptotic=True, clamped=cl.fired, log2_value=log2_value)
