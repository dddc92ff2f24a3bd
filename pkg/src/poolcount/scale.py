"""Log-domain magnitudes for pooling widths that outgrow floating point.

Walk schedules used by the stop-rule search grow like towers of
exponentials, so the pooling width Delta is carried as log2(Delta) plus a
saturation flag for the step where even the logarithm overflows a double.
Everything the algorithms do with Delta survives this representation:
computing the per-item inclusion probability, comparing two widths, and
multiplying by a small reporting factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_LN2 = math.log(2.0)
# log2 of the largest finite double; exponents at or past this saturate.
_MAX_LOG2 = 1024.0


def _pow2(x: float) -> float:
    """2**x as a float, returning inf instead of raising on overflow."""
    if x >= _MAX_LOG2:
        return math.inf
    return 2.0 ** x


@dataclass(frozen=True)
class ExtendedScale:
    """A value v >= 1 stored as log2(v), with a flag for v beyond 2**maxfloat.

    A saturated scale compares as +infinity and has inclusion probability
    exactly 0. log2_value is kept at +inf when saturated so ordering falls
    out of plain float comparison.
    """

    log2_value: float
    saturated: bool = False

    def __post_init__(self) -> None:
        if self.saturated:
            object.__setattr__(self, "log2_value", math.inf)
            return
        if not math.isfinite(self.log2_value):
            raise ValueError("non-finite log2_value requires saturated=True")
        if self.log2_value < 0.0:
            raise ValueError(f"scale below 1 (log2 = {self.log2_value})")

    @classmethod
    def from_integer(cls, value: int) -> "ExtendedScale":
        """Exact conversion from an integer >= 1 (arbitrary precision ok)."""
        if value < 1:
            raise ValueError(f"scale must be >= 1, got {value}")
        return cls(math.log2(value))

    @classmethod
    def from_value(cls, value: float) -> "ExtendedScale":
        """Conversion from a real >= 1."""
        if value < 1.0:
            raise ValueError(f"scale must be >= 1, got {value}")
        if math.isinf(value):
            return cls(math.inf, True)
        return cls(math.log2(value))

    @classmethod
    def power_of_two(cls, exponent: "ExtendedScale | float | int") -> "ExtendedScale":
        """2**exponent, saturating when the exponent itself overflows a double.

        Args:
            exponent: a nonnegative real, or an ExtendedScale whose *value*
                becomes the new log2. ExtendedScale exponents saturate once
                their value passes the largest finite double.
        """
        if isinstance(exponent, ExtendedScale):
            if exponent.saturated or exponent.log2_value >= _MAX_LOG2:
                return cls(math.inf, True)
            return cls(2.0 ** exponent.log2_value)
        x = float(exponent)
        if x < 0.0:
            raise ValueError("negative exponent would give a scale below 1")
        if math.isinf(x):
            return cls(math.inf, True)
        return cls(x)

    def inclusion_probability(self) -> float:
        """Per-item probability p = 1 - 2**(-1/Delta) of joining a pooled query.

        Monotone decreasing in Delta, p = 0.5 at Delta = 1, and exactly 0.0
        once saturated or once ln2/Delta underflows to zero. Computed as
        -expm1(-ln2/Delta) so tiny probabilities keep full precision.
        """
        if self.saturated:
            return 0.0
        return -math.expm1(-_LN2 * 2.0 ** (-self.log2_value))

    def ratio_at_least_two(self, other: "ExtendedScale") -> bool:
        """True when other/self >= 2. Saturated `other` always qualifies."""
        if other.saturated:
            return True
        if self.saturated:
            return False
        return other.log2_value - self.log2_value >= 1.0

    def scaled_by(self, factor: float) -> "ExtendedScale":
        """Multiply by a small positive reporting factor (>= 1)."""
        if factor < 1.0:
            raise ValueError("scaled_by only supports factors >= 1")
        if self.saturated:
            return self
        return ExtendedScale(self.log2_value + math.log2(factor))

    def as_float(self) -> float:
        """The plain value, or inf when it does not fit a double."""
        if self.saturated:
            return math.inf
        return _pow2(self.log2_value)

    def exceeds_value(self, value: float) -> bool:
        """self > value for a plain nonnegative real, compared in log domain."""
        if self.saturated:
            return True
        if value < 1.0:
            return True  # every scale is >= 1
        return self.log2_value > math.log2(value)

    # Ordering: saturated scales carry log2_value = +inf, so float compare
    # is the whole story. Two saturated scales are equal.
    def __lt__(self, other: "ExtendedScale") -> bool:
        return self.log2_value < other.log2_value

    def __le__(self, other: "ExtendedScale") -> bool:
        return self.log2_value <= other.log2_value

    def __gt__(self, other: "ExtendedScale") -> bool:
        return self.log2_value > other.log2_value

    def __ge__(self, other: "ExtendedScale") -> bool:
        return self.log2_value >= other.log2_value

    def __repr__(self) -> str:
        if self.saturated:
            return "ExtendedScale(saturated)"
        return f"ExtendedScale(log2={self.log2_value!r})"
