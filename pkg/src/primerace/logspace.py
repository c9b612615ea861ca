"""Signed log-magnitude arithmetic for quantities far outside double range.

A SignedLogValue is sign * e^{log_magnitude}. Sums are formed by factoring
out the largest magnitude; when nearly everything cancels, the relative
cancellation is recorded so callers can distrust the surviving digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

CANCELLATION_RATIO = 1e6  # flag when inputs exceed the result by this factor


@dataclass(frozen=True)
class SignedLogValue:
    """sign * exp(log_magnitude); sign 0 encodes exact zero."""

    log_magnitude: float
    sign: int
    cancellation_flagged: bool = False

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")

    @classmethod
    def zero(cls) -> "SignedLogValue":
        return cls(log_magnitude=-math.inf, sign=0)

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if x == 0.0:
            return cls.zero()
        return cls(log_magnitude=math.log(abs(x)), sign=1 if x > 0 else -1)

    def to_float(self) -> float:
        """Best-effort double; overflows to +-inf, underflows to signed zero."""
        if self.sign == 0:
            return 0.0
        try:
            mag = math.exp(self.log_magnitude)
        except OverflowError:
            mag = math.inf
        return math.copysign(mag, self.sign)

    def scaled(self, factor: float) -> "SignedLogValue":
        """Multiply by an ordinary float."""
        if factor == 0.0 or self.sign == 0:
            return SignedLogValue.zero()
        sign = self.sign if factor > 0 else -self.sign
        return SignedLogValue(
            log_magnitude=self.log_magnitude + math.log(abs(factor)),
            sign=sign,
            cancellation_flagged=self.cancellation_flagged,
        )

    def __neg__(self) -> "SignedLogValue":
        return SignedLogValue(self.log_magnitude, -self.sign, self.cancellation_flagged)


def signed_log_sum(terms: list[SignedLogValue]) -> SignedLogValue:
    """Sum in log space, flagging heavy cancellation.

    The largest magnitude is factored out, the remaining sum is accumulated
    in doubles (each scaled term is <= 1 in magnitude), and the flag is set
    when the result is smaller than the largest input by CANCELLATION_RATIO.
    """
    live = [t for t in terms if t.sign != 0]
    if not live:
        return SignedLogValue.zero()
    m = max(t.log_magnitude for t in live)
    acc = 0.0
    for t in live:
        acc += t.sign * math.exp(t.log_magnitude - m)
    flagged = any(t.cancellation_flagged for t in live)
    if acc == 0.0:
        return SignedLogValue(log_magnitude=-math.inf, sign=0, cancellation_flagged=True)
    result = SignedLogValue(
        log_magnitude=m + math.log(abs(acc)),
        sign=1 if acc > 0 else -1,
        cancellation_flagged=flagged or abs(acc) < 1.0 / CANCELLATION_RATIO,
    )
    return result
