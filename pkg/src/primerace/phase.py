"""Argument reduction mod 2*pi at whatever precision the inputs demand.

The oscillatory sums evaluate cos(k * gamma * log x) where gamma may only be
known through its logarithm (e.g. log gamma = j^8) and gamma * log x can dwarf
2^53. Reducing such products in doubles would fabricate phases, so the
required precision is computed per call and the reduction runs in mpmath at
that precision; if the configured cap cannot cover it, PrecisionError is
raised rather than returning a wrong angle.
"""
from __future__ import annotations

import math

import mpmath as mp

from .errors import PrecisionError

TWO_PI = 2.0 * math.pi
DEFAULT_MAX_BITS = 4096
_GUARD_BITS = 64
# products below 2^26 lose < 2^-27 absolute accuracy in plain double fmod
_FAST_PATH_LIMIT = float(1 << 26)


def bits_required(log_product: float) -> int:
    """Working precision needed to reduce a number of this natural log mod 2*pi
    with ~64 significant bits left over."""
    return max(0, math.ceil(log_product / math.log(2.0))) + _GUARD_BITS


def reduce_angle(log_gamma: float, x_log: float, max_bits: int = DEFAULT_MAX_BITS) -> float:
    """(e^{log_gamma} * x_log) mod 2*pi, as a double in [0, 2*pi).

    log_gamma and x_log are exact binary floats defining the product; the
    reduction error is < 2^-50 absolute whenever it succeeds.
    """
    if x_log <= 0.0:
        raise PrecisionError(f"x_log must be positive, got {x_log}")
    log_product = log_gamma + math.log(x_log)
    if log_product <= math.log(_FAST_PATH_LIMIT):
        return math.fmod(math.exp(log_gamma) * x_log, TWO_PI) % TWO_PI
    bits = bits_required(log_product)
    if bits > max_bits:
        raise PrecisionError(
            f"phase reduction needs {bits} bits (log product {log_product:.3g}), "
            f"cap is {max_bits}"
        )
    with mp.workprec(bits):
        prod = mp.exp(mp.mpf(log_gamma)) * mp.mpf(x_log)
        r = mp.fmod(prod, 2 * mp.pi)
        if r < 0:
            r += 2 * mp.pi
        return float(r)


def reduce_multiple(
    log_gamma: float, k: int, x_log: float, max_bits: int = DEFAULT_MAX_BITS
) -> float:
    """(k * e^{log_gamma} * x_log) mod 2*pi for integer k >= 1."""
    if k == 1:
        return reduce_angle(log_gamma, x_log, max_bits)
    base = reduce_angle(log_gamma, x_log, max_bits)
    # base is exact to ~2^-50; k * base stays accurate for the k in use (k <= L)
    return math.fmod(k * base, TWO_PI) % TWO_PI
