"""Numpy fallback for the segment-marking kernel.

Same contract and bit-identical output as the compiled version: flag i of the
returned array corresponds to the odd number ``lo_odd + 2*i``; a flag survives
as 1 iff no base prime p with p*p <= number divides it.
"""
import numpy as np

BACKEND_NAME = "pure"


def mark_odd_flags(lo_odd: int, count: int, base_primes: np.ndarray) -> np.ndarray:
    """Composite-mark odd numbers lo_odd, lo_odd+2, ..., lo_odd+2*(count-1).

    base_primes must be the sorted odd primes up to sqrt of the segment end.
    Multiples below p*p are never struck, so base primes inside the segment
    keep their flag.
    """
    flags = np.ones(count, dtype=np.uint8)
    hi = lo_odd + 2 * count
    for p in base_primes:
        p = int(p)
        start = p * p
        if start >= hi:
            break
        if start < lo_odd:
            start = ((lo_odd + p - 1) // p) * p
            if start % 2 == 0:
                start += p
        if start >= hi:
            continue
        flags[(start - lo_odd) // 2 :: p] = 0
    return flags
