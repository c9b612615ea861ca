"""Segmented sieve and exact prime-race step functions.

Counting is exact: a RaceSeries records every x where
D(x) = pi(x;q,a) - pi(x;q,b) changes, so downstream measures of sign sets
are exact interval sums rather than sampled estimates.

Segments are independent work units; race_series and residue_counts stream
them in ascending order, so memory stays O(breakpoints) not O(X).
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ._kernels import mark_odd_flags
from .errors import DomainError

DEFAULT_SEGMENT_FLAGS = 1 << 20  # odd flags per segment => span of 2^21 integers
MAX_SEGMENT_SPAN = 1 << 26  # cache-budget cap for a single sieve_segment call
MAX_X = 1 << 63


def _simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit by a one-shot sieve; used for base primes only."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _odd_base_primes(hi: int) -> np.ndarray:
    """Sorted odd primes up to sqrt(hi-1), as required by the marking kernel."""
    base = _simple_sieve(math.isqrt(max(hi - 1, 2)))
    return base[base != 2]


def _segment_flags(lo: int, hi: int, odd_base: np.ndarray) -> np.ndarray:
    """Boolean primality flags for every integer in [lo, hi)."""
    n = hi - lo
    flags = np.zeros(n, dtype=bool)
    if hi > 2 and lo <= 2:
        flags[2 - lo] = True
    lo_odd = lo if lo % 2 == 1 else lo + 1
    if lo_odd < 3:
        lo_odd = 3
    if lo_odd < hi:
        count = (hi - lo_odd + 1) // 2
        odd = mark_odd_flags(lo_odd, count, odd_base)
        flags[lo_odd - lo : : 2] = odd.view(bool)
    return flags


def sieve_segment(lo: int, hi: int) -> np.ndarray:
    """Exact primality flags (boolean bitset) for the integers in [lo, hi).

    Base primes up to sqrt(hi) are computed internally; for repeated segment
    scans use iter_prime_segments, which reuses them.
    """
    if not (2 <= lo < hi):
        raise DomainError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    if hi > MAX_X:
        raise DomainError(f"hi={hi} exceeds 2^63")
    if hi - lo > MAX_SEGMENT_SPAN:
        raise DomainError(
            f"segment span {hi - lo} exceeds cache budget {MAX_SEGMENT_SPAN}; "
            "iterate segments instead"
        )
    return _segment_flags(lo, hi, _odd_base_primes(hi))


def iter_prime_segments(
    lo: int, hi: int, segment_flags: int = DEFAULT_SEGMENT_FLAGS
) -> Iterator[np.ndarray]:
    """Yield int64 arrays of the primes in [lo, hi), one array per segment,
    in ascending order."""
    if not (2 <= lo < hi):
        raise DomainError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    if hi > MAX_X:
        raise DomainError(f"hi={hi} exceeds 2^63")
    span = 2 * segment_flags
    odd_base = _odd_base_primes(hi)
    for seg_lo in range(lo, hi, span):
        seg_hi = min(seg_lo + span, hi)
        flags = _segment_flags(seg_lo, seg_hi, odd_base)
        yield np.flatnonzero(flags) + seg_lo


def prime_count(x: int, segment_flags: int = DEFAULT_SEGMENT_FLAGS) -> int:
    """pi(x): number of primes <= x."""
    if x < 2:
        return 0
    return sum(len(seg) for seg in iter_prime_segments(2, x + 1, segment_flags))


@dataclass(frozen=True)
class RaceSeries:
    """Exact step-function representation of D(x) = pi(x;q,a) - pi(x;q,b).

    xs[i] is the i-th prime congruent to a or b mod q; diffs[i] is the value
    of D on [xs[i], xs[i+1]). D is 0 on [2, xs[0]) and right-continuous;
    consecutive diffs differ by exactly +-1.
    """

    q: int
    a: int
    b: int
    X: int
    xs: np.ndarray = field(repr=False)
    diffs: np.ndarray = field(repr=False)

    @property
    def breakpoints(self) -> Iterator[tuple[int, int]]:
        return zip(self.xs.tolist(), self.diffs.tolist())

    def value_at(self, x: float) -> int:
        """D(x) for any real x in [2, X]."""
        i = int(np.searchsorted(self.xs, x, side="right")) - 1
        return 0 if i < 0 else int(self.diffs[i])

    def final_diff(self) -> int:
        return 0 if len(self.diffs) == 0 else int(self.diffs[-1])

    def negate(self) -> "RaceSeries":
        return RaceSeries(self.q, self.b, self.a, self.X, self.xs, -self.diffs)

    def to_csv(self, path) -> None:
        """Dump breakpoints as CSV: header ``x,diff``, one row per change."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "diff"])
            for x, d in zip(self.xs.tolist(), self.diffs.tolist()):
                w.writerow([x, d])


def _validate_race(q: int, a: int, b: int) -> tuple[int, int]:
    a %= q
    b %= q
    if math.gcd(a, q) != 1 or math.gcd(b, q) != 1:
        raise DomainError(f"residues must be coprime to q: gcd({a},{q}), gcd({b},{q})")
    if a == b:
        raise DomainError(f"need distinct residues, got a = b = {a} (mod {q})")
    return a, b


def _race_segment(args) -> tuple[np.ndarray, np.ndarray]:
    """One segment's (x, +-1) contributions; top-level so workers can pickle it."""
    seg_lo, seg_hi, q, a, b, hi = args
    flags = _segment_flags(seg_lo, seg_hi, _odd_base_primes(hi))
    primes = np.flatnonzero(flags) + seg_lo
    mod = primes % q
    mask = (mod == a) | (mod == b)
    ps = primes[mask]
    steps = np.where(mod[mask] == a, 1, -1).astype(np.int64)
    return ps, steps


def race_series(
    q: int,
    a: int,
    b: int,
    X: int,
    segment_flags: int = DEFAULT_SEGMENT_FLAGS,
    workers: int = 1,
) -> RaceSeries:
    """Exact breakpoint list of D(x) on [2, X].

    With workers > 1, segments are sieved by a process pool and merged in
    ascending segment order; the result is identical for any worker count.
    """
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    a, b = _validate_race(q, a, b)
    if X < 2:
        raise DomainError(f"X must be >= 2, got {X}")
    X = int(X)
    hi = X + 1
    span = 2 * segment_flags
    bounds = [(lo, min(lo + span, hi), q, a, b, hi) for lo in range(2, hi, span)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_race_segment, bounds, chunksize=1))
    else:
        parts = [_race_segment(args) for args in bounds]
    xs = np.concatenate([p for p, _ in parts]) if parts else np.empty(0, np.int64)
    steps = np.concatenate([s for _, s in parts]) if parts else np.empty(0, np.int64)
    return RaceSeries(q=q, a=a, b=b, X=X, xs=xs, diffs=np.cumsum(steps))


@dataclass(frozen=True)
class ResidueCounts:
    """pi(x;q,r) for every unit residue r, plus pi(x) itself.

    Primes dividing q are counted in pi_total but belong to no unit class:
    sum(counts.values()) + #{p <= x : p | q} == pi_total.
    """

    q: int
    x: int
    counts: dict[int, int]
    pi_total: int


def residue_counts(
    q: int,
    X: int,
    sample_points: list[int],
    segment_flags: int = DEFAULT_SEGMENT_FLAGS,
) -> list[ResidueCounts]:
    """Counts at each sample point, from a single streaming sieve pass."""
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    samples = list(sample_points)
    if samples != sorted(samples):
        raise DomainError("sample points must be sorted ascending")
    if samples and not (2 <= samples[0] and samples[-1] <= X):
        raise DomainError("sample points must lie within [2, X]")

    units = [r for r in range(q) if math.gcd(r, q) == 1]
    per_res = np.zeros(q, dtype=np.int64)
    total = 0
    out: list[ResidueCounts] = []
    pending = list(samples)

    def snapshot(x: int) -> ResidueCounts:
        return ResidueCounts(
            q=q,
            x=x,
            counts={r: int(per_res[r]) for r in units},
            pi_total=total,
        )

    hi = X + 1
    span = 2 * segment_flags
    odd_base = _odd_base_primes(hi)
    for seg_lo in range(2, hi, span):
        seg_hi = min(seg_lo + span, hi)
        seg = np.flatnonzero(_segment_flags(seg_lo, seg_hi, odd_base)) + seg_lo
        lo_idx = 0
        while pending and pending[0] < seg_hi:
            s = pending.pop(0)
            idx = int(np.searchsorted(seg, s, side="right"))
            chunk = seg[lo_idx:idx]
            per_res += np.bincount(chunk % q, minlength=q)
            total += len(chunk)
            lo_idx = idx
            out.append(snapshot(s))
        chunk = seg[lo_idx:]
        per_res += np.bincount(chunk % q, minlength=q)
        total += len(chunk)
    for s in pending:  # X itself may equal a sample point past the last segment
        out.append(snapshot(s))
    return out
