"""Densities: exact Lebesgue measure of race sign sets, and sampled densities
of the hypothetical main term's sign and of the Omega set.

Exact measures come straight off the RaceSeries breakpoints in integer
arithmetic. Sampled densities target the uniform-in-x measure on
[sqrt(X), X]: when X fits in a double, x is drawn uniformly; otherwise
log x is drawn uniformly and each sample carries an importance weight
proportional to x, handled in log space.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .characters import RacePhase
from .errors import DomainError
from .explicit_formula import delta_main_hypothetical, in_window_levels
from .fejer import omega_membership
from .phase import DEFAULT_MAX_BITS
from .sieve import RaceSeries
from .zeros import HypotheticalConstruction

# X below e^600 is sampled directly in x; beyond that, in log x with weights
_DIRECT_X_LOG_LIMIT = 600.0


@dataclass(frozen=True)
class DensityResult:
    """A measured or estimated density.

    Exact kinds carry sample_count = 0 and confidence_radius = 0. Monte
    Carlo kinds report the weighted fraction, the number of samples, and a
    95% confidence radius computed with the effective sample size (which
    accounts for the importance weighting)."""

    kind: str  # "exact-race" | "hypothetical-sign" | "omega"
    X_log: float
    density: float
    measure: float | None
    sample_count: int
    confidence_radius: float
    seed: int | None = None

    def __post_init__(self):
        if not (-1e-12 <= self.density <= 1.0 + 1e-12):
            raise DomainError(f"density {self.density} outside [0,1]")


def sign_measures(rs: RaceSeries) -> tuple[int, int, int]:
    """Exact Lebesgue measures of {D > 0}, {D = 0}, {D < 0} on [2, X].

    Breakpoints are integers and D is constant between them, so the three
    measures are exact integers summing to X - 2.
    """
    xs = rs.xs.tolist()
    diffs = rs.diffs.tolist()
    pos = zero = neg = 0
    prev_x, prev_d = 2, 0
    for x, d in zip(xs, diffs):
        seg = min(x, rs.X) - prev_x
        if seg > 0:
            if prev_d > 0:
                pos += seg
            elif prev_d < 0:
                neg += seg
            else:
                zero += seg
        prev_x, prev_d = x, d
    seg = rs.X - prev_x
    if seg > 0:
        if prev_d > 0:
            pos += seg
        elif prev_d < 0:
            neg += seg
        else:
            zero += seg
    return pos, zero, neg


def exact_race_density(rs: RaceSeries) -> DensityResult:
    """Exact measure of {x in [2, X] : D(x) > 0}, normalized by X.

    Ties D(x) = 0 are excluded (the race is a strict inequality).
    """
    pos, _, _ = sign_measures(rs)
    return DensityResult(
        kind="exact-race",
        X_log=math.log(rs.X),
        density=pos / rs.X,
        measure=float(pos),
        sample_count=0,
        confidence_radius=0.0,
    )


# ---------------------------------------------------------------------------
# Monte Carlo densities over [sqrt(X), X]
# ---------------------------------------------------------------------------


def _draw_samples(
    X_log: float, n_samples: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """(log x samples, log importance weights) for uniform-in-x density on
    [sqrt(X), X]."""
    rng = np.random.default_rng(seed)
    if X_log <= _DIRECT_X_LOG_LIMIT:
        lo, hi = math.exp(X_log / 2.0), math.exp(X_log)
        x = rng.uniform(lo, hi, size=n_samples)
        return np.log(x), np.zeros(n_samples)
    x_logs = rng.uniform(X_log / 2.0, X_log, size=n_samples)
    return x_logs, x_logs.copy()  # weight w = x, kept as log w


def _weighted_fraction(
    flags: np.ndarray, log_w: np.ndarray
) -> tuple[float, float, float]:
    """(fraction, confidence_radius, effective n) of a weighted indicator."""
    m = float(np.max(log_w))
    w = np.exp(log_w - m)
    total = float(np.sum(w))
    hit = float(np.sum(w[flags]))
    p = hit / total
    n_eff = total * total / float(np.sum(w * w))
    radius = 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / n_eff)
    return p, radius, n_eff


def _sign_flag_chunk(args) -> list[bool]:
    c, race, x_logs, max_bits = args
    return [
        delta_main_hypothetical(xl, c, race, max_bits).value.sign < 0 for xl in x_logs
    ]


def _omega_flag_chunk(args) -> list[bool]:
    c, window, x_logs, max_bits = args
    return [omega_membership(c, xl, window, max_bits) for xl in x_logs]


def hypothetical_sign_density(
    c: HypotheticalConstruction,
    race: RacePhase,
    X_log: float,
    n_samples: int,
    seed: int,
    workers: int = 1,
    max_bits: int = DEFAULT_MAX_BITS,
) -> DensityResult:
    """Fraction of x in [sqrt(X), X] (uniform-in-x) where the hypothetical
    main term is negative."""
    if n_samples < 1000:
        raise DomainError(f"n_samples must be >= 1000, got {n_samples}")
    x_logs, log_w = _draw_samples(X_log, n_samples, seed)
    chunks = np.array_split(x_logs, max(1, min(n_samples, 4 * max(workers, 1))))
    jobs = [(c, race, chunk, max_bits) for chunk in chunks]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sign_flag_chunk, jobs, chunksize=1))
    else:
        parts = [_sign_flag_chunk(j) for j in jobs]
    flags = np.array([f for part in parts for f in part], dtype=bool)
    p, radius, _ = _weighted_fraction(flags, log_w)
    measure = None
    if X_log <= _DIRECT_X_LOG_LIMIT:
        measure = p * (math.exp(X_log) - math.exp(X_log / 2.0))
    return DensityResult(
        kind="hypothetical-sign",
        X_log=X_log,
        density=p,
        measure=measure,
        sample_count=n_samples,
        confidence_radius=radius,
        seed=seed,
    )


def omega_window(c: HypotheticalConstruction, X_log: float) -> tuple[float, float]:
    """Level window of the Omega condition.

    Paper mode: [1/4 (log X)^(1/16), 4 (log X)^(1/16)]. Scale mode: all of
    the construction's levels (the window law tracks the replaced growth)."""
    if c.is_paper_exact:
        r = X_log ** (1.0 / 16.0)
        return (0.25 * r, 4.0 * r)
    return (float(c.j_min), float(c.j_max))


def omega_density(
    c: HypotheticalConstruction,
    X_log: float,
    n_samples: int,
    seed: int,
    workers: int = 1,
    max_bits: int = DEFAULT_MAX_BITS,
) -> DensityResult:
    """Fraction of x in [sqrt(X), X] (uniform-in-x) belonging to Omega:
    every level in the window has its Fejer sum <= -j^3/4."""
    if n_samples < 1000:
        raise DomainError(f"n_samples must be >= 1000, got {n_samples}")
    window = omega_window(c, X_log)
    x_logs, log_w = _draw_samples(X_log, n_samples, seed)
    chunks = np.array_split(x_logs, max(1, min(n_samples, 4 * max(workers, 1))))
    jobs = [(c, window, chunk, max_bits) for chunk in chunks]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_omega_flag_chunk, jobs, chunksize=1))
    else:
        parts = [_omega_flag_chunk(j) for j in jobs]
    flags = np.array([f for part in parts for f in part], dtype=bool)
    p, radius, _ = _weighted_fraction(flags, log_w)
    measure = None
    if X_log <= _DIRECT_X_LOG_LIMIT:
        measure = p * (math.exp(X_log) - math.exp(X_log / 2.0))
    return DensityResult(
        kind="omega",
        X_log=X_log,
        density=p,
        measure=measure,
        sample_count=n_samples,
        confidence_radius=radius,
        seed=seed,
    )


def omega_implies_negative(
    c: HypotheticalConstruction,
    race: RacePhase,
    X_log: float,
    x_log: float,
    max_bits: int = DEFAULT_MAX_BITS,
) -> tuple[bool, bool, bool]:
    """(sufficient, in_omega, negative) for one sample.

    sufficient means the per-sample containment backing the implication
    holds: the main term's level window at x is nonempty and lies inside the
    Omega window at X, so Omega membership forces every summed term, hence
    the sum, negative."""
    window = omega_window(c, X_log)
    levels = in_window_levels(c, x_log)
    sufficient = bool(levels) and all(
        window[0] <= j <= window[1] for j in levels
    )
    member = omega_membership(c, x_log, window, max_bits)
    negative = delta_main_hypothetical(x_log, c, race, max_bits).value.sign < 0
    return sufficient, member, negative
