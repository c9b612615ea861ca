"""Fejer-weighted cosine sums F_{gamma,L}(x) and measures of their level sets.

F_{gamma,L}(x) = sum_{k=1}^{L-1} (L - k) cos(k gamma log x)
              = sin^2(L theta / 2) / (2 sin^2(theta/2)) - L/2,  theta = gamma log x,

so F >= -L/2 everywhere while the peak L(L-1)/2 is confined to narrow windows
around theta = 0 (mod 2pi): the sum is negatively biased, and the measure of
{x in [1,X] : F >= -L/4} decays like X/sqrt(L).

The superlevel set is computed two ways: analytically from the closed form
(bisection on monotone pieces, then exact mapping of theta-intervals to
x-intervals) and by adaptive grid refinement as a cross-check.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .phase import DEFAULT_MAX_BITS, TWO_PI, reduce_angle

_THETA_TOL = 1e-12  # bisection tolerance for level-crossing locations
_SERIES_SWITCH = 1e-8  # |sin(theta/2)| below this uses the series expansion


@dataclass(frozen=True)
class FejerParams:
    """Frequency gamma >= 1 and length L >= 4 (the hypotheses under which the
    sublevel-measure bound holds)."""

    gamma: float
    L: int

    def __post_init__(self):
        if self.gamma < 1.0:
            raise DomainError(f"gamma must be >= 1, got {self.gamma}")
        if self.L < 4:
            raise DomainError(f"L must be >= 4, got {self.L}")


def weighted_cos_sum(L: int, theta: float) -> float:
    """Closed-form F for any integer L >= 1 (L in {1,2,3} arises only as the
    degenerate first level of desk-scale constructions; L = 1 gives 0)."""
    s = math.sin(0.5 * theta)
    if abs(s) < _SERIES_SWITCH:
        u = math.remainder(theta, TWO_PI)
        return 0.5 * L * (L - 1) - L * L * (L * L - 1) * u * u / 24.0
    r = math.sin(0.5 * L * theta) / s
    return 0.5 * r * r - 0.5 * L


def fejer_closed(p: FejerParams, theta: float) -> float:
    """F via the closed form; removable singularity handled by series."""
    return weighted_cos_sum(p.L, theta)


def fejer_direct(p: FejerParams, theta: float) -> float:
    """F by direct O(L) summation; the oracle for the closed form."""
    k = np.arange(1, p.L)
    return float(np.dot(p.L - k, np.cos(k * theta)))


def fejer_at_x(p: FejerParams, x: float) -> float:
    return fejer_closed(p, math.fmod(p.gamma * math.log(x), TWO_PI))


def _closed_vec(L: int, theta: np.ndarray) -> np.ndarray:
    s = np.sin(0.5 * theta)
    tiny = np.abs(s) < _SERIES_SWITCH
    s_safe = np.where(tiny, 1.0, s)
    r = np.sin(0.5 * L * theta) / s_safe
    main = 0.5 * r * r - 0.5 * L
    u = np.remainder(theta + math.pi, TWO_PI) - math.pi
    series = 0.5 * L * (L - 1) - L * L * (L * L - 1) * u * u / 24.0
    return np.where(tiny, series, main)


# ---------------------------------------------------------------------------
# superlevel set in theta, exactly, from the closed form
# ---------------------------------------------------------------------------


def superlevel_theta_intervals(L: int, threshold: float) -> list[tuple[float, float]]:
    """Maximal intervals of {theta in [0, 2pi) : F(theta) >= threshold}.

    For T > -L/2, F >= T is equivalent (with c = sqrt(L + 2T)) to

        G(theta) = |sin(L theta / 2)| - c sin(theta/2) >= 0,

    and on each node cell [2 pi n/L, 2 pi (n+1)/L] the first term is a single
    hump against a slowly varying second term: G is negative at interior
    nodes, has one analytically locatable maximum, and therefore exactly 0
    or 2 crossings per cell (the boundary cells n = 0 and n = L-1 contribute
    components pinned at theta = 0 and 2 pi). Every crossing is bisected on
    a sign-guaranteed bracket, so no component is missed regardless of how
    narrow it is.
    """
    if threshold <= -0.5 * L:
        return [(0.0, TWO_PI)]
    f_max = 0.5 * L * (L - 1)
    c = math.sqrt(L + 2.0 * threshold)

    def G(theta: float) -> float:
        return abs(math.sin(0.5 * L * theta)) - c * math.sin(0.5 * theta)

    def hump_peak(n: int) -> float:
        """theta of the (near-)maximum of G in cell n: stationarity gives
        cos(L theta/2) = +-(c/L) cos(theta/2), solved by two fixed-point
        rounds since cos(theta/2) barely moves within a cell."""
        lo = TWO_PI * n / L
        hi = TWO_PI * (n + 1) / L
        theta = 0.5 * (lo + hi)
        for _ in range(3):
            u = max(-1.0, min(1.0, (c / L) * math.cos(0.5 * theta)))
            phi = math.acos(u)  # in [0, pi]; hump apex in phi-coordinates
            theta = (TWO_PI * n + 2.0 * phi) / L
            theta = min(max(theta, lo), hi)
        return theta

    def bisect(lo: float, hi: float) -> float:
        """Root of G on [lo, hi]; the endpoints bracket a sign change."""
        g_lo = G(lo)
        while hi - lo > _THETA_TOL:
            mid = 0.5 * (lo + hi)
            gm = G(mid)
            if (gm < 0.0) == (g_lo < 0.0):
                lo, g_lo = mid, gm
            else:
                hi = mid
        return 0.5 * (lo + hi)

    out: list[tuple[float, float]] = []
    for n in range(L):
        lo = TWO_PI * n / L
        hi = TWO_PI * (n + 1) / L
        peak = hump_peak(n)
        if G(peak) <= 0.0:
            continue
        a = 0.0 if n == 0 else bisect(lo, peak)
        b = TWO_PI if n == L - 1 else bisect(peak, hi)
        if b > a:
            out.append((a, b))
    return out


def x_measure_of_theta_set(
    intervals: list[tuple[float, float]], gamma: float, X: float
) -> tuple[float, int]:
    """Lebesgue measure of {x in [1, X] : gamma log x mod 2pi in the set}.

    Returns (measure, number of x-intervals summed). Exact up to the float
    exp/clip rounding of each endpoint.
    """
    measure = 0.0
    n_terms = 0
    k_max = int(gamma * math.log(X) / TWO_PI) + 1
    for k in range(k_max + 1):
        base = TWO_PI * k
        for a, b in intervals:
            lo = math.exp((base + a) / gamma)
            if lo > X:
                continue
            hi = math.exp((base + b) / gamma)
            lo, hi = max(lo, 1.0), min(hi, X)
            if hi > lo:
                measure += hi - lo
                n_terms += 1
    return measure, n_terms


@dataclass(frozen=True)
class SublevelReport:
    """Measured superlevel set {x in [1,X] : F >= threshold}."""

    gamma: float
    L: int
    X: float
    threshold: float
    measure: float
    density: float  # measure / X
    method: str
    error_bound: float

    def __post_init__(self):
        if not (-1e-9 <= self.measure <= self.X - 1.0 + 1e-6 * self.X):
            raise ConsistencyError(
                f"measure {self.measure} outside [0, X-1] for X={self.X}"
            )


def _measure_analytic(p: FejerParams, X: float, threshold: float) -> SublevelReport:
    intervals = superlevel_theta_intervals(p.L, threshold)
    measure, n_terms = x_measure_of_theta_set(intervals, p.gamma, X)
    err = 2.0 * n_terms * X * (_THETA_TOL / p.gamma + 4e-16)
    return SublevelReport(
        gamma=p.gamma,
        L=p.L,
        X=X,
        threshold=threshold,
        measure=min(measure, X - 1.0),
        density=min(measure, X - 1.0) / X,
        method="analytic-intervals",
        error_bound=err,
    )


def _measure_grid(
    p: FejerParams, X: float, threshold: float, budget: int = 10_000_000
) -> SublevelReport:
    """Midpoint-rule cross-check on a phase-uniform grid.

    Cells are uniform in log x, so every cell spans the same phase. The cell
    count is chosen so that the span is half the narrowest feature of the
    superlevel set (the false gap around the first node, of width
    4 pi sqrt(L + 2T) / L^2), capped by the evaluation budget. The error
    estimate sums the widths of cells adjacent to an indicator transition;
    if the cap forced under-resolution the estimate is inflated, since
    features narrower than a cell can then be missed entirely.
    """
    if threshold <= -0.5 * p.L:
        m = X - 1.0
        return SublevelReport(
            gamma=p.gamma, L=p.L, X=X, threshold=threshold, measure=m,
            density=m / X, method="adaptive-grid", error_bound=0.0,
        )
    ln_x = math.log(X)
    c = math.sqrt(p.L + 2.0 * threshold)
    gap1 = 4.0 * math.pi * max(c, 1e-3) / p.L**2
    need = int(p.gamma * ln_x / (0.5 * gap1)) + 1
    n = max(8192, min(need, budget))
    under_resolved = need > n

    measure = 0.0
    err = 0.0
    chunk = 1 << 20
    prev_ind = None  # indicator of the last cell of the previous chunk
    prev_width = 0.0
    log_edges_step = ln_x / n
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        idx = np.arange(start, stop + 1)
        edges = np.exp(idx * log_edges_step)
        mids_log = (idx[:-1] + 0.5) * log_edges_step
        theta = np.mod(p.gamma * mids_log, TWO_PI)
        ind = _closed_vec(p.L, theta) >= threshold
        widths = np.diff(edges)
        measure += float(np.sum(widths[ind]))
        flips = ind[:-1] != ind[1:]
        err += float(np.sum((widths[:-1] + widths[1:])[flips])) * 0.5
        if prev_ind is not None and bool(ind[0]) != prev_ind:
            err += 0.5 * (prev_width + float(widths[0]))
        prev_ind = bool(ind[-1])
        prev_width = float(widths[-1])
    if under_resolved:
        err = 3.0 * err + (X - 1.0) * (1.0 - n / need)
    measure = min(measure, X - 1.0)
    return SublevelReport(
        gamma=p.gamma,
        L=p.L,
        X=X,
        threshold=threshold,
        measure=measure,
        density=measure / X,
        method="adaptive-grid",
        error_bound=err + (X - 1.0) * 4e-16 * n,
    )


def sublevel_measure(
    p: FejerParams,
    X: float,
    threshold: float,
    method: str = "analytic-intervals",
    grid_budget: int = 10_000_000,
) -> SublevelReport:
    """Measure of {x in [1, X] : F_{gamma,L}(x) >= threshold}.

    method "both" runs the analytic and grid routes and raises
    ConsistencyError if they disagree beyond their combined error bounds
    (the analytic result is returned).
    """
    if X < 2:
        raise DomainError(f"X must be >= 2, got {X}")
    if method == "analytic-intervals":
        return _measure_analytic(p, X, threshold)
    if method == "adaptive-grid":
        return _measure_grid(p, X, threshold, budget=grid_budget)
    if method == "both":
        ana = _measure_analytic(p, X, threshold)
        grid = _measure_grid(p, X, threshold, budget=grid_budget)
        slack = ana.error_bound + grid.error_bound + 1e-9 * X
        if abs(ana.measure - grid.measure) > slack:
            raise ConsistencyError(
                f"analytic ({ana.measure}) and grid ({grid.measure}) measures "
                f"disagree beyond {slack}"
            )
        return ana
    raise DomainError(f"unknown method {method!r}")


def omega_membership(
    construction,
    x_log: float,
    j_window: tuple[float, float],
    max_bits: int = DEFAULT_MAX_BITS,
) -> bool:
    """Is x (given by log x) in the all-levels-deeply-negative set?

    True iff F_{gamma_j, j^3}(x) <= -j^3/4 for every integer level j of the
    construction inside j_window. An empty window is vacuously true. Levels
    with j^3 < 4 have F identically small (0 for j = 1), so they fail the
    condition and such windows are honestly never members.
    """
    j_lo = max(construction.j_min, math.ceil(j_window[0]))
    j_hi = min(construction.j_max, math.floor(j_window[1]))
    for j in range(j_lo, j_hi + 1):
        L = j**3
        theta = reduce_angle(construction.log_gamma_of(j), x_log, max_bits)
        if weighted_cos_sum(L, theta) > -L / 4.0:
            return False
    return True


def write_density_sweep_csv(rows: list[SublevelReport], path) -> None:
    """CSV emission of sweeps: header L,gamma,X,density,method,err."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["L", "gamma", "X", "density", "method", "err"])
        for r in rows:
            w.writerow([r.L, r.gamma, r.X, repr(r.density), r.method, repr(r.error_bound)])
