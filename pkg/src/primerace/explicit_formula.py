"""Explicit-formula evaluation over zero multisets.

Two regimes share this module:

* direct mode, f_rho / delta_explicit: x and the zeros fit in doubles; the
  oscillatory integral term is integrated adaptively (or replaced by a
  certified bound when |rho| is large), and the race difference is
  reconstructed as -2 Re((conj chi(a) - conj chi(b)) * sum of f over zeros)
  plus, by default, the prime-square term of the real characters -- see
  delta_explicit's docstring for why that term is needed for finite-x sign
  fidelity.

* log-space mode, delta_main_hypothetical: x may be e^65536 and gamma_j may
  be e^(j^8); magnitudes are SignedLogValues and phases are reduced mod 2*pi
  at computed precision, failing loudly if the precision cap is too small.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .characters import CharacterTable, RacePhase, build_character_table
from .errors import ConsistencyError, DomainError
from .logspace import SignedLogValue, signed_log_sum
from .phase import DEFAULT_MAX_BITS, TWO_PI, reduce_angle
from .fejer import weighted_cos_sum
from .zeros import HypotheticalConstruction, Zero, ZeroMultiset

U0 = math.log(2.0)  # lower integration endpoint in u = log t


@dataclass(frozen=True)
class FormulaConfig:
    """Knobs of the direct-mode evaluator.

    beta_cut: the zero-free cutoff entering the diagnostic error term
        x^beta log^2 x; None resolves to max(1/2, smallest beta in the
        multiset). Must be >= 1/2 when given.
    x_prime_rule: x -> x' truncation height; None means x' = x. For
        hypothetical constructions use default_x_prime_log to realize the
        keep-included-levels-whole rule.
    quadrature_tol: relative (to the leading term) tolerance of the
        integral-term quadrature.
    gamma_asymptotic_threshold: |rho| above which the integral term is
        dropped and replaced by its certified bound. The same switch fires
        earlier if resolving the oscillation would exceed max_panels.
    """

    beta_cut: float | None = None
    x_prime_rule: Callable[[float], float] | None = None
    quadrature_tol: float = 1e-10
    gamma_asymptotic_threshold: float = 1e6
    max_panels: int = 1 << 20
    max_precision_bits: int = DEFAULT_MAX_BITS

    def __post_init__(self):
        if self.beta_cut is not None and self.beta_cut < 0.5:
            raise DomainError(f"beta_cut must be >= 1/2, got {self.beta_cut}")
        if not (0.0 < self.quadrature_tol <= 1e-6):
            raise DomainError(
                f"quadrature_tol must lie in (0, 1e-6], got {self.quadrature_tol}"
            )


DEFAULT_CONFIG = FormulaConfig()


# ---------------------------------------------------------------------------
# f(rho) = x^rho / (rho log x) + (1/rho) * integral_2^x t^rho / (t log^2 t) dt
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FRhoResult:
    value: complex
    error_bound: float  # certified bound on |value - f(rho)|
    used_asymptotic: bool
    panels: int = 0


def _as_complex_rho(rho) -> tuple[float, float]:
    """(beta, gamma) from a Zero or a complex/real number."""
    if isinstance(rho, Zero):
        if rho.log_gamma > 700.0:
            raise DomainError(
                "gamma exceeds double range; evaluate through the log-space "
                "route (delta_main_hypothetical)"
            )
        return rho.beta, math.exp(rho.log_gamma)
    z = complex(rho)
    return z.real, z.imag


def _leading_term(beta: float, gamma: float, x: float, max_bits: int) -> complex:
    """x^rho / (rho log x) with the phase gamma*log(x) reduced safely."""
    U = math.log(x)
    rho = complex(beta, gamma)
    if gamma == 0.0:
        phase = 0.0
    else:
        phase = math.copysign(
            reduce_angle(math.log(abs(gamma)), U, max_bits), gamma
        )
    return (x**beta) * complex(math.cos(phase), math.sin(phase)) / (rho * U)


def _simpson(rho: complex, u_lo: float, u_hi: float, n: int) -> complex:
    u = np.linspace(u_lo, u_hi, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    g = np.exp(rho * u) / (u * u)
    return complex((u_hi - u_lo) / n / 3.0 * np.dot(w, g))


def integral_tail_bound(beta: float, rho_abs: float, x: float) -> float:
    """Certified bound on |(1/rho) integral_2^x t^(rho-1)/log^2 t dt|.

    Two integrations by parts of integral e^{rho u}/u^2 du give endpoint
    terms at u = log x and u = log 2 of sizes x^beta/(|rho| log^2 x) and
    2^beta/(|rho| log^2 2), a second pair one power of |rho| down, and a
    remainder (6/rho^2) integral e^{rho u}/u^4 du, bounded by splitting at
    (log x)/2. Everything is kept explicit, so the bound is valid for all
    x >= 4, beta in (0, 1), rho != 0. For |rho| >= 1e6 and log x >= 8.8 the
    bound is below 4 x^beta / (|rho|^2 log^2 x) (the classical shape); for
    mid-range x the 2^beta/log^2 2 endpoint genuinely dominates and a
    constant-4 form would be wrong, so the full expression is used.
    """
    U = math.log(x)
    xb = x**beta
    lb = 2.0**beta
    j4 = 16.0 * xb / (beta * U**4) + (x ** (beta / 2.0)) * max(0.0, U / 2.0 - U0) / U0**4
    return (
        (xb / U**2 + lb / U0**2) / rho_abs**2
        + 2.0 * (xb / U**3 + lb / U0**3) / rho_abs**3
        + 6.0 * j4 / rho_abs**3
    )


def f_rho(rho, x: float, cfg: FormulaConfig = DEFAULT_CONFIG) -> FRhoResult:
    """f(rho) with a certified error bound.

    The integral term is computed by composite Simpson on u = log t with
    panel doubling (Richardson halving) until the error estimate drops below
    quadrature_tol * |leading term|, starting from >= 8 panels per
    oscillation period. When |rho| exceeds the asymptotic threshold, or the
    oscillation could not be resolved within the panel cap, the term is
    replaced by 0 with the certified integral_tail_bound.
    """
    if x < 4.0:
        raise DomainError(f"x must be >= 4, got {x}")
    beta, gamma = _as_complex_rho(rho)
    rho_c = complex(beta, gamma)
    if rho_c == 0:
        raise DomainError("rho must be nonzero")
    U = math.log(x)
    leading = _leading_term(beta, gamma, x, cfg.max_precision_bits)
    rho_abs = abs(rho_c)

    n_osc = 8.0 * abs(gamma) * (U - U0) / TWO_PI
    n0 = 64
    while n0 < n_osc:
        n0 *= 2
    use_bound = rho_abs > cfg.gamma_asymptotic_threshold or n0 > cfg.max_panels
    if use_bound:
        return FRhoResult(
            value=leading,
            error_bound=integral_tail_bound(beta, rho_abs, x),
            used_asymptotic=True,
        )

    tol_abs = cfg.quadrature_tol * abs(leading) * rho_abs
    prev = _simpson(rho_c, U0, U, n0)
    n = n0
    while True:
        n *= 2
        cur = _simpson(rho_c, U0, U, n)
        est = abs(cur - prev) / 15.0
        if est <= tol_abs:
            refined = cur + (cur - prev) / 15.0
            return FRhoResult(
                value=leading + refined / rho_c,
                error_bound=max(est, tol_abs) / rho_abs,
                used_asymptotic=False,
                panels=n,
            )
        if 2 * n > cfg.max_panels:
            return FRhoResult(
                value=leading,
                error_bound=integral_tail_bound(beta, rho_abs, x),
                used_asymptotic=True,
                panels=n,
            )
        prev = cur


def smooth_prime_square_term(x: float, cfg: FormulaConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """G(x) = sqrt(x)/log x + integral_2^x dt/(sqrt(t) log^2 t), with bound.

    This is f(1/2)/2 for the real point rho = 1/2: the contribution of prime
    squares to a quadratic character's prime sum.
    """
    r = f_rho(0.5 + 0j, x, cfg)
    return r.value.real / 2.0, r.error_bound / 2.0


# ---------------------------------------------------------------------------
# direct-mode race difference
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaExplicit:
    """phi(q) (pi(x;q,a) - pi(x;q,b)) as reconstructed from a zero multiset."""

    x: float
    value: float
    zero_sum: float  # -2 Re((conj chi(a) - conj chi(b)) sum m f(rho))
    secondary_term: float  # prime-square term of the real characters
    certified_error: float  # quadrature + asymptotic bounds, zeros included
    diagnostic_error: float  # x^beta log^2 x with constant 1; NOT certified
    complex_sum: complex  # sum over the multiset of m * f(rho)
    n_zeros: int
    total_multiplicity: int
    x_prime: float
    assumed_hypotheses: tuple[str, ...]

    @property
    def imaginary_residue(self) -> float:
        """|Im| of the accumulated sum relative to its size (sanity metric)."""
        s = abs(self.complex_sum)
        return abs(self.complex_sum.imag) / s if s else 0.0


ASSUMED_HYPOTHESES = (
    "all L(s,chi) zero-free on the real segment (beta, 1): assumed, not verifiable from data",
    "supplied multiset is the complete zero set of its character in the region",
    "all other nonprincipal characters zero-free in the region",
)


def zero_term_bound(
    z: Zero, x: float, race: RacePhase, cfg: FormulaConfig = DEFAULT_CONFIG
) -> float:
    """Certified bound on the |contribution| of one zero to delta_explicit:
    2 |chi(a)-chi(b)| m (|x^rho/(rho log x)| + integral bound)."""
    beta, gamma = _as_complex_rho(z)
    rho_abs = abs(complex(beta, gamma))
    lead = (x**beta) / (rho_abs * math.log(x))
    return 2.0 * race.magnitude * z.multiplicity * (
        lead + integral_tail_bound(beta, rho_abs, x)
    )


def delta_explicit(
    x: float,
    race: RacePhase,
    zs: ZeroMultiset,
    cfg: FormulaConfig = DEFAULT_CONFIG,
    table: CharacterTable | None = None,
    include_prime_square_term: bool = True,
    x_prime: float | None = None,
) -> DeltaExplicit:
    """Evaluate the explicit-formula reconstruction of phi(q) D(x).

    The zero sum alone is a pure oscillation: the constant Chebyshev-bias
    component of the race (prime squares of the real characters) sits in the
    formula's x^beta log^2 x error term, and without it the sign of the
    reconstruction tracks the sign of the oscillation, not of D(x). The
    secondary term -sum_{chi real, nonprincipal} (chi(a)-chi(b)) G(x) restores
    it and is reported separately; pass include_prime_square_term=False for
    the bare zero sum.
    """
    if x < 4.0:
        raise DomainError(f"x must be >= 4, got {x}")
    if x_prime is None:
        cut = cfg.x_prime_rule(x) if cfg.x_prime_rule is not None else x
    else:
        cut = x_prime
    if cut < x:
        raise DomainError(f"x_prime must be >= x, got {cut} < {x}")
    used = zs.truncate(cut)

    coef = race.coefficient()
    acc = 0j
    certified = 0.0
    for z in used:
        r = f_rho(z, x, cfg)
        acc += z.multiplicity * r.value
        certified += 2.0 * race.magnitude * z.multiplicity * r.error_bound
    zero_sum = -2.0 * (coef * acc).real

    secondary = 0.0
    if include_prime_square_term:
        tab = table if table is not None else build_character_table(race.q)
        g, g_err = smooth_prime_square_term(x, cfg)
        for chi in tab.real_nonprincipal():
            d = chi(race.a).real - chi(race.b).real  # values are exactly +-1
            coeff = round(d)
            secondary += -coeff * g
            certified += abs(coeff) * g_err

    beta_cut = cfg.beta_cut
    if beta_cut is None:
        beta_cut = max(0.5, min((z.beta for z in used), default=0.5))
    diagnostic = x**beta_cut * math.log(x) ** 2

    return DeltaExplicit(
        x=x,
        value=zero_sum + secondary,
        zero_sum=zero_sum,
        secondary_term=secondary,
        certified_error=certified,
        diagnostic_error=diagnostic,
        complex_sum=acc,
        n_zeros=len(used),
        total_multiplicity=used.total_multiplicity(),
        x_prime=cut,
        assumed_hypotheses=ASSUMED_HYPOTHESES,
    )


# ---------------------------------------------------------------------------
# log-space mode: the hypothetical main term
# ---------------------------------------------------------------------------


def level_index(x_log: float) -> int:
    """J(x) = floor((log x)^{1/16}), the level dominating the main term."""
    if x_log <= 0:
        raise DomainError(f"x_log must be positive, got {x_log}")
    return int(x_log ** (1.0 / 16.0))


def in_window_levels(c: HypotheticalConstruction, x_log: float) -> list[int]:
    """Levels summed by the main term: |j - J| <= J^(3/4) intersected with the
    construction's range (paper mode); every level in scale mode, where the
    growth law makes the J-window meaningless."""
    if not c.is_paper_exact:
        return list(c.levels())
    J = level_index(x_log)
    if J < 1:
        return []
    w = J**0.75
    return [j for j in c.levels() if abs(j - J) <= w]


def default_x_prime_log(c: HypotheticalConstruction, x_log: float) -> float:
    """log of x' = max(x, max{j^3 gamma_j : gamma_j <= x})."""
    best = x_log
    for j in c.levels():
        lg = c.log_gamma_of(j)
        if lg <= x_log:
            best = max(best, 3.0 * math.log(j) + lg)
    return best


@dataclass(frozen=True)
class LevelTerm:
    j: int
    L: int
    log_prefactor: float  # log of 2 |chi(a)-chi(b)| x^(sigma-delta_j)/(gamma_j log x)
    fejer_value: float
    included: bool
    note: str = ""


@dataclass(frozen=True)
class HypotheticalMainTerm:
    x_log: float
    J: int
    value: SignedLogValue
    levels: tuple[LevelTerm, ...] = field(repr=False)


def delta_main_hypothetical(
    x_log: float,
    c: HypotheticalConstruction,
    race: RacePhase,
    max_bits: int = DEFAULT_MAX_BITS,
) -> HypotheticalMainTerm:
    """Main term

        2 |chi(a) - chi(b)| * sum over window of
            x^(sigma - delta_j) / (gamma_j log x) * F_{gamma_j, j^3}(x)

    computed entirely in log space. Phases gamma_j * log x are reduced mod
    2*pi at whatever precision their size demands (PrecisionError if the cap
    is insufficient); each term's magnitude is a SignedLogValue exponent, so
    x may be far beyond double range. Levels above the height cut
    (gamma_j > x) are excluded and flagged.
    """
    if x_log <= 0.0:
        raise DomainError(f"x_log must be positive, got {x_log}")
    J = level_index(x_log)
    window = set(in_window_levels(c, x_log))
    terms: list[SignedLogValue] = []
    details: list[LevelTerm] = []
    log_2mag = math.log(2.0 * race.magnitude)
    for j in c.levels():
        L = j**3
        lg = c.log_gamma_of(j)
        log_pref = log_2mag + (c.sigma - c.delta_of(j)) * x_log - lg - math.log(x_log)
        if j not in window:
            details.append(LevelTerm(j, L, log_pref, math.nan, False, "outside J-window"))
            continue
        if lg > x_log:
            details.append(
                LevelTerm(j, L, log_pref, math.nan, False, "gamma_j above height x")
            )
            continue
        theta = reduce_angle(lg, x_log, max_bits)
        F = weighted_cos_sum(L, theta)
        details.append(LevelTerm(j, L, log_pref, F, True))
        if F != 0.0:
            terms.append(
                SignedLogValue(
                    log_magnitude=log_pref + math.log(abs(F)),
                    sign=1 if F > 0 else -1,
                )
            )
    return HypotheticalMainTerm(
        x_log=x_log, J=J, value=signed_log_sum(terms), levels=tuple(details)
    )


# ---------------------------------------------------------------------------
# log-space diagnostics backing the asymptotic-regime property checks
# ---------------------------------------------------------------------------


def level_log_magnitudes(c: HypotheticalConstruction, x_log: float) -> dict[int, float]:
    """log(x^{-delta_j} / gamma_j) per level: the level-size profile in j."""
    return {j: -c.delta_of(j) * x_log - c.log_gamma_of(j) for j in c.levels()}


@dataclass(frozen=True)
class DeviationCheck:
    j: int
    is_far: bool  # j <= J/2, j >= 3J/2, or |j - J| > J^(3/4)
    log_weighted_magnitude: float  # level magnitude including its weight total
    log_allowance: float  # log of exp(-(log x)^(1/3)) * x^{-delta_J}/gamma_J
    margin: float  # allowance - magnitude; >= 0 means the bound holds


def deviation_checks(c: HypotheticalConstruction, x_log: float) -> list[DeviationCheck]:
    """Per-level comparison against the far-level suppression bound.

    A far level's whole weighted contribution, x^{-delta_j}/gamma_j times
    the weight total j^3(j^3+1)/2, must be exp(-(log x)^(1/3)) times smaller
    than the J-level magnitude x^{-delta_J}/gamma_J.
    """
    J = level_index(x_log)
    if J < 1:
        return []
    # J may lie outside the construction's explicit range; use the selectors
    # where available, the default laws otherwise
    if c.j_min <= J <= c.j_max:
        log_J_mag = -c.delta_of(J) * x_log - c.log_gamma_of(J)
    else:
        log_J_mag = -(float(J) ** -8) * x_log - (float(J) ** 8 + math.log(1.5))
    allowance = log_J_mag - x_log ** (1.0 / 3.0)
    out = []
    for j in c.levels():
        weight_total = j**3 * (j**3 + 1) // 2
        lm = -c.delta_of(j) * x_log - c.log_gamma_of(j) + math.log(weight_total)
        far = j <= J / 2.0 or j >= 1.5 * J or abs(j - J) > J**0.75
        out.append(
            DeviationCheck(
                j=j,
                is_far=far,
                log_weighted_magnitude=lm,
                log_allowance=allowance,
                margin=allowance - lm,
            )
        )
    return out


def maximum_residual(c: HypotheticalConstruction, x_log: float) -> tuple[float, float]:
    """Residual of log(x^{-delta_J}/gamma_J) against -2 sqrt(log x), and the
    (log x)^{7/16} scale it must stay within (implied constant bound)."""
    J = level_index(x_log)
    if c.j_min <= J <= c.j_max:
        lhs = -c.delta_of(J) * x_log - c.log_gamma_of(J)
    else:
        lhs = -(float(J) ** -8) * x_log - (float(J) ** 8 + math.log(1.5))
    residual = lhs + 2.0 * math.sqrt(x_log)
    return residual, x_log ** (7.0 / 16.0)
