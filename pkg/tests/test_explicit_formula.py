import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from primerace import (
    DomainError,
    FormulaConfig,
    HypotheticalConstruction,
    PrecisionError,
    RacePhase,
    Zero,
    ZeroMultiset,
    build_character_table,
    delta_explicit,
    delta_main_hypothetical,
    f_rho,
    load_zeros,
    select_race_character,
)
from primerace.explicit_formula import (
    default_x_prime_log,
    deviation_checks,
    in_window_levels,
    integral_tail_bound,
    level_index,
    level_log_magnitudes,
    maximum_residual,
    smooth_prime_square_term,
    zero_term_bound,
)
from primerace.fejer import weighted_cos_sum
from primerace.phase import reduce_angle

RACE4 = RacePhase(q=4, a=3, b=1, chi_index=1, xi=math.pi, magnitude=2.0)


def mp_f_rho(beta: float, gamma: float, x: float) -> complex:
    """High-precision oracle for f(rho) via mpmath quadrature on u = log t."""
    rho = mp.mpc(beta, gamma)
    U, u0 = mp.log(x), mp.log(2)
    periods = max(int(abs(gamma) * float(U - u0) / (2 * math.pi)) + 1, 1)
    pts = mp.linspace(u0, U, min(40 * periods, 40_000))
    integral = mp.quad(lambda u: mp.e ** (rho * u) / u**2, pts)
    val = mp.e ** (rho * U) / (rho * U) + integral / rho
    return complex(val)


def test_leading_term_magnitude_example():
    z = Zero(beta=0.5, log_gamma=math.log(14.13))
    r = f_rho(z, 1e4)
    lead = abs(complex(0.5, 14.13))
    assert 1e4**0.5 / (lead * math.log(1e4)) == pytest.approx(0.7680, abs=2e-4)
    want = mp_f_rho(0.5, 14.13, 1e4)
    assert abs(r.value - want) < 1e-8
    assert r.error_bound < 1e-9


@pytest.mark.parametrize("gamma,x", [(6.02, 1e3), (50.0, 1e5), (155.0, 1e6)])
def test_f_rho_against_mpmath(gamma, x):
    z = Zero(beta=0.5, log_gamma=math.log(gamma))
    r = f_rho(z, x)
    want = mp_f_rho(0.5, gamma, x)
    assert abs(r.value - want) <= 1e-7 * abs(want) + 1e-9


def test_f_rho_real_rho_positive():
    for x in (4.0, 100.0, 1e6):
        r = f_rho(0.5 + 0j, x)
        assert r.value.imag == 0.0
        assert r.value.real > 0.0


def test_f_rho_domain():
    with pytest.raises(DomainError):
        f_rho(0.5 + 10j, 3.9)
    with pytest.raises(DomainError):
        f_rho(Zero(beta=0.6, log_gamma=800.0), 100.0)
    with pytest.raises(DomainError):
        f_rho(0j, 10.0)


def test_integral_bound_is_honest_at_moderate_rho():
    """The certified bound must dominate the actual integral term."""
    for gamma in (100.0, 1_000.0, 10_000.0):
        for x in (1e4, 1e6):
            for beta in (0.5, 0.75):
                z = Zero(beta=beta, log_gamma=math.log(gamma))
                r = f_rho(z, x)
                assert not r.used_asymptotic
                lead = (x**beta) * cmath.exp(
                    1j * reduce_angle(math.log(gamma), math.log(x))
                ) / (complex(beta, gamma) * math.log(x))
                actual_integral = abs(r.value - lead)
                assert actual_integral <= integral_tail_bound(beta, abs(complex(beta, gamma)), x)


def test_asymptotic_regime_constant_four():
    """At |rho| = 1e6 the dropped term obeys the 4 x^beta/(|rho|^2 log^2 x)
    shape for x in the large-x regime; the endpoint-series oracle evaluates
    the true integral to certified accuracy."""
    gamma = 1e6
    for x in (1e4, 1e6):
        beta = 0.5
        rho = complex(beta, gamma)
        U, u0 = math.log(x), math.log(2.0)
        # three integrations by parts: endpoint series with a tiny remainder
        def ends(m):
            cU = cmath.exp(rho * U) / (rho * U**m)
            c0 = cmath.exp(rho * u0) / (rho * u0**m)
            return cU - c0

        series = ends(2) + (2 / rho) * ends(3) + (6 / rho**2) * ends(4)
        rem = (24 / abs(rho) ** 3) * (x**beta) * (U - u0) / u0**5  # crude, tiny
        val = abs(series / rho)
        bound4 = 4 * x**beta / (abs(rho) ** 2 * U**2)
        assert val + rem / abs(rho) <= bound4
        assert integral_tail_bound(beta, abs(rho), x) <= bound4
        r = f_rho(Zero(beta=beta, log_gamma=math.log(gamma)), x)
        assert r.used_asymptotic
        assert r.error_bound <= bound4


def test_asymptotic_bound_vs_quadrature_at_switch():
    """Just below the threshold quadrature runs; its integral term must obey
    the bound that the asymptotic path would have certified."""
    gamma = 2e4
    x = 1e4
    z = Zero(beta=0.5, log_gamma=math.log(gamma))
    r = f_rho(z, x)
    assert not r.used_asymptotic
    lead = (x**0.5) * cmath.exp(1j * reduce_angle(math.log(gamma), math.log(x))) / (
        complex(0.5, gamma) * math.log(x)
    )
    assert abs(r.value - lead) <= integral_tail_bound(0.5, abs(complex(0.5, gamma)), x)


def test_smooth_prime_square_term_value():
    """G(x) = sqrt(x)/log x + integral; check against mpmath."""
    for x in (1e3, 1e5):
        g, err = smooth_prime_square_term(x)
        want = mp.sqrt(x) / mp.log(x) + mp.quad(
            lambda t: 1 / (mp.sqrt(t) * mp.log(t) ** 2), [2, x]
        )
        assert g == pytest.approx(float(want), rel=1e-8)
        assert err < 1e-6 * g


def test_delta_explicit_empty_multiset():
    t = build_character_table(4)
    empty = ZeroMultiset.from_zeros([])
    de = delta_explicit(1e4, RACE4, empty, table=t, include_prime_square_term=False)
    assert de.value == 0.0
    assert de.zero_sum == 0.0
    assert de.diagnostic_error == pytest.approx(1e4**0.5 * math.log(1e4) ** 2)


def test_delta_explicit_multiplicity_linearity():
    t = build_character_table(4)
    z1 = ZeroMultiset.from_zeros([Zero(0.5, math.log(6.0209), 1)])
    z5 = ZeroMultiset.from_zeros([Zero(0.5, math.log(6.0209), 5)])
    a = delta_explicit(1e4, RACE4, z1, table=t, include_prime_square_term=False)
    b = delta_explicit(1e4, RACE4, z5, table=t, include_prime_square_term=False)
    assert b.zero_sum == pytest.approx(5 * a.zero_sum, rel=1e-12)
    doubled = ZeroMultiset.from_zeros([Zero(0.5, math.log(6.0209), 2)])
    d = delta_explicit(1e4, RACE4, doubled, table=t, include_prime_square_term=False)
    assert d.zero_sum == pytest.approx(2 * a.zero_sum, rel=1e-12)


def test_delta_explicit_value_is_real_and_matches_manual(chi4_zeros_path):
    zs = load_zeros(chi4_zeros_path)
    t = build_character_table(4)
    race = select_race_character(t, 3, 1)
    de = delta_explicit(1e4, race, zs, table=t, include_prime_square_term=False)
    manual = 0j
    for z in zs:
        manual += z.multiplicity * f_rho(z, 1e4).value
    want = -2.0 * (race.coefficient() * manual).real
    assert isinstance(de.value, float)
    assert de.zero_sum == pytest.approx(want, rel=1e-9)
    # accumulated complex sum matches within rounding
    assert abs(de.complex_sum - manual) <= 1e-9 * abs(manual)


def test_delta_explicit_secondary_sign_fix(chi4_zeros_path):
    """At x = 1e5 the true race value is +25 (phi(4) D = 50); the bare zero
    sum has the wrong sign and the prime-square term repairs it."""
    zs = load_zeros(chi4_zeros_path)
    t = build_character_table(4)
    race = select_race_character(t, 3, 1)
    de = delta_explicit(1e5, race, zs, table=t)
    assert de.zero_sum < 0
    assert de.secondary_term > 0
    assert de.value > 0  # sign of true phi(4) D(1e5) = +50
    assert de.value == de.zero_sum + de.secondary_term


def test_delta_explicit_truncation_monotone(chi4_zeros_path):
    zs = load_zeros(chi4_zeros_path)
    t = build_character_table(4)
    race = select_race_character(t, 3, 1)
    x = 1e4
    small = zs.truncate(50.0)
    added = [z for z in zs if z.gamma > 50.0]
    a = delta_explicit(x, race, small, table=t, include_prime_square_term=False)
    b = delta_explicit(x, race, zs, table=t, include_prime_square_term=False)
    allowance = sum(zero_term_bound(z, x, race) for z in added)
    assert abs(b.zero_sum - a.zero_sum) <= allowance
    # truncation rule: x' < x is rejected, gamma > x' zeros are dropped
    with pytest.raises(DomainError):
        delta_explicit(x, race, zs, table=t, x_prime=100.0)
    de = delta_explicit(200.0, race, zs, table=t, x_prime=200.0)
    assert de.n_zeros == sum(1 for z in zs if z.gamma <= 200.0)


def test_assumed_hypotheses_recorded(chi4_zeros_path):
    zs = load_zeros(chi4_zeros_path)
    de = delta_explicit(1e4, RACE4, zs)
    assert any("zero-free" in h for h in de.assumed_hypotheses)


# ---------------------------------------------------------------------------
# log-space main term
# ---------------------------------------------------------------------------


def _c7_construction():
    def delta_sel(j):
        return 0.2 if j == 1 else float(j) ** -8

    return HypotheticalConstruction(
        xi=math.pi, sigma=0.8, delta=0.25, A=1.0, j_min=1, j_max=2, delta_of=delta_sel
    )


def test_level_index():
    assert level_index(65536.0) == 2
    assert level_index(23.0) == 1
    assert level_index(43046721.0) == 3


def test_in_window_levels():
    c = _c7_construction()
    assert in_window_levels(c, 65536.0) == [1, 2]
    sl = HypotheticalConstruction.single_level(gamma=5.0, L=1000, sigma=0.75, delta=0.1, xi=math.pi)
    assert in_window_levels(sl, 23.0) == [10]  # scale mode: all levels


def test_x_prime_rule():
    c = _c7_construction()
    lg2 = 2.0**8 + math.log(1.5)
    want = max(65536.0, 3 * math.log(2) + lg2, 3 * math.log(1) + 1 + math.log(1.5))
    assert default_x_prime_log(c, 65536.0) == pytest.approx(want)
    # x below every gamma: x' = x
    sl = HypotheticalConstruction.single_level(gamma=100.0, L=8, sigma=0.75, delta=0.1, xi=math.pi)
    assert default_x_prime_log(sl, 1.0) == 1.0


def test_main_term_single_level_sign_equals_fejer_sign():
    sl = HypotheticalConstruction.single_level(gamma=5.0, L=1000, sigma=0.75, delta=0.1, xi=math.pi)
    for x_log in (11.5, 17.3, 23.0, 9.1):
        mt = delta_main_hypothetical(x_log, sl, RACE4)
        F = weighted_cos_sum(1000, reduce_angle(math.log(5.0), x_log))
        if F != 0.0:
            assert mt.value.sign == (1 if F > 0 else -1)


def test_main_term_constructed_minimum():
    """x_log placed so that gamma * x_log = pi (mod 2pi) exactly: F at its
    minimum. x_log = pi gives gamma x_log = 5 pi and keeps x above the
    level height gamma."""
    sl = HypotheticalConstruction.single_level(gamma=5.0, L=1000, sigma=0.75, delta=0.1, xi=math.pi)
    x_log = math.pi
    mt = delta_main_hypothetical(x_log, sl, RACE4)
    assert mt.value.sign == -1
    F = weighted_cos_sum(1000, math.pi)
    assert F == pytest.approx(-500.0)  # -L/2 for even L
    want_log = (
        math.log(2 * RACE4.magnitude)
        + (0.75 - 0.1) * x_log
        - math.log(5.0)
        - math.log(x_log)
        + math.log(abs(F))
    )
    assert mt.value.log_magnitude == pytest.approx(want_log, abs=1e-9)


def test_log_space_consistency_with_direct_floats():
    """For representable x the SignedLogValue route equals a plain-float
    evaluation of the windowed sum to 1e-8 relative."""
    sl = HypotheticalConstruction.single_level(gamma=5.0, L=1000, sigma=0.75, delta=0.1, xi=math.pi)
    for x in (1e6, 1e10, 1e15):
        x_log = math.log(x)
        mt = delta_main_hypothetical(x_log, sl, RACE4)
        F = weighted_cos_sum(1000, math.fmod(5.0 * x_log, 2 * math.pi))
        direct = 2 * 2.0 * x**0.65 / (5.0 * x_log) * F
        assert mt.value.to_float() == pytest.approx(direct, rel=1e-8)


def test_main_term_excludes_levels_above_height():
    sl = HypotheticalConstruction.single_level(gamma=100.0, L=8, sigma=0.75, delta=0.1, xi=math.pi)
    mt = delta_main_hypothetical(1.0, sl, RACE4)  # x = e < gamma
    assert mt.value.sign == 0
    assert any("above height" in lt.note for lt in mt.levels)


def test_paper_regime_deviation_and_maximum():
    c = _c7_construction()
    x_log = 65536.0
    mags = level_log_magnitudes(c, x_log)
    assert mags[2] == pytest.approx(-(256.0 + 256.0 + math.log(1.5)))
    checks = deviation_checks(c, x_log)
    far = [d for d in checks if d.is_far]
    assert [d.j for d in far] == [1]
    assert all(d.margin >= 0 for d in far)
    residual, scale = maximum_residual(c, x_log)
    assert abs(residual) <= 10.0 * scale


def test_main_term_precision_failure():
    c = HypotheticalConstruction(
        xi=math.pi, sigma=0.8, delta=0.25, A=1.0, j_min=2, j_max=2
    )
    with pytest.raises(PrecisionError):
        delta_main_hypothetical(65536.0, c, RACE4, max_bits=128)


def test_formula_config_validation():
    with pytest.raises(DomainError):
        FormulaConfig(beta_cut=0.4)
    with pytest.raises(DomainError):
        FormulaConfig(quadrature_tol=1e-3)
