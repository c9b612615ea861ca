import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primerace import DomainError, FejerParams, fejer_closed, fejer_direct, sublevel_measure
from primerace.fejer import (
    omega_membership,
    superlevel_theta_intervals,
    weighted_cos_sum,
    write_density_sweep_csv,
    x_measure_of_theta_set,
)
from primerace.zeros import HypotheticalConstruction

from oracles import fejer_reference

TWO_PI = 2 * math.pi


def test_theta_zero_gives_max():
    for L in (4, 16, 64, 256):
        p = FejerParams(gamma=1.0, L=L)
        assert fejer_direct(p, 0.0) == pytest.approx(L * (L - 1) / 2)
        assert fejer_closed(p, 0.0) == pytest.approx(L * (L - 1) / 2)


def test_theta_pi_L4():
    p = FejerParams(gamma=1.0, L=4)
    assert fejer_direct(p, math.pi) == pytest.approx(-2.0)
    assert fejer_closed(p, math.pi) == pytest.approx(-2.0, abs=1e-10)


def test_closed_matches_direct_at_point():
    p = FejerParams(gamma=1.0, L=64)
    assert abs(fejer_direct(p, 0.7) - fejer_closed(p, 0.7)) < 1e-10


def test_direct_closed_grid_invariant():
    """1e5-point theta grid, five L values, tolerance 1e-8 L^2."""
    thetas = np.linspace(0.0, TWO_PI, 100_000, endpoint=False)
    for L in (4, 16, 64, 256, 1024):
        k = np.arange(1, L, dtype=np.float64)
        w = L - k
        worst = 0.0
        from primerace.fejer import _closed_vec

        closed = _closed_vec(L, thetas)
        for start in range(0, len(thetas), 10_000):
            block = thetas[start : start + 10_000]
            direct = np.cos(np.outer(block, k)) @ w
            worst = max(worst, float(np.max(np.abs(direct - closed[start : start + 10_000]))))
        assert worst <= 1e-8 * L * L


def test_against_fsum_reference():
    for L in (5, 33, 128):
        for theta in (0.1, 1.0, 2.5, 3.14159, 6.2):
            assert weighted_cos_sum(L, theta) == pytest.approx(
                fejer_reference(L, theta), abs=1e-9 * L * L
            )


def test_lower_bound_and_mean():
    rng = np.random.default_rng(7)
    for L in (4, 16, 64, 256, 1024):
        from primerace.fejer import _closed_vec

        theta = rng.uniform(0, TWO_PI, 20_000)
        vals = _closed_vec(L, theta)
        assert float(np.min(vals)) >= -L / 2 - 1e-9 * L * L
        grid = np.linspace(0, TWO_PI, 1_000_000, endpoint=False)
        mean = float(np.mean(_closed_vec(L, grid)))
        assert abs(mean) <= 1e-6 * L * L


def test_minimum_attained_at_node_gaps():
    # global minimum -L/2 exactly where sin(L theta/2) = 0, sin(theta/2) != 0
    L = 64
    for n in (1, 7, 31):
        theta = TWO_PI * n / L
        assert weighted_cos_sum(L, theta) == pytest.approx(-L / 2, abs=1e-6)


def test_superlevel_band_epsilon():
    """Points with F >= -L/4 lie within ||theta/2pi|| <= 1/sqrt(2L)."""
    from primerace.fejer import _closed_vec

    for L in (16, 64, 256, 1024):
        eps = 1.0 / math.sqrt(2 * L)
        theta = np.linspace(0, TWO_PI, 200_001)
        vals = _closed_vec(L, theta)
        frac = theta / TWO_PI
        dist = np.minimum(frac % 1.0, 1.0 - frac % 1.0)
        assert float(np.max(dist[vals >= -L / 4])) <= eps + 1e-9


def test_superlevel_intervals_match_scan():
    for L, T in [(16, -4.0), (64, -16.0), (256, 100.0), (64, 500.0)]:
        iv = superlevel_theta_intervals(L, T)
        theta = np.linspace(1e-9, TWO_PI - 1e-9, 400_001)
        from primerace.fejer import _closed_vec

        inside_scan = _closed_vec(L, theta) >= T
        inside_iv = np.zeros_like(inside_scan)
        for a, b in iv:
            inside_iv |= (theta >= a) & (theta <= b)
        # disagreement only within bisection tolerance of a boundary
        bad = theta[inside_scan != inside_iv]
        for t in bad:
            assert min(abs(t - e) for a, b in iv for e in (a, b)) < 1e-6


def test_params_validation():
    with pytest.raises(DomainError):
        FejerParams(gamma=0.5, L=16)
    with pytest.raises(DomainError):
        FejerParams(gamma=2.0, L=3)


def test_measure_threshold_extremes():
    p = FejerParams(gamma=10.0, L=64)
    at_max = sublevel_measure(p, 1e4, 64 * 63 / 2)
    assert at_max.measure == pytest.approx(0.0, abs=1e-6)
    below_min = sublevel_measure(p, 1e4, -64 / 2 - 1)
    assert below_min.measure == pytest.approx(1e4 - 1)
    assert below_min.density == pytest.approx((1e4 - 1) / 1e4)


def test_measure_methods_agree():
    p = FejerParams(gamma=10.0, L=256)
    r = sublevel_measure(p, 1e4, -64.0, method="both")
    assert r.method == "analytic-intervals"
    grid = sublevel_measure(p, 1e4, -64.0, method="adaptive-grid")
    assert abs(r.measure - grid.measure) <= r.error_bound + grid.error_bound


def test_measure_against_brute_midpoints():
    from primerace.fejer import _closed_vec

    gamma, L, X, T = 10.0, 256, 1e4, -64.0
    r = sublevel_measure(FejerParams(gamma=gamma, L=L), X, T)
    mids = np.linspace(1.0, X, 4_000_000)
    ind = _closed_vec(L, np.mod(gamma * np.log(mids), TWO_PI)) >= T
    brute = float(np.mean(ind)) * (X - 1.0)
    assert r.measure == pytest.approx(brute, abs=0.05)


def test_density_bound_example():
    r = sublevel_measure(FejerParams(gamma=10.0, L=256), 1e4, -64.0)
    assert r.density <= 2.5 / math.sqrt(256)


def test_theta_interval_image_measure():
    """x-measure of a theta-interval of half-width eps around 0 is <= C eps X
    with the geometric-series constant C = 2 e^{(2pi+eps)/gamma} / (gamma (1 - e^{-2pi/gamma}))."""
    X = 1e4
    for gamma in (2.0, 10.0):
        for eps in (0.01, 0.1, 0.3):
            m, _ = x_measure_of_theta_set([(0.0, eps), (TWO_PI - eps, TWO_PI)], gamma, X)
            C = 2.0 * math.exp((TWO_PI + eps) / gamma) / (gamma * (1 - math.exp(-TWO_PI / gamma)))
            assert m <= C * eps * X


@given(
    L=st.sampled_from([4, 8, 16, 64, 257]),
    theta=st.floats(min_value=0.0, max_value=TWO_PI, allow_nan=False),
)
@settings(max_examples=200, deadline=None)
def test_property_direct_equals_closed(L, theta):
    p = FejerParams(gamma=1.0, L=L)
    assert abs(fejer_direct(p, theta) - fejer_closed(p, theta)) <= 1e-8 * L * L


def test_omega_membership_single_level():
    c = HypotheticalConstruction.single_level(gamma=5.0, L=1000, sigma=0.75, delta=0.1, xi=math.pi)
    # theta = pi: F at its minimum, deeply below -L/4
    assert omega_membership(c, math.pi / 5.0, (10.0, 10.0))
    # theta = 0 (mod 2pi): F at its maximum
    assert not omega_membership(c, TWO_PI / 5.0, (10.0, 10.0))
    # empty window: vacuous membership
    assert omega_membership(c, TWO_PI / 5.0, (11.0, 12.0))


def test_sweep_csv(tmp_path):
    rows = [
        sublevel_measure(FejerParams(gamma=10.0, L=L), 1e3, -L / 4.0) for L in (16, 64)
    ]
    path = tmp_path / "sweep.csv"
    write_density_sweep_csv(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "L,gamma,X,density,method,err"
    assert len(lines) == 3
    assert lines[1].startswith("16,10.0,1000.0,")
