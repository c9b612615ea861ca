import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primerace import DomainError, build_character_table, select_race_character
from primerace.characters import euler_phi, orthogonality_sum

from oracles import hom_characters


def test_q3_unique_quadratic_character():
    t = build_character_table(3)
    assert t.phi == 2
    chi = t.nonprincipal()[0]
    assert chi.angle(2) == Fraction(1, 2)  # chi(2) = -1
    assert chi(2) == pytest.approx(-1.0)


def test_q4_nonprincipal():
    t = build_character_table(4)
    assert t.phi == 2
    chi = t.nonprincipal()[0]
    assert chi.angle(3) == Fraction(1, 2)
    assert chi.angle(9) == Fraction(0)  # 9 = 1 mod 4
    assert chi.angle(4) is None and chi(4) == 0j


def test_q5_has_order_four_character():
    t = build_character_table(5)
    assert t.phi == 4
    quarter = [c for c in t.characters if c.angle(2) == Fraction(1, 4)]
    assert len(quarter) == 1
    chi = quarter[0]
    # 3 = 2^3 mod 5, so chi(3) = i^3 = -i
    assert chi.angle(3) == Fraction(3, 4)


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 12, 15, 16, 24, 21, 945])
def test_table_size_and_principal(q):
    t = build_character_table(q)
    assert t.phi == euler_phi(q)
    assert sum(c.is_principal for c in t.characters) == 1
    assert t.characters[0].is_principal
    assert math.prod(order for _, order in t.group_decomposition) == t.phi


@pytest.mark.parametrize("q", [5, 8, 12])
def test_brute_force_homomorphism_match(q):
    """The table must coincide with the set of all multiplicative maps."""
    t = build_character_table(q)
    units = [n for n in range(1, q) if math.gcd(n, q) == 1]
    ours = {tuple(sorted((u, c.angle(u)) for u in units)) for c in t.characters}
    brute = {tuple(sorted(c.items())) for c in hom_characters(q)}
    assert ours == brute


@given(
    q=st.integers(min_value=3, max_value=60),
    m=st.integers(min_value=1, max_value=400),
    n=st.integers(min_value=1, max_value=400),
)
@settings(max_examples=150, deadline=None)
def test_complete_multiplicativity(q, m, n):
    t = build_character_table(q)
    for chi in t.characters:
        am, an, amn = chi.angle(m), chi.angle(n), chi.angle(m * n)
        if math.gcd(m * n, q) != 1:
            assert amn is None
        else:
            assert amn == (am + an) % 1


def test_periodicity_and_one():
    t = build_character_table(12)
    for chi in t.characters:
        assert chi.angle(1) == Fraction(0)
        for n in range(1, 30):
            assert chi.angle(n) == chi.angle(n + 12 * 7)


@pytest.mark.parametrize("q", range(3, 201))
def test_orthogonality_exact_all_q_to_200(q):
    t = build_character_table(q)
    units = [n for n in range(1, q) if math.gcd(n, q) == 1]
    a = units[len(units) // 2]
    for n in units[:6] + [q, a]:
        s = orthogonality_sum(t, a, n)
        if math.gcd(n, q) == 1 and n % q == a % q:
            assert s == t.phi
        else:
            assert s == 0


def test_race_phase_mod4():
    t = build_character_table(4)
    rp = select_race_character(t, 3, 1)
    assert rp.xi == pytest.approx(math.pi)
    assert rp.magnitude == pytest.approx(2.0)
    # e^{i xi} * magnitude = chi(a) - chi(b)
    val = cmath.exp(1j * rp.xi) * rp.magnitude
    assert abs(val - (-2.0)) < 1e-12


def test_race_phase_mod3():
    t = build_character_table(3)
    rp = select_race_character(t, 2, 1)
    assert rp.xi == pytest.approx(math.pi)
    assert rp.magnitude == pytest.approx(2.0)


def test_race_phase_mod5_quarter_turn():
    t = build_character_table(5)
    rp = select_race_character(t, 2, 3)
    # the selected chi has chi(2) = +-i, so chi(2) - chi(3) = +-2i
    assert rp.magnitude == pytest.approx(2.0)
    assert rp.xi == pytest.approx(math.pi / 2) or rp.xi == pytest.approx(3 * math.pi / 2)
    chi = t.characters[rp.chi_index]
    want = chi(2) - chi(3)
    assert abs(cmath.exp(1j * rp.xi) * rp.magnitude - want) < 1e-12


def test_race_phase_determinism_and_invariant():
    for q, a, b in [(4, 3, 1), (5, 2, 3), (12, 5, 7), (7, 3, 5), (8, 3, 5)]:
        t = build_character_table(q)
        first = select_race_character(t, a, b)
        for _ in range(3):
            again = select_race_character(t, a, b)
            assert again.chi_index == first.chi_index
        chi = t.characters[first.chi_index]
        assert not chi.is_principal
        assert abs(
            cmath.exp(1j * first.xi) * first.magnitude - (chi(a) - chi(b))
        ) < 1e-12


def test_race_phase_override():
    t = build_character_table(5)
    default = select_race_character(t, 2, 3)
    other = [
        c.index
        for c in t.nonprincipal()
        if c.angle(2) != c.angle(3) and c.index != default.chi_index
    ]
    assert other  # several characters separate 2 and 3 mod 5
    rp = select_race_character(t, 2, 3, chi_index=other[0])
    assert rp.chi_index == other[0]


def test_validation_errors():
    with pytest.raises(DomainError):
        build_character_table(2)
    t = build_character_table(4)
    with pytest.raises(DomainError):
        select_race_character(t, 3, 3)
    with pytest.raises(DomainError):
        select_race_character(t, 2, 1)  # gcd(2,4) != 1
    with pytest.raises(DomainError):
        select_race_character(t, 3, 7)  # 7 = 3 mod 4
