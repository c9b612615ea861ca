"""Dirichlet characters mod q with exact root-of-unity values.

Character values are stored as rational angles t (meaning e^{2 pi i t}), so
multiplicativity and orthogonality are exact integer/Fraction statements with
no float tolerances. Floats appear only at the complex-evaluation boundary
(RacePhase.xi and friends).

The unit group (Z/qZ)* is decomposed into cyclic factors: a primitive root
for each odd prime power, the factors <-1> x <5> for 2^k with k >= 3, and
<-1> for 4. Characters are indexed lexicographically by their exponent
vector on the generators; index 0 is the principal character.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

MAX_Q = 10**7
TWO_PI = 2.0 * math.pi


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division; fine for n <= 10^7."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    return math.prod((p - 1) * p ** (e - 1) for p, e in factorize(n))


def _primitive_root_mod_prime(p: int) -> int:
    if p == 2:
        return 1
    factors = [f for f, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    raise AssertionError(f"no primitive root mod prime {p}")


def _primitive_root_mod_odd_prime_power(p: int, e: int) -> int:
    g = _primitive_root_mod_prime(p)
    if e == 1:
        return g
    # g lifts to p^e unless g^(p-1) == 1 (mod p^2); then g + p does
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class _CyclicFactor:
    """One cyclic factor of (Z/qZ)*: generator (mod q), its order, and a
    discrete-log table indexed by residue mod the local prime power."""

    generator: int
    order: int
    local_modulus: int
    dlog: np.ndarray  # dlog[n % local_modulus] = exponent, -1 for non-units

    def exponent_of(self, n: int) -> int:
        e = int(self.dlog[n % self.local_modulus])
        assert e >= 0, f"{n} is not a unit mod {self.local_modulus}"
        return e


def _dlog_table(g: int, order: int, modulus: int) -> np.ndarray:
    table = np.full(modulus, -1, dtype=np.int64)
    acc = 1
    for k in range(order):
        table[acc] = k
        acc = (acc * g) % modulus
    return table


def _two_adic_dlog_tables(e: int) -> tuple[np.ndarray, np.ndarray]:
    """Joint discrete logs mod 2^e (e >= 3): n = (-1)^a * 5^b with a in {0,1},
    b in [0, 2^(e-2)). The group is a product, so neither generator's powers
    alone cover the units; both exponents are filled in one sweep."""
    pe = 1 << e
    half_order = 1 << (e - 2)
    t_neg = np.full(pe, -1, dtype=np.int64)
    t_five = np.full(pe, -1, dtype=np.int64)
    for a in (0, 1):
        acc = pe - 1 if a else 1
        for b in range(half_order):
            t_neg[acc] = a
            t_five[acc] = b
            acc = (acc * 5) % pe
    return t_neg, t_five


def _crt_lift(local_g: int, local_mod: int, q: int) -> int:
    """Element of (Z/qZ)* congruent to local_g mod local_mod and 1 mod q/local_mod."""
    other = q // local_mod
    if other == 1:
        return local_g % q
    inv = pow(other, -1, local_mod)
    return (1 + other * inv * (local_g - 1)) % q


def _unit_group_factors(q: int) -> list[_CyclicFactor]:
    factors: list[_CyclicFactor] = []
    for p, e in factorize(q):
        pe = p**e
        if p == 2:
            if e == 1:
                continue  # trivial factor
            if e == 2:
                gens = [(pe - 1, 2, _dlog_table(pe - 1, 2, pe))]  # -1 mod 4
            else:
                t_neg, t_five = _two_adic_dlog_tables(e)
                gens = [(pe - 1, 2, t_neg), (5, 2 ** (e - 2), t_five)]
        else:
            g = _primitive_root_mod_odd_prime_power(p, e)
            order = (p - 1) * p ** (e - 1)
            gens = [(g, order, _dlog_table(g, order, pe))]
        for local_g, order, table in gens:
            factors.append(
                _CyclicFactor(
                    generator=_crt_lift(local_g, pe, q),
                    order=order,
                    local_modulus=pe,
                    dlog=table,
                )
            )
    return factors


@dataclass(frozen=True)
class Character:
    """One Dirichlet character, given by its exponents on the group generators.

    angle(n) is the exact rational t in [0,1) with chi(n) = e^{2 pi i t},
    or None when gcd(n, q) > 1 (the zero of the character).
    """

    q: int
    index: int
    exponents: tuple[int, ...]
    _factors: tuple[_CyclicFactor, ...]

    @property
    def is_principal(self) -> bool:
        return all(c == 0 for c in self.exponents)

    def angle(self, n: int) -> Fraction | None:
        n %= self.q
        if math.gcd(n, self.q) != 1:
            return None
        t = Fraction(0)
        for c, fac in zip(self.exponents, self._factors):
            t += Fraction(c * fac.exponent_of(n), fac.order)
        return t % 1

    def __call__(self, n: int) -> complex:
        t = self.angle(n)
        if t is None:
            return 0j
        return cmath.exp(2j * math.pi * float(t))


def char_value(chi: Character, n: int) -> complex:
    """chi(n) as a complex number; exactly 0j when gcd(n, q) > 1."""
    return chi(n)


@dataclass(frozen=True)
class CharacterTable:
    """All phi(q) characters mod q, in a fixed deterministic order."""

    q: int
    group_decomposition: tuple[tuple[int, int], ...]  # (generator, order) pairs
    characters: tuple[Character, ...]

    @property
    def phi(self) -> int:
        return len(self.characters)

    def principal(self) -> Character:
        return self.characters[0]

    def nonprincipal(self) -> list[Character]:
        return [c for c in self.characters if not c.is_principal]

    def real_nonprincipal(self) -> list[Character]:
        """Quadratic characters: order divides 2, not principal."""
        out = []
        for c in self.characters:
            if c.is_principal:
                continue
            if all(
                (2 * e) % fac.order == 0 for e, fac in zip(c.exponents, c._factors)
            ):
                out.append(c)
        return out


def build_character_table(q: int) -> CharacterTable:
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    if q > MAX_Q:
        raise DomainError(f"q = {q} beyond supported bound {MAX_Q}")
    factors = tuple(_unit_group_factors(q))
    orders = [f.order for f in factors]
    assert math.prod(orders) == euler_phi(q)

    def exponent_tuples():
        # lexicographic enumeration; all-zeros (principal) comes first
        idx = [0] * len(orders)
        while True:
            yield tuple(idx)
            for i in reversed(range(len(orders))):
                idx[i] += 1
                if idx[i] < orders[i]:
                    break
                idx[i] = 0
            else:
                return

    chars = tuple(
        Character(q=q, index=i, exponents=t, _factors=factors)
        for i, t in enumerate(exponent_tuples())
    )
    if not chars:  # len(factors) == 0 cannot happen for q >= 3
        raise AssertionError("empty character table")
    return CharacterTable(
        q=q,
        group_decomposition=tuple((f.generator, f.order) for f in factors),
        characters=chars,
    )


def orthogonality_sum(table: CharacterTable, a: int, n: int) -> int:
    """Exact value of sum over chi of conj(chi(a)) * chi(n).

    Evaluated without floats: the summand angles form a multiset of rational
    turns; if some cyclic factor contributes a nonzero angle shift, the
    multiset is invariant under that shift, which forces the sum to be 0
    (S = S * zeta with zeta != 1). Otherwise every angle is 0 and the sum is
    the number of unit terms, phi(q). Non-unit a or n gives 0 terms.
    """
    if math.gcd(a, table.q) != 1 or math.gcd(n, table.q) != 1:
        return 0
    factors = table.characters[0]._factors
    shifts = []
    for fac in factors:
        e = (fac.exponent_of(n) - fac.exponent_of(a)) % fac.order
        if e:
            shifts.append(Fraction(e, fac.order))
    if not shifts:
        return table.phi
    # certify cancellation: angle multiset invariant under a nonzero shift
    from collections import Counter

    angles = Counter(
        (chi.angle(n) - chi.angle(a)) % 1 for chi in table.characters
    )
    shift = shifts[0]
    shifted = Counter({(t + shift) % 1: c for t, c in angles.items()})
    if shifted != angles:
        raise AssertionError("orthogonality certificate failed")  # pragma: no cover
    return 0


@dataclass(frozen=True)
class RacePhase:
    """The character-side data of one race: a nonprincipal chi with
    chi(a) != chi(b), the phase xi = arg(chi(a) - chi(b)) in [0, 2pi), and
    the modulus |chi(a) - chi(b)|."""

    q: int
    a: int
    b: int
    chi_index: int
    xi: float
    magnitude: float

    def coefficient(self) -> complex:
        """conj(chi(a)) - conj(chi(b)) = magnitude * e^{-i xi}."""
        return self.magnitude * cmath.exp(-1j * self.xi)


def select_race_character(
    table: CharacterTable, a: int, b: int, chi_index: int | None = None
) -> RacePhase:
    """Deterministically pick the distinguishing character for the race (a, b).

    Defaults to the smallest character index with chi(a) != chi(b); pass
    chi_index to override (any nonprincipal character separating a and b is
    admissible, and results legitimately depend on the choice).
    """
    q = table.q
    a %= q
    b %= q
    if math.gcd(a, q) != 1 or math.gcd(b, q) != 1:
        raise DomainError(f"a and b must be units mod {q}: got {a}, {b}")
    if a == b:
        raise DomainError(f"a and b must be distinct mod {q}: got {a}")

    candidates = (
        [table.characters[chi_index]] if chi_index is not None else table.characters
    )
    for chi in candidates:
        if chi.is_principal:
            continue
        ta, tb = chi.angle(a), chi.angle(b)
        if ta != tb:
            diff = chi(a) - chi(b)
            xi = cmath.phase(diff) % TWO_PI
            return RacePhase(
                q=q, a=a, b=b, chi_index=chi.index, xi=xi, magnitude=abs(diff)
            )
    if chi_index is not None:
        raise DomainError(
            f"character {chi_index} does not separate {a} and {b} mod {q}"
        )
    raise AssertionError(
        f"no separating character mod {q}; impossible for distinct units"
    )  # pragma: no cover
