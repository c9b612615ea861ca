"""Zero multisets per character: hypothetical constructions and loaded tables.

Imaginary parts are stored only as natural logs. The default construction
has log gamma_j = j^8 + log(3/2), so gamma_2 ~ 1e111 is the *small* end and
gamma_3 ~ e^6561 has no float representation at all; every downstream
consumer must route through log_gamma.

A construction may instead run in scale mode, which swaps the j^8 growth law
for c * j^p so the sign-bias mechanism is observable at reachable heights.
Scale mode is flagged non-paper-exact in provenance and is exempt from the
parameter-window validation (it could never pass it).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError, ParseError

LOG_3_2 = math.log(1.5)
# gammas with log above this are serialized in log: form (decimal would overflow)
_DECIMAL_GAMMA_LOG_LIMIT = math.log(1e15)


@dataclass(frozen=True)
class Zero:
    """One zero beta + i*gamma with multiplicity; gamma kept as log_gamma."""

    beta: float
    log_gamma: float
    multiplicity: int = 1

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise DomainError(f"beta must lie in (0,1), got {self.beta}")
        if not math.isfinite(self.log_gamma):
            raise DomainError(f"log_gamma must be finite, got {self.log_gamma}")
        if self.multiplicity < 1:
            raise DomainError(f"multiplicity must be >= 1, got {self.multiplicity}")

    @property
    def gamma(self) -> float:
        """gamma as a double; inf when out of range (use log_gamma instead)."""
        try:
            return math.exp(self.log_gamma)
        except OverflowError:
            return math.inf


def _merge_sorted(zeros: list[Zero]) -> tuple[Zero, ...]:
    """Sort by log_gamma and merge exact (beta, log_gamma) duplicates."""
    ordered = sorted(zeros, key=lambda z: (z.log_gamma, z.beta))
    merged: list[Zero] = []
    for z in ordered:
        if merged and merged[-1].log_gamma == z.log_gamma and merged[-1].beta == z.beta:
            prev = merged.pop()
            z = Zero(z.beta, z.log_gamma, prev.multiplicity + z.multiplicity)
        merged.append(z)
    return tuple(merged)


@dataclass(frozen=True)
class ZeroMultiset:
    """Immutable, sorted-by-height multiset of zeros attached to one character.

    The library attaches a multiset to exactly one character of the race;
    all other characters are assumed zero-free in the working region, which
    is recorded as an assumed hypothesis in run reports.
    """

    zeros: tuple[Zero, ...]
    provenance: str = ""

    @classmethod
    def from_zeros(cls, zeros, provenance: str = "") -> "ZeroMultiset":
        return cls(zeros=_merge_sorted(list(zeros)), provenance=provenance)

    def __iter__(self):
        return iter(self.zeros)

    def __len__(self):
        return len(self.zeros)

    def total_multiplicity(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    def truncate(self, x_prime: float) -> "ZeroMultiset":
        """Keep zeros with gamma <= x_prime; x_prime = inf is the identity."""
        if x_prime < 1.0:
            raise DomainError(f"x_prime must be >= 1, got {x_prime}")
        if math.isinf(x_prime):
            return self
        cut = math.log(x_prime)
        kept = tuple(z for z in self.zeros if z.log_gamma <= cut)
        return ZeroMultiset(zeros=kept, provenance=self.provenance)

    def truncate_log(self, x_prime_log: float) -> "ZeroMultiset":
        kept = tuple(z for z in self.zeros if z.log_gamma <= x_prime_log)
        return ZeroMultiset(zeros=kept, provenance=self.provenance)

    def save(self, path) -> None:
        """Write in the zero-file format, using log: gammas so that a
        load_zeros round trip reproduces the multiset bit-exactly."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {self.provenance}\n" if self.provenance else "")
            for z in self.zeros:
                fh.write(f"{z.beta!r} log:{z.log_gamma!r} {z.multiplicity}\n")


def load_zeros(path, character_id: str | None = None) -> ZeroMultiset:
    """Read a zero table: one zero per line, ``[beta] gamma [multiplicity]``.

    gamma may be written ``log:<value>`` to give log gamma directly.
    A single field is gamma alone (beta defaults to 1/2); two fields are
    beta gamma; three add the multiplicity. '#' starts a comment.
    """
    zeros: list[Zero] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                if len(fields) == 1:
                    beta, gamma_f, mult = 0.5, fields[0], 1
                elif len(fields) == 2:
                    beta, gamma_f, mult = float(fields[0]), fields[1], 1
                elif len(fields) == 3:
                    beta, gamma_f, mult = float(fields[0]), fields[1], int(fields[2])
                else:
                    raise ValueError(f"expected 1-3 fields, got {len(fields)}")
                if gamma_f.startswith("log:"):
                    log_gamma = float(gamma_f[4:])
                else:
                    gamma = float(gamma_f)
                    if gamma <= 0:
                        raise ValueError(f"gamma must be positive, got {gamma}")
                    log_gamma = math.log(gamma)
                zeros.append(Zero(beta=beta, log_gamma=log_gamma, multiplicity=mult))
            except (ValueError, DomainError) as exc:
                raise ParseError(str(exc), line_number=lineno) from exc
    tag = f"file:{path}" + (f" character:{character_id}" if character_id else "")
    return ZeroMultiset.from_zeros(zeros, provenance=tag)


# ---------------------------------------------------------------------------
# hypothetical construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PaperSelectors:
    """Default window choices: gamma_j at the multiplicative window midpoint,
    delta_j and theta_j at their window centers."""

    xi: float

    def log_gamma(self, j: int) -> float:
        return float(j) ** 8 + LOG_3_2

    def delta(self, j: int) -> float:
        return float(j) ** -8

    def theta(self, j: int) -> float:
        return (self.xi - math.pi / 2.0) / float(j) ** 16


@dataclass(frozen=True)
class ScaleSelectors:
    """Scale-mode growth law log gamma_j = c * j^p (non-paper-exact)."""

    xi: float
    c: float
    p: float
    delta_value: float

    def log_gamma(self, j: int) -> float:
        return self.c * float(j) ** self.p

    def delta(self, j: int) -> float:
        return self.delta_value

    def theta(self, j: int) -> float:
        return (self.xi - math.pi / 2.0) / float(j) ** 16


@dataclass(frozen=True)
class OverrideSelector:
    """A selector with per-level value overrides on top of a base rule.

    Picklable (unlike a closure), so constructions carrying it still work
    with process-pool sampling. Windows are validated as usual: overrides
    let callers pick other admissible points inside them (e.g. a small
    delta_1, the only way level 1 can satisfy the j0 condition).
    """

    base: Callable[[int], float]
    overrides: tuple[tuple[int, float], ...]

    def __call__(self, j: int) -> float:
        for level, value in self.overrides:
            if level == j:
                return value
        return self.base(j)


@dataclass(frozen=True)
class HypotheticalConstruction:
    """Parameters defining the hypothetical zero multiset.

    Selectors are injectable: log_gamma_of(j), delta_of(j), theta_of(j) may be
    any callables whose values stay inside the parameter windows
    (exp(j^8) <= gamma_j <= 2 exp(j^8), |delta_j - j^-8| <= j^-9,
    |theta_j - (xi - pi/2) j^-16| <= j^-17). scale_mode = (c, p) replaces the
    j^8 growth law by c * j^p and turns the window validation off.
    """

    xi: float
    sigma: float
    delta: float
    A: float
    j_min: int
    j_max: int
    log_gamma_of: Callable[[int], float] = field(default=None)  # type: ignore[assignment]
    delta_of: Callable[[int], float] = field(default=None)  # type: ignore[assignment]
    theta_of: Callable[[int], float] = field(default=None)  # type: ignore[assignment]
    scale_mode: tuple[float, float] | None = None

    def __post_init__(self):
        if not (0.5 < self.sigma < 1.0):
            raise DomainError(f"sigma must lie in (1/2, 1), got {self.sigma}")
        if not (0.0 < self.delta < self.sigma - 0.5):
            raise DomainError(
                f"delta must lie in (0, sigma - 1/2) = (0, {self.sigma - 0.5}), "
                f"got {self.delta}"
            )
        if self.A <= 0:
            raise DomainError(f"A must be positive, got {self.A}")
        if not (1 <= self.j_min <= self.j_max):
            raise DomainError(f"need 1 <= j_min <= j_max, got [{self.j_min}, {self.j_max}]")
        defaults = (
            ScaleSelectors(
                xi=self.xi,
                c=self.scale_mode[0],
                p=self.scale_mode[1],
                delta_value=self.delta,
            )
            if self.scale_mode is not None
            else PaperSelectors(xi=self.xi)
        )
        if self.log_gamma_of is None:
            object.__setattr__(self, "log_gamma_of", defaults.log_gamma)
        if self.delta_of is None:
            object.__setattr__(self, "delta_of", defaults.delta)
        if self.theta_of is None:
            object.__setattr__(self, "theta_of", defaults.theta)
        self.validate()

    @classmethod
    def single_level(
        cls,
        gamma: float,
        L: int,
        sigma: float,
        delta: float,
        xi: float,
        A: float = 1.0,
    ) -> "HypotheticalConstruction":
        """Scale-mode construction with one level j = L^(1/3) of frequency gamma.

        L must be a perfect cube since the level's weighted sum has length j^3.
        """
        j = round(L ** (1.0 / 3.0))
        if j**3 != L:
            raise DomainError(f"L must be a perfect cube, got {L}")
        return cls(
            xi=xi,
            sigma=sigma,
            delta=delta,
            A=A,
            j_min=j,
            j_max=j,
            scale_mode=(math.log(gamma), 0.0),
        )

    @property
    def is_paper_exact(self) -> bool:
        return self.scale_mode is None

    def levels(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def validate(self) -> None:
        """Window and j0 constraints; scale mode checks positivity only."""
        for j in self.levels():
            lg, dj, tj = self.log_gamma_of(j), self.delta_of(j), self.theta_of(j)
            if self.scale_mode is not None:
                if dj <= 0 or dj >= self.sigma - 0.5 + 1e-15 or not math.isfinite(lg):
                    raise DomainError(f"scale-mode parameters invalid at level {j}")
                continue
            # windows are checked in log / rescaled space: j^8 etc. overflow
            # nothing, but delta_j - j^-8 would lose all digits as written
            w = lg - float(j) ** 8
            if not (0.0 <= w <= math.log(2.0)):
                raise DomainError(
                    f"gamma window violated at j={j}: log gamma - j^8 = {w:.6g} "
                    f"not in [0, log 2]"
                )
            if abs(dj * float(j) ** 8 - 1.0) > 1.0 / j:
                raise DomainError(
                    f"delta window violated at j={j}: |delta_j * j^8 - 1| = "
                    f"{abs(dj * float(j) ** 8 - 1.0):.6g} > 1/j"
                )
            if abs(tj * float(j) ** 16 - (self.xi - math.pi / 2.0)) > 1.0 / j:
                raise DomainError(
                    f"theta window violated at j={j}: |theta_j * j^16 - (xi - pi/2)|"
                    f" > 1/j"
                )
            if lg <= math.log(self.A):
                raise DomainError(
                    f"j0 violated at j={j}: gamma_j <= A (log gamma {lg:.6g} <= "
                    f"log A {math.log(self.A):.6g})"
                )
            if dj > self.delta:
                raise DomainError(
                    f"j0 violated at j={j}: delta_j = {dj:.6g} > delta = {self.delta}"
                )

    def provenance(self) -> str:
        mode = (
            "paper-exact"
            if self.is_paper_exact
            else f"scale-mode c={self.scale_mode[0]:.6g} p={self.scale_mode[1]:.6g} [non-paper]"
        )
        return (
            f"B(xi={self.xi:.6g}, sigma={self.sigma}, delta={self.delta}, "
            f"A={self.A}, j=[{self.j_min},{self.j_max}], {mode})"
        )


def multiplicity(k: int, j: int) -> int:
    """Weight of the k-th zero at level j: k * (j^3 + 1 - k)."""
    return k * (j**3 + 1 - k)


def level_total_multiplicity(j: int) -> int:
    """Closed form of sum_k multiplicity(k, j) = j^3 (j^3+1) (j^3+2) / 6."""
    L = j**3
    return L * (L + 1) * (L + 2) // 6


def build_B(c: HypotheticalConstruction) -> ZeroMultiset:
    """Realize the construction: level j contributes zeros
    sigma - delta_j + i(k gamma_j + theta_j) with weight k(j^3+1-k), k = 1..j^3.
    """
    c.validate()
    zeros: list[Zero] = []
    for j in c.levels():
        lg, dj, tj = c.log_gamma_of(j), c.delta_of(j), c.theta_of(j)
        beta = c.sigma - dj
        theta_over_gamma = tj * math.exp(-lg) if lg < 700 else 0.0
        for k in range(1, j**3 + 1):
            log_gamma_jk = lg + math.log(k + theta_over_gamma)
            zeros.append(
                Zero(beta=beta, log_gamma=log_gamma_jk, multiplicity=multiplicity(k, j))
            )
    ms = ZeroMultiset.from_zeros(zeros, provenance=c.provenance())
    _check_built(ms, c)
    return ms


def _check_built(ms: ZeroMultiset, c: HypotheticalConstruction) -> None:
    for z in ms:
        if not (c.sigma - c.delta - 1e-12 <= z.beta <= c.sigma + 1e-12):
            raise DomainError(
                f"generated beta {z.beta} outside [sigma - delta, sigma]"
            )
        if c.is_paper_exact and z.multiplicity > z.log_gamma**0.75:
            raise DomainError(
                f"multiplicity {z.multiplicity} exceeds (log gamma)^(3/4) "
                f"= {z.log_gamma ** 0.75:.6g}"
            )
