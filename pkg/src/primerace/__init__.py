"""primerace: a desk-scale laboratory for prime number races.

Exact residue-class prime counting (segmented sieve with a compiled kernel
and a pure fallback), Dirichlet characters with exact rational-angle values,
zero multisets (loaded tables or the hypothetical off-critical-line
construction), explicit-formula evaluation in direct and log-space modes,
Fejer-kernel sublevel measures, and exact/sampled densities of race sets.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .characters import (
    Character,
    CharacterTable,
    RacePhase,
    build_character_table,
    char_value,
    select_race_character,
)
from .density import (
    DensityResult,
    exact_race_density,
    hypothetical_sign_density,
    omega_density,
)
from .errors import ConsistencyError, DomainError, ParseError, PrecisionError
from .explicit_formula import (
    DeltaExplicit,
    FormulaConfig,
    FRhoResult,
    delta_explicit,
    delta_main_hypothetical,
    f_rho,
)
from .fejer import (
    FejerParams,
    SublevelReport,
    fejer_closed,
    fejer_direct,
    omega_membership,
    sublevel_measure,
)
from .logspace import SignedLogValue, signed_log_sum
from .sieve import (
    RaceSeries,
    ResidueCounts,
    prime_count,
    race_series,
    residue_counts,
    sieve_segment,
)
from .zeros import (
    HypotheticalConstruction,
    Zero,
    ZeroMultiset,
    build_B,
    load_zeros,
)

__all__ = [
    "__version__",
    "KERNEL_BACKEND",
    "Character",
    "CharacterTable",
    "RacePhase",
    "build_character_table",
    "char_value",
    "select_race_character",
    "DensityResult",
    "exact_race_density",
    "hypothetical_sign_density",
    "omega_density",
    "ConsistencyError",
    "DomainError",
    "ParseError",
    "PrecisionError",
    "DeltaExplicit",
    "FormulaConfig",
    "FRhoResult",
    "delta_explicit",
    "delta_main_hypothetical",
    "f_rho",
    "FejerParams",
    "SublevelReport",
    "fejer_closed",
    "fejer_direct",
    "omega_membership",
    "sublevel_measure",
    "SignedLogValue",
    "signed_log_sum",
    "RaceSeries",
    "ResidueCounts",
    "prime_count",
    "race_series",
    "residue_counts",
    "sieve_segment",
    "HypotheticalConstruction",
    "Zero",
    "ZeroMultiset",
    "build_B",
    "load_zeros",
]
