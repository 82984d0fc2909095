"""Numerical harmonic-volume values and Ceresa-cycle nontriviality checks
for Fermat curves and their cyclic quotients."""

from .chen import BetaForm, check_path_product, integral_len1, integral_len2, shuffle_residual
from .errors import (
    AssumptionError,
    BudgetExceededError,
    CeresaError,
    CrossCheckError,
    DomainError,
    NonConvergentError,
    NotPrimeError,
    QuadratureError,
)
from .fermat import (
    FermatIndex,
    IndexTriple,
    assumption_check,
    find_m,
    holo_index_set,
    index_set,
    intersection_pairing,
    period,
)
from .numeric import RationalAngle, SeriesValue, frac_distance
from .report import from_json, to_json
from .specfun import Hyp3F2Params, beta, gamma_product, hyp3f2_unit, ln_gamma
from .volume import (
    Certificate,
    Curve,
    closed_iterated_integral,
    f_value,
    quotient_trace,
    trace_volume,
    verdict,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
