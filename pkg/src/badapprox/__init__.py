"""Best analytic approximation data for matrix functions on the unit circle.

Badly approximable symbols up to 2x2 are factored through their Hankel
maximizing vectors, and the factorization yields a dual extremal function.
"""

from .errors import (
    BadApproxError,
    ConvergenceError,
    DomainError,
    FactorizationError,
    NotBadlyApproximableError,
    ParseError,
    PreconditionError,
    RejectionError,
    ScopeError,
    ShapeError,
    UnsupportedSizeError,
    ZeroHankelError,
)
from .generate import random_instance
from .hankel import build_hankel, check_badly_approximable, norm_and_maximizer
from .pipeline import (
    FactorizationData,
    construct_phi,
    dual_extremal,
    duality_chain_check,
    factorize,
    sarason_rank_one,
    verify_dual_extremal,
)
from .scalar_factor import TrigPolynomial, fejer_riesz, inner_gcd, inner_outer
from .symbols import FactoredScalar, LaurentMatrix, linf_norm, trace_pairing
from .thematic import ThematicMatrix, inner_outer_column, is_thematic, thematic_complete

__version__ = "0.1.0"

__all__ = [
    "BadApproxError",
    "ConvergenceError",
    "DomainError",
    "FactorizationError",
    "NotBadlyApproximableError",
    "ParseError",
    "PreconditionError",
    "RejectionError",
    "ScopeError",
    "ShapeError",
    "UnsupportedSizeError",
    "ZeroHankelError",
    "random_instance",
    "build_hankel",
    "check_badly_approximable",
    "norm_and_maximizer",
    "FactorizationData",
    "construct_phi",
    "dual_extremal",
    "duality_chain_check",
    "factorize",
    "sarason_rank_one",
    "verify_dual_extremal",
    "TrigPolynomial",
    "fejer_riesz",
    "inner_gcd",
    "inner_outer",
    "FactoredScalar",
    "LaurentMatrix",
    "linf_norm",
    "trace_pairing",
    "ThematicMatrix",
    "inner_outer_column",
    "is_thematic",
    "thematic_complete",
]
