"""Exception hierarchy.

The CLI maps these onto exit codes: :class:`RejectionError` subclasses are
mathematical rejections (exit 2), :class:`ScopeError` subclasses are scope
violations (exit 3) and :class:`ParseError` covers malformed input (exit 4).
"""


class BadApproxError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BadApproxError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(BadApproxError, ValueError):
    """Matrix sizes are incompatible."""


class NotNonnegativeError(DomainError):
    """A trigonometric polynomial takes negative values on the circle."""


class DegeneracyError(DomainError):
    """Root pairing or zero counting is ill-conditioned."""


class BoundaryZeroError(DomainError):
    """A function has a zero on (or too close to) the unit circle."""


class CoprimalityError(DomainError):
    """The entries of a column share a nonconstant inner factor."""


class ConvergenceError(BadApproxError, RuntimeError):
    """An iterative refinement failed to converge within its cap."""


class PreconditionError(BadApproxError, ValueError):
    """Input data does not satisfy the documented preconditions."""


class RejectionError(BadApproxError):
    """The input is mathematically rejected (not an internal failure)."""


class ZeroHankelError(RejectionError, PreconditionError):
    """The Hankel operator vanishes, so zero is trivially a best approximant."""


class NotBadlyApproximableError(RejectionError, PreconditionError):
    """The symbol is not badly approximable.

    ``gap`` carries ``||Phi||_inf - ||H_Phi||``.
    """

    def __init__(self, message, gap=None, diagnostic=None):
        super().__init__(message)
        self.gap = gap
        self.diagnostic = diagnostic


class FactorizationError(RejectionError):
    """The block-diagonal step of the factorization left a large residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ScopeError(BadApproxError):
    """The request falls outside the supported scope."""


class UnsupportedSizeError(ScopeError, ValueError):
    """Matrix size beyond the supported 2x2 desk scale."""


class ParseError(BadApproxError, ValueError):
    """A symbol or data file could not be parsed."""
