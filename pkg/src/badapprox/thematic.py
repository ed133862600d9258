"""Inner-outer factorization of columns and thematic completion (length 2)."""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, PreconditionError, UnsupportedSizeError
from .grid import DEFAULT_GRID, circle_grid, coefficients_from_samples, next_pow2
from .scalar_factor import (
    TrigPolynomial,
    factor_polynomial,
    fejer_riesz,
    inner_gcd,
    outer_from_modulus,
    trim_polynomial,
)
from .symbols import AnalyticColumn, FactoredScalar, scalar_is_zero, taylor_coefficients

EXACT_ROUTE_MAX_DEGREE = 32
CERTIFY_GRID = 1024
EXACT_SELF_CHECK = 1e-11

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class InnerCoouterColumn:
    """A column certified inner (``v* v = 1`` on the circle) and co-outer."""

    column: AnalyticColumn
    isometry_residual: float
    coprime: bool
    gcd_degree: int

    @property
    def entries(self):
        return self.column.entries

    @property
    def dimension(self):
        return self.column.dimension

    def certified(self, tol=1e-9):
        return self.isometry_residual <= tol and self.coprime

    def __call__(self, z):
        return self.column(z)


def certify_column(column, N=CERTIFY_GRID):
    """Measure inner-ness and co-outerness of an analytic column."""
    if isinstance(column, InnerCoouterColumn):
        column = column.column
    vals = column(circle_grid(N))
    iso = float(np.abs(np.sum(np.abs(vals) ** 2, axis=-1) - 1).max())
    gcd = inner_gcd(column.entries)
    return InnerCoouterColumn(column, iso, gcd.inner_degree == 0, gcd.inner_degree)


class ColumnFactorization(NamedTuple):
    theta: FactoredScalar
    h: object
    v: InnerCoouterColumn


def _is_short_polynomial(e):
    if isinstance(e, FactoredScalar):
        return False
    return len(trim_polynomial(e.coef)) - 1 <= EXACT_ROUTE_MAX_DEGREE


def _column_polys(f):
    """Taylor coefficient arrays with a column-wide relative trim."""
    coeffs = [np.asarray(taylor_coefficients(e), dtype=complex) for e in f.entries]
    peak = max((np.abs(c).max() for c in coeffs if c.size), default=0.0)
    out = []
    for c in coeffs:
        big = np.nonzero(np.abs(c) > 1e-14 * peak)[0]
        out.append(c[: big[-1] + 1] if big.size else np.zeros(0, complex))
    return out


def _exact_route(f, tol):
    """Root-based factorization, or ``None`` when it is ill-conditioned."""
    polys = _column_polys(f)
    try:
        h = fejer_riesz(TrigPolynomial.modulus_squared(polys), tol=tol)
        factored = [factor_polynomial(c) for c in polys]
    except DomainError:
        return None
    theta = inner_gcd(factored)
    v = AnalyticColumn(tuple(F / (theta * h) if not F.is_zero else F for F in factored))
    cert = certify_column(v)
    z = circle_grid(CERTIFY_GRID)
    fz = f(z)
    rec = theta(z)[:, None] * np.asarray(h(z), dtype=complex)[:, None] * v(z)
    rec_res = float(np.abs(rec - fz).max() / np.abs(fz).max())
    if cert.isometry_residual > EXACT_SELF_CHECK or rec_res > EXACT_SELF_CHECK:
        return None
    return ColumnFactorization(theta, h, cert)


def inner_outer_column(f, tol=1e-9, N=DEFAULT_GRID):
    """Factor ``f = theta * h * v`` with ``theta`` inner, ``h`` outer, ``v`` inner co-outer.

    Short polynomial columns go through :func:`fejer_riesz` and root-based gcd,
    giving factored entries. Anything else is handled on the grid: ``h`` from
    the cepstrum of ``||f||^2`` and ``v`` as Taylor polynomials.
    """
    if all(scalar_is_zero(e) for e in f.entries):
        raise PreconditionError("zero column")
    if all(_is_short_polynomial(e) for e in f.entries):
        exact = _exact_route(f, tol)
        if exact is not None:
            return exact
        log.info("exact column factorization failed its self-check; using the grid route")

    degree = max(len(taylor_coefficients(e)) for e in f.entries)
    N = max(N, next_pow2(4 * degree))
    z = circle_grid(N)
    vals = f(z)
    h_coef = trim_polynomial(outer_from_modulus(np.sum(np.abs(vals) ** 2, axis=-1)), 1e-16)
    h = Polynomial(h_coef)
    theta = inner_gcd(f.entries)
    quotient = vals / (theta(z) * h(z))[:, None]
    freqs, coeffs = coefficients_from_samples(quotient)
    analytic = coeffs[freqs >= 0]
    peak = np.abs(analytic).max()
    entries = []
    for i in range(f.dimension):
        if scalar_is_zero(f.entries[i]):
            entries.append(Polynomial([0j]))
            continue
        c = analytic[:, i]
        big = np.nonzero(np.abs(c) > 1e-16 * peak)[0]
        entries.append(Polynomial(c[: big[-1] + 1]))
    return ColumnFactorization(theta, h, certify_column(AnalyticColumn(tuple(entries))))


@dataclass(frozen=True, eq=False)
class ThematicMatrix:
    """``V = (v, conj(Theta))``; ``Theta`` is stored analytic, conjugated on evaluation.

    For size 1, ``theta`` is ``None`` and ``V = (v)``.
    """

    v: AnalyticColumn
    theta: AnalyticColumn = None

    @classmethod
    def identity(cls, n):
        if n == 1:
            return cls(AnalyticColumn((FactoredScalar(),)))
        if n == 2:
            one, zero = FactoredScalar(), FactoredScalar.zero()
            return cls(AnalyticColumn((one, zero)), AnalyticColumn((zero, one)))
        raise UnsupportedSizeError(f"thematic matrices of size {n} are not supported")

    @property
    def size(self):
        return self.v.dimension

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        first = self.v(z)[..., :, None]
        if self.theta is None:
            return first
        rest = np.conj(self.theta(z))[..., :, None]
        return np.concatenate([first, rest], axis=-1)


def thematic_complete(v, tol=1e-9):
    """Complete ``v = (a, b)`` to ``V = [[a, -conj(b)], [b, conj(a)]]``, i.e. ``Theta = (-b, a)``."""
    if not isinstance(v, InnerCoouterColumn):
        v = certify_column(v)
    if v.dimension != 2:
        raise UnsupportedSizeError(
            f"thematic completion is implemented for columns of length 2, got {v.dimension}"
        )
    if not v.coprime:
        raise PreconditionError(
            f"entries share an inner factor of degree {v.gcd_degree} (not co-outer)"
        )
    if v.isometry_residual > tol:
        raise PreconditionError(f"column is not inner (residual {v.isometry_residual:.3g})")
    a, b = v.entries
    return ThematicMatrix(v.column, AnalyticColumn((-b, a)))


@dataclass(frozen=True)
class ThematicVerdict:
    unitarity_residual: float
    v_inner_residual: float
    theta_inner_residual: float
    v_coprime: bool
    theta_coprime: bool
    determinant_residual: float
    passed: bool


def _sv_residual(mats):
    s = np.linalg.svd(mats, compute_uv=False)
    return float(np.abs(s - 1).max())


def is_thematic(V, tol=1e-9, N=CERTIFY_GRID):
    """Check unitarity of ``V``, inner-ness and co-outerness of ``v`` and ``Theta``."""
    z = circle_grid(N)
    vals = V(z)
    unit = _sv_residual(vals)
    v_res = _sv_residual(vals[:, :, :1])
    v_cop = inner_gcd(V.v.entries).inner_degree == 0
    if V.theta is None:
        th_res, th_cop = 0.0, True
    else:
        th_res = _sv_residual(V.theta(z)[:, :, None])
        th_cop = inner_gcd(V.theta.entries).inner_degree == 0
    det = float(np.abs(np.linalg.det(vals) - 1).max()) if V.size == 2 else 0.0
    passed = unit <= tol and v_res <= tol and th_res <= tol and v_cop and th_cop
    return ThematicVerdict(unit, v_res, th_res, v_cop, th_cop, det, bool(passed))
