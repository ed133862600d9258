"""Seeded random badly approximable 2x2 symbols with known factorizations."""

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ConvergenceError, DomainError, PreconditionError, UnsupportedSizeError
from .hankel import check_badly_approximable
from .pipeline import FactorizationData, construct_phi
from .scalar_factor import (
    TrigPolynomial,
    factor_polynomial,
    fejer_riesz,
    normalized_outer,
)
from .symbols import AnalyticColumn, FactoredScalar, LaurentMatrix, linf_norm
from .thematic import thematic_complete

MAX_DEGREE = 8
MAX_ATTEMPTS = 32
# zeros of the column outer factor must stay this far out, so Fourier tails decay fast
MIN_OUTER_RADIUS = 1.3
ROOT_SEPARATION = 0.05
# maximizers are only determined to roundoff / gap, so near-ties are resampled
MIN_RELATIVE_GAP = 1e-5


class SamplingError(Exception):
    """A draw that has to be resampled."""


def _random_roots(rng, count):
    # about one zero in the disk per polynomial; many of them crowd the Hankel spectrum near t
    p_inside = min(0.5, 1.0 / max(count, 1))
    roots = []
    while len(roots) < count:
        r = rng.uniform(0.2, 0.7) if rng.random() < p_inside else rng.uniform(1.4, 3.0)
        a = r * np.exp(2j * np.pi * rng.random())
        if all(abs(a - b) >= ROOT_SEPARATION for b in roots):
            roots.append(a)
    return roots


def _complex_normal(rng):
    return complex(rng.normal(), rng.normal())


def _coprime_pair(rng, degree):
    """Two polynomials with no common root; the first has full degree."""
    roots1 = _random_roots(rng, degree)
    roots2 = _random_roots(rng, int(rng.integers(0, degree + 1)))
    for a in roots1:
        for b in roots2:
            if abs(a - b) < ROOT_SEPARATION:
                raise SamplingError("near-common root")
    return [
        _complex_normal(rng) * P.polyfromroots(r) if r else np.array([_complex_normal(rng)])
        for r in (roots1, roots2)
    ]


def _inner_coouter(rng, degree):
    """``(p1, p2) / k`` with ``|k|^2 = |p1|^2 + |p2|^2``."""
    polys = _coprime_pair(rng, degree)
    if rng.random() < 0.5:
        polys = polys[::-1]
    k = fejer_riesz(TrigPolynomial.modulus_squared(polys))
    if k.outer_zeros and min(abs(b) for b in k.outer_zeros) < MIN_OUTER_RADIUS:
        raise SamplingError("column outer factor has zeros near the circle")
    return AnalyticColumn(tuple(factor_polynomial(p) / k for p in polys))


def _random_blaschke(rng):
    count = int(rng.integers(0, 3))
    zeros = tuple(
        rng.uniform(0.1, 0.6) * np.exp(2j * np.pi * rng.random()) for _ in range(count)
    )
    return FactoredScalar(zeros_inside=zeros)


def _random_outer(rng):
    count = int(rng.integers(0, 3))
    zeros = tuple(
        rng.uniform(2.0, 3.0) * np.exp(2j * np.pi * rng.random()) for _ in range(count)
    )
    return normalized_outer(FactoredScalar(outer_zeros=zeros))


def _random_phi_sharp(rng, degree, target):
    coeffs = rng.normal(size=(2 * degree + 1, 1, 1)) + 1j * rng.normal(size=(2 * degree + 1, 1, 1))
    sym = LaurentMatrix.from_dense(-degree, coeffs)
    return sym * (target / linf_norm(sym))


def random_instance(seed, degree=2, t=1.0, attempts=MAX_ATTEMPTS):
    """Random ``(data, Phi)`` with ``Phi = construct_phi(data)`` certified badly approximable.

    ``degree`` bounds the polynomial degree of the numerators of ``v`` and
    ``w`` and the Laurent degree of ``Phi_sharp``.
    """
    if not 1 <= degree <= MAX_DEGREE:
        raise UnsupportedSizeError(f"degree must lie in 1..{MAX_DEGREE}, got {degree}")
    if not t > 0:
        raise DomainError("t must be positive")
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        try:
            v = _inner_coouter(rng, degree)
            w = _inner_coouter(rng, degree)
            V, Wt = thematic_complete(v), thematic_complete(w)
        except (SamplingError, DomainError, PreconditionError):
            continue
        theta = _random_blaschke(rng)
        h = _random_outer(rng)
        phi_sharp = _random_phi_sharp(rng, degree, t * rng.uniform(0.2, 0.8))
        data = FactorizationData(t=float(t), theta=theta, h=h, V=V, Wt=Wt, phi_sharp=phi_sharp)
        phi = construct_phi(data)
        diag = check_badly_approximable(phi)
        if diag.verdict and diag.maximizing.gap >= MIN_RELATIVE_GAP * t:
            return data, phi
    raise ConvergenceError(f"no admissible sample after {attempts} attempts (seed {seed})")
