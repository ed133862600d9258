"""Scalar factorization: roots, Fejer-Riesz, inner-outer splitting and ``u``.

Polynomials are passed as Taylor coefficient sequences, lowest order first
(the :mod:`numpy.polynomial` convention), or as ``Polynomial`` objects.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from .errors import (
    BoundaryZeroError,
    DegeneracyError,
    DomainError,
    NotNonnegativeError,
)
from .grid import circle_grid, next_pow2
from .symbols import (
    TOL_BOUNDARY,
    FactoredScalar,
    LaurentMatrix,
    TRUNCATE_TOL,
    scalar_is_zero,
    taylor_coefficients,
)

MAX_ROOT_DEGREE = 64
PAIRING_TOL = 1e-7
ZERO_MATCH_TOL = 1e-8


def _coeffs(p):
    if isinstance(p, Polynomial):
        return np.asarray(p.coef, dtype=complex)
    return np.atleast_1d(np.asarray(p, dtype=complex))


def trim_polynomial(coeffs, rel=1e-14):
    """Drop trailing coefficients below ``rel`` times the largest one."""
    c = _coeffs(coeffs)
    peak = np.abs(c).max() if c.size else 0.0
    if peak == 0:
        return np.zeros(0, complex)
    big = np.nonzero(np.abs(c) > rel * peak)[0]
    return c[: big[-1] + 1]


def find_roots(coeffs, max_degree=MAX_ROOT_DEGREE):
    """All roots with multiplicity: companion eigenvalues plus one Newton step."""
    c = trim_polynomial(coeffs)
    if c.size == 0:
        raise DomainError("the zero polynomial has no well-defined roots")
    if len(c) - 1 > max_degree:
        raise DomainError(f"degree {len(c) - 1} exceeds the supported {max_degree}")
    if len(c) == 1:
        return np.zeros(0, complex)
    roots = P.polyroots(c)
    dc = P.polyder(c)
    f = P.polyval(roots, c)
    df = P.polyval(roots, dc)
    # Newton on a multiple root breaks the symmetry of its cluster
    size = np.abs(c).sum() * np.maximum(1.0, np.abs(roots)) ** (len(c) - 1)
    ok = np.abs(df) > 1e-6 * size
    step = np.zeros_like(roots)
    step[ok] = f[ok] / df[ok]
    polished = roots - step
    # keep the Newton step only where it does not increase the residual
    better = np.abs(P.polyval(polished, c)) <= np.abs(f)
    return np.where(better, polished, roots)


@dataclass(frozen=True)
class TrigPolynomial:
    """Real trigonometric polynomial ``sum_k c_k z^k`` with ``c_{-k} = conj(c_k)``.

    Only ``c_0`` (real) and ``c_1..c_d`` are stored.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.size == 0:
            c = np.zeros(1, complex)
        c[0] = c[0].real
        c = trim_polynomial(c, 1e-15) if np.any(c) else np.zeros(1, complex)
        if c.size == 0:
            c = np.zeros(1, complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_laurent(cls, q, tol=1e-12):
        if q.shape != (1, 1):
            raise DomainError("trigonometric polynomial must be scalar")
        d = q.bandwidth
        c = np.array([q.coefficient(k)[0, 0] for k in range(d + 1)])
        back = np.array([q.coefficient(-k)[0, 0] for k in range(d + 1)])
        if np.abs(back - c.conj()).max(initial=0) > tol * max(1.0, np.abs(c).max()):
            raise DomainError("coefficients are not conjugate symmetric")
        return cls(c)

    @classmethod
    def modulus_squared(cls, columns):
        """``sum_i |p_i|^2`` for polynomials ``p_i``."""
        total = None
        for p in columns:
            a = _coeffs(p)
            if not a.size:
                continue
            full = np.convolve(a, a[::-1].conj())  # frequencies -deg..deg
            deg = len(a) - 1
            half = full[deg:]
            total = half if total is None else _padd(total, half)
        return cls(np.zeros(1) if total is None else total)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def laurent(self):
        d = self.degree
        terms = {k: self.coeffs[k] for k in range(d + 1)}
        terms.update({-k: np.conj(self.coeffs[k]) for k in range(1, d + 1)})
        return LaurentMatrix.scalar(terms)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.coeffs[0].real, dtype=complex)
        for k in range(1, self.degree + 1):
            out += self.coeffs[k] * z**k + np.conj(self.coeffs[k]) * z ** (-k)
        if np.all(np.abs(np.abs(z) - 1) < 1e-12):
            return out.real
        return out


def _padd(a, b):
    out = np.zeros(max(len(a), len(b)), complex)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def fejer_riesz(q, tol=1e-9):
    """Outer polynomial ``h`` with ``|h|^2 = q`` on the circle and ``h(0) > 0``.

    Roots of ``z^d q(z)`` come in pairs ``(lam, 1/conj(lam))``; the ``d`` roots
    of largest modulus (outside roots plus one of each boundary pair) give
    ``h``. Boundary zeros of ``h`` are permitted.
    """
    if not isinstance(q, TrigPolynomial):
        q = TrigPolynomial(q)
    d = q.degree
    N = max(1024, next_pow2(8 * (d + 1)))
    vals = q(circle_grid(N))
    qmax = float(vals.max())
    if qmax <= 0 and not np.any(q.coeffs):
        raise DomainError("q is identically zero")
    if vals.min() < -tol * (1 + max(qmax, 0.0)):
        raise NotNonnegativeError(f"q takes the negative value {vals.min():.3g}")
    if d == 0:
        return FactoredScalar(scale=float(np.sqrt(q.coeffs[0].real)))
    full = np.concatenate([np.conj(q.coeffs[:0:-1]), q.coeffs])  # index j <-> k = j - d
    roots = find_roots(full, max_degree=2 * MAX_ROOT_DEGREE)
    if len(roots) != 2 * d:
        raise DegeneracyError("lost roots while factoring")
    order = np.argsort(-np.abs(roots), kind="stable")
    chosen, rest = list(roots[order[:d]]), list(roots[order[d:]])
    for i, lam in enumerate(chosen):
        target = 1 / np.conj(lam) if lam != 0 else np.inf
        dist = [abs(mu - target) for mu in rest]
        j = int(np.argmin(dist))
        on_boundary = abs(abs(lam) - 1) < 1e-4
        # double roots on the circle split like sqrt(eps)
        allowed = PAIRING_TOL * max(1.0, abs(target))
        if on_boundary:
            allowed = max(allowed, 1e-6)
        if dist[j] > allowed:
            if on_boundary:
                raise DegeneracyError(
                    f"odd-multiplicity boundary root cluster near {lam:.6g}"
                )
            raise DegeneracyError(f"root {lam:.6g} has no reciprocal partner")
        mu = rest.pop(j)
        lam = 0.5 * (lam + 1 / np.conj(mu))
        if on_boundary and abs(abs(lam) - 1) < 1e-6:
            lam = lam / abs(lam)
        chosen[i] = lam
    chosen = np.array(chosen)
    monic = P.polyfromroots(chosen)
    K = np.sqrt(q.coeffs[0].real / np.sum(np.abs(monic) ** 2))
    scale = float(K * np.prod(np.abs(chosen)))
    return FactoredScalar(outer_zeros=tuple(chosen), scale=scale)


def outer_from_modulus(modulus_sq):
    """Taylor coefficients of the outer function with ``|h|^2 = q`` on the grid.

    ``modulus_sq`` holds samples of ``q > 0`` at the N-point grid. Uses the
    cepstral construction ``h = exp(log q / 2 + i * conj-harmonic)``.
    """
    q = np.asarray(modulus_sq, dtype=float)
    N = len(q)
    if q.min() <= 0 or q.min() < 1e-24 * q.max():
        raise BoundaryZeroError("modulus vanishes on the circle")
    c = np.fft.fft(0.5 * np.log(q)) / N
    L = np.zeros(N, complex)
    L[0] = c[0].real
    L[1 : N // 2] = 2 * c[1 : N // 2]
    h_vals = np.exp(np.fft.ifft(L) * N)
    coeffs = np.fft.fft(h_vals) / N
    return coeffs[: N // 2]


def factor_polynomial(coeffs):
    """Factored form of an analytic polynomial; boundary zeros are rejected."""
    c = trim_polynomial(coeffs)
    if c.size == 0:
        return FactoredScalar.zero()
    roots = find_roots(c)
    zpower = int(np.sum(np.abs(roots) < 1e-14 * max(1.0, np.abs(c).max())))
    inside, outside = [], []
    for r in roots:
        if abs(r) < 1e-14 * max(1.0, np.abs(c).max()):
            continue
        if abs(abs(r) - 1) <= TOL_BOUNDARY:
            raise BoundaryZeroError(f"zero {r:.6g} lies on the unit circle")
        (inside if abs(r) < 1 else outside).append(r)
    # z - a = B_a(z) (1 - conj(a) z),  z - b = -b (1 - z/b)
    K = c[-1] * np.prod([-b for b in outside])
    outer_zeros = tuple(1 / np.conj(a) for a in inside) + tuple(outside)
    return FactoredScalar(K / abs(K), zpower, tuple(inside), outer_zeros, abs(K))


@dataclass(frozen=True)
class InnerOuterPair:
    inner: FactoredScalar
    outer: FactoredScalar


def inner_outer(p):
    """Split an analytic polynomial or :class:`FactoredScalar` as inner * outer."""
    f = p if isinstance(p, FactoredScalar) else factor_polynomial(p)
    if f.is_zero:
        raise DomainError("the zero function has no inner-outer factorization")
    for b in f.outer_zeros:
        if abs(b) <= 1 + TOL_BOUNDARY:
            raise BoundaryZeroError(f"zero {b:.6g} lies on the unit circle")
    return InnerOuterPair(f.inner_part(), f.outer_part())


def _grid_size(deg):
    return max(1024, next_pow2(4 * (deg + 1)))


def zero_count(s, N=None):
    """Number of zeros of an analytic polynomial scalar in the open disk."""
    c = _coeffs(s) if not isinstance(s, FactoredScalar) else None
    if c is None:
        return s.inner_degree
    N = N or _grid_size(len(c))
    z = circle_grid(N)
    f = P.polyval(z, c)
    if np.abs(f).min() <= 1e-10 * np.abs(f).max():
        raise BoundaryZeroError("function vanishes on the circle")
    r = P.polyval(z, P.polyder(c)) / f
    s0 = np.mean(z * r)
    count = int(round(s0.real))
    if abs(s0 - count) > 1e-4:
        raise DegeneracyError(f"zero count {s0:.6g} is not an integer")
    return count


def inside_zeros(s):
    """Zeros in the open unit disk (with multiplicity) of an analytic scalar.

    Low-degree polynomials use :func:`find_roots`; longer Taylor polynomials
    use contour moments of ``f'/f`` on the circle followed by Newton polishing.
    Returns ``None`` for the zero function.
    """
    if isinstance(s, FactoredScalar):
        if s.is_zero:
            return None
        return (0j,) * s.zpower + s.zeros_inside
    c = trim_polynomial(_coeffs(s))
    if c.size == 0:
        return None
    peak = np.abs(c).max()
    nz = np.nonzero(np.abs(c) > 1e-13 * peak)[0][0]
    c = c[nz:]
    zeros = [0j] * nz
    if len(c) == 1:
        return tuple(zeros)
    if len(c) - 1 <= MAX_ROOT_DEGREE:
        roots = find_roots(c)
        for r in roots:
            if abs(abs(r) - 1) <= TOL_BOUNDARY:
                raise BoundaryZeroError(f"zero {r:.6g} lies on the unit circle")
        return tuple(zeros + [r for r in roots if abs(r) < 1])
    count = zero_count(c)
    if count == 0:
        return tuple(zeros)
    N = _grid_size(len(c))
    z = circle_grid(N)
    r = P.polyval(z, P.polyder(c)) / P.polyval(z, c)
    sums = [np.mean(z ** (k + 1) * r) for k in range(1, count + 1)]
    e = [1.0 + 0j]
    for k in range(1, count + 1):
        e.append(sum((-1) ** (i - 1) * e[k - i] * sums[i - 1] for i in range(1, k + 1)) / k)
    monic = np.array([(-1) ** k * e[k] for k in range(count + 1)])[::-1]
    roots = P.polyroots(monic) if count > 1 else np.array([-monic[0]])
    dc = P.polyder(c)
    for _ in range(4):
        roots = roots - P.polyval(roots, c) / P.polyval(roots, dc)
    return tuple(zeros + list(roots))


def inner_gcd(entries, tol=ZERO_MATCH_TOL):
    """Greatest common inner divisor (a finite Blaschke product, ``c = 1``)."""
    sets = [z for z in (inside_zeros(e) for e in entries) if z is not None]
    if not sets:
        raise DomainError("inner gcd of zero functions is undefined")
    common = [complex(a) for a in sets[0]]
    for other in sets[1:]:
        pool = list(other)
        kept = []
        for a in common:
            if not pool:
                break
            dist = [abs(a - b) for b in pool]
            j = int(np.argmin(dist))
            if dist[j] <= tol:
                kept.append(0.5 * (a + pool.pop(j)))
        common = kept
    zpower = sum(1 for a in common if abs(a) <= tol)
    blaschke = tuple(a for a in common if abs(a) > tol)
    return FactoredScalar(1.0, zpower, blaschke)


def check_outer_zero_free(h):
    """Raise unless ``h`` has no zeros in the closed disk (with margin)."""
    if isinstance(h, FactoredScalar):
        if h.is_zero or h.zpower or h.zeros_inside:
            raise DomainError("h vanishes inside the disk")
        for b in h.outer_zeros:
            if abs(b) <= 1 + TOL_BOUNDARY:
                raise DomainError(f"h vanishes at {b:.6g} on the closed disk")
        return
    c = trim_polynomial(_coeffs(h))
    if c.size == 0:
        raise DomainError("h is identically zero")
    try:
        count = zero_count(c)
    except BoundaryZeroError as exc:
        raise DomainError(str(exc)) from exc
    if count:
        raise DomainError(f"h has {count} zeros inside the disk")


def outer_zero_radius(h):
    """Smallest modulus of a zero of the outer function ``h``."""
    if isinstance(h, FactoredScalar):
        return min((abs(b) for b in h.outer_zeros), default=np.inf)
    c = trim_polynomial(_coeffs(h))
    if len(c) <= 1:
        return np.inf
    if len(c) - 1 <= MAX_ROOT_DEGREE:
        return float(np.abs(find_roots(c)).min())
    return float(np.abs(P.polyroots(c)).min())


@dataclass(frozen=True)
class UnimodularSymbol:
    """``u = conj(z) conj(theta) conj(h) / h`` kept in evaluable factored form."""

    theta: FactoredScalar
    h: object

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        hz = np.asarray(self.h(z), dtype=complex)
        return np.conj(z) * np.conj(self.theta(z)) * np.conj(hz) / hz

    def laurent(self, truncate=TRUNCATE_TOL):
        return LaurentMatrix.from_function(self, 1, 1, truncate=truncate)

    def unimodularity_residual(self, N=4096):
        return float(np.abs(np.abs(self(circle_grid(N))) - 1).max())


def make_u(theta, h):
    """The unimodular function ``z̄ θ̄ h̄ / h`` for inner ``theta`` and outer ``h``."""
    if not isinstance(theta, FactoredScalar) or not theta.is_inner:
        raise DomainError("theta must be an inner FactoredScalar")
    if scalar_is_zero(h):
        raise DomainError("h is identically zero")
    check_outer_zero_free(h)
    return UnimodularSymbol(theta, h)


def normalized_outer(h):
    """Rescale an outer scalar to unit ``L^2`` norm."""
    norm = float(np.linalg.norm(taylor_coefficients(h)))
    if isinstance(h, FactoredScalar):
        return h * (1.0 / norm)
    return Polynomial(np.asarray(h.coef) / norm)
