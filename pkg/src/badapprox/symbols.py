"""Matrix and scalar functions on the unit circle.

:class:`LaurentMatrix` stores finitely many matrix Fourier coefficients,
:class:`FactoredScalar` a rational scalar in inner/outer factored form, and
:class:`AnalyticColumn` a column of analytic scalars. Analytic scalars are
either :class:`FactoredScalar` or :class:`numpy.polynomial.Polynomial`
(Taylor polynomial in ``z``).
"""

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, ShapeError
from .grid import (
    DEFAULT_GRID,
    adaptive_coefficients,
    check_on_circle,
    coefficients_from_samples,
    next_pow2,
)

PRUNE_TOL = 1e-14
TOL_BOUNDARY = 1e-8
TRUNCATE_TOL = 1e-12
BOUNDARY_ZERO_SLACK = 1e-6


def _freeze(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LaurentMatrix:
    """An m x n matrix function ``sum_k coeff[k] * z**k`` with finite support.

    Coefficients whose largest entry is below ``PRUNE_TOL`` are dropped on
    construction, so ``terms`` is always canonical.
    """

    m: int
    n: int
    terms: "MappingProxyType[int, np.ndarray]" = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ShapeError(f"invalid symbol size {self.m}x{self.n}")
        clean = {}
        for k, A in dict(self.terms).items():
            A = np.asarray(A, dtype=complex)
            if A.shape != (self.m, self.n):
                raise ShapeError(
                    f"coefficient at k={k} has shape {A.shape}, expected {(self.m, self.n)}"
                )
            if np.abs(A).max() >= PRUNE_TOL:
                clean[int(k)] = _freeze(A)
        object.__setattr__(self, "terms", MappingProxyType(dict(sorted(clean.items()))))

    # construction helpers
    @classmethod
    def zero(cls, m, n):
        return cls(m, n, {})

    @classmethod
    def scalar(cls, terms):
        """Scalar symbol from ``{k: complex}``."""
        return cls(1, 1, {k: np.array([[c]]) for k, c in terms.items()})

    @classmethod
    def from_dense(cls, kmin, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        _, m, n = coeffs.shape
        return cls(m, n, {kmin + i: coeffs[i] for i in range(coeffs.shape[0])})

    @classmethod
    def from_samples(cls, values, truncate=TRUNCATE_TOL):
        """Recover coefficients from samples ``(N, m, n)`` on the N-point grid.

        Coefficients with max-entry modulus below ``truncate`` times the peak
        are discarded.
        """
        values = np.asarray(values, dtype=complex)
        freqs, coeffs = coefficients_from_samples(values)
        mags = np.abs(coeffs.reshape(len(freqs), -1)).max(axis=1)
        cut = truncate * max(mags.max(), 1e-300) if truncate else 0.0
        keep = mags >= cut
        _, m, n = values.shape
        return cls(m, n, {int(k): A for k, A in zip(freqs[keep], coeffs[keep])})

    @classmethod
    def from_function(cls, fn, m, n, truncate=TRUNCATE_TOL, N0=256):
        """Fourier-recover an evaluable ``fn`` on an adaptively refined grid."""
        def vals(z):
            return np.asarray(fn(z), dtype=complex).reshape(len(z), m, n)

        freqs, coeffs, _ = adaptive_coefficients(vals, N0=N0)
        mags = np.abs(coeffs.reshape(len(freqs), -1)).max(axis=1)
        cut = truncate * max(mags.max(), 1e-300)
        keep = mags >= cut
        return cls(m, n, {int(k): A for k, A in zip(freqs[keep], coeffs[keep])})

    # structure
    @property
    def shape(self):
        return (self.m, self.n)

    @property
    def freqs(self):
        return tuple(self.terms)

    @property
    def is_zero(self):
        return not self.terms

    @property
    def kmin(self):
        return min(self.terms) if self.terms else None

    @property
    def kmax(self):
        return max(self.terms) if self.terms else None

    @property
    def is_analytic(self):
        return all(k >= 0 for k in self.terms)

    @property
    def vanishes_at_zero(self):
        return all(k >= 1 for k in self.terms)

    @property
    def is_antianalytic(self):
        """All frequencies <= -1 (the range of the Riesz projection P_-)."""
        return all(k <= -1 for k in self.terms)

    @property
    def negative_bandwidth(self):
        return max(0, -self.kmin) if self.terms else 0

    @property
    def bandwidth(self):
        if not self.terms:
            return 0
        return max(abs(self.kmin), abs(self.kmax))

    def coefficient(self, k):
        A = self.terms.get(k)
        return np.zeros((self.m, self.n), complex) if A is None else A

    def dense(self, kmin=None, kmax=None):
        """Coefficients as an array ``(kmax-kmin+1, m, n)``."""
        kmin = self.kmin if kmin is None else kmin
        kmax = self.kmax if kmax is None else kmax
        if kmin is None:
            return np.zeros((0, self.m, self.n), complex)
        out = np.zeros((kmax - kmin + 1, self.m, self.n), complex)
        for k, A in self.terms.items():
            if kmin <= k <= kmax:
                out[k - kmin] = A
        return out

    # evaluation
    def __call__(self, z):
        """Values at points ``z`` (any nonzero complex), shape ``z.shape + (m, n)``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (self.m, self.n), complex)
        for k, A in self.terms.items():
            out += (z**k)[..., None, None] * A
        return out

    def grid_values(self, N):
        """Values on the N-point grid, shape ``(N, m, n)``, via FFT.

        Aliased frequencies are summed, which is exact at the grid points.
        """
        buf = np.zeros((N, self.m, self.n), complex)
        for k, A in self.terms.items():
            buf[k % N] += A
        return np.fft.ifft(buf, axis=0) * N

    # algebra
    def _combine(self, other, sign):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        if other.shape != self.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        terms = dict(self.terms)
        for k, B in other.terms.items():
            terms[k] = terms[k] + sign * B if k in terms else sign * B
        return LaurentMatrix(self.m, self.n, terms)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return LaurentMatrix(self.m, self.n, {k: -A for k, A in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, LaurentMatrix):
            return NotImplemented
        return LaurentMatrix(self.m, self.n, {k: c * A for k, A in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __matmul__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        if self.n != other.m:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        if self.is_zero or other.is_zero:
            return LaurentMatrix.zero(self.m, other.n)
        A = self.dense()
        B = other.dense()
        out = np.zeros((len(A) + len(B) - 1, self.m, other.n), complex)
        for i in range(len(A)):
            out[i : i + len(B)] += A[i] @ B
        return LaurentMatrix.from_dense(self.kmin + other.kmin, out)

    def shift(self, s):
        """Multiply by ``z**s``."""
        return LaurentMatrix(self.m, self.n, {k + s: A for k, A in self.terms.items()})

    def transpose(self):
        return LaurentMatrix(self.n, self.m, {k: A.T for k, A in self.terms.items()})

    def conj(self):
        """Entrywise complex conjugate on the circle: ``conj(Phi(zeta))``."""
        return LaurentMatrix(self.m, self.n, {-k: A.conj() for k, A in self.terms.items()})

    def adjoint(self):
        """Pointwise adjoint on the circle: ``Phi(zeta)^*``."""
        return LaurentMatrix(self.n, self.m, {-k: A.conj().T for k, A in self.terms.items()})

    def project(self, kmin=None, kmax=None):
        return LaurentMatrix(
            self.m,
            self.n,
            {
                k: A
                for k, A in self.terms.items()
                if (kmin is None or k >= kmin) and (kmax is None or k <= kmax)
            },
        )

    def project_plus(self):
        return self.project(kmin=0)

    def block(self, rows, cols):
        rows, cols = list(rows), list(cols)
        return LaurentMatrix(
            len(rows), len(cols), {k: A[np.ix_(rows, cols)] for k, A in self.terms.items()}
        )

    def l2_norm(self):
        """``||Phi||_{L^2(S_2)}`` by Parseval (exact)."""
        return float(np.sqrt(sum(np.sum(np.abs(A) ** 2) for A in self.terms.values())))

    def max_coefficient_diff(self, other):
        """Largest entry of ``self - other`` over all coefficients."""
        if other.shape != self.shape:
            raise ShapeError(f"cannot compare {self.shape} and {other.shape}")
        keys = set(self.terms) | set(other.terms)
        if not keys:
            return 0.0
        return float(max(np.abs(self.coefficient(k) - other.coefficient(k)).max() for k in keys))

    def __repr__(self):
        return f"LaurentMatrix({self.m}x{self.n}, freqs={list(self.terms)})"


def riesz_project_minus(sym):
    """Orthogonal projection onto the frequencies ``k <= -1``."""
    return sym.project(kmax=-1)


def pad_to_square(sym):
    """Append zero rows or columns to make the symbol square."""
    s = max(sym.m, sym.n)
    if sym.m == sym.n:
        return sym
    terms = {}
    for k, A in sym.terms.items():
        B = np.zeros((s, s), complex)
        B[: sym.m, : sym.n] = A
        terms[k] = B
    return LaurentMatrix(s, s, terms)


def _strip_zero_lines(sym):
    """Drop rows and columns that vanish identically (so padding is invisible to norms)."""
    support = np.zeros((sym.m, sym.n), bool)
    for A in sym.terms.values():
        support |= A != 0
    rows = np.nonzero(support.any(axis=1))[0]
    cols = np.nonzero(support.any(axis=0))[0]
    if len(rows) == sym.m and len(cols) == sym.n:
        return sym
    return sym.block(rows, cols)


def _singular_values(sym, N):
    vals = _strip_zero_lines(sym).grid_values(N)
    if vals.shape[1] == 1 or vals.shape[2] == 1:
        return np.linalg.norm(vals.reshape(N, -1), axis=1)[:, None]
    return np.linalg.svd(vals, compute_uv=False)


def linf_norm(sym, N=DEFAULT_GRID):
    """Max over the N-point grid of the largest singular value."""
    if N < 64:
        raise DomainError("linf_norm needs N >= 64")
    if sym.is_zero:
        return 0.0
    return float(_singular_values(sym, N)[:, 0].max())


def refine_linf_norm(sym, N=DEFAULT_GRID, tol=1e-9, max_N=1 << 20):
    """Double the grid until successive sup estimates differ by less than ``tol``.

    Returns ``(value, N, delta)``. The grids are nested, so the estimates are
    nondecreasing.
    """
    prev = linf_norm(sym, N)
    while True:
        N2 = 2 * N
        cur = linf_norm(sym, N2)
        delta = cur - prev
        if delta < tol or N2 >= max_N:
            return cur, N2, delta
        prev, N = cur, N2


def l1_trace_norm(sym, N=DEFAULT_GRID):
    """Grid mean of the nuclear norm, approximating ``||Psi||_{L^1(S_1)}``."""
    if N < 64:
        raise DomainError("l1_trace_norm needs N >= 64")
    if sym.is_zero:
        return 0.0
    return float(_singular_values(sym, N).sum(axis=1).mean())


def trace_pairing(phi, psi):
    """``int trace(Phi Psi) dm`` as ``sum_k trace(Phi^(-k) Psi^(k))`` (exact)."""
    if phi.n != psi.m or phi.m != psi.n:
        raise ShapeError(f"pairing needs m x n against n x m, got {phi.shape} and {psi.shape}")
    total = 0j
    for k, B in psi.terms.items():
        A = phi.terms.get(-k)
        if A is not None:
            total += np.einsum("ij,ji->", A, B)
    return complex(total)


def trace_pairing_quadrature(phi, psi, N=None):
    """Same pairing by grid quadrature; ``N`` defaults to an alias-free size."""
    if phi.n != psi.m or phi.m != psi.n:
        raise ShapeError(f"pairing needs m x n against n x m, got {phi.shape} and {psi.shape}")
    if phi.is_zero or psi.is_zero:
        return 0j
    if N is None:
        span = (phi.kmax + psi.kmax) - (phi.kmin + psi.kmin)
        N = max(64, next_pow2(span + 2))
    prod = np.einsum("tij,tji->t", phi.grid_values(N), psi.grid_values(N))
    return complex(prod.mean())


@dataclass(frozen=True)
class FactoredScalar:
    """``c * z**zpower * prod B_a(z) * scale * prod (1 - z/b) / prod (1 - z/p)``.

    ``B_a(z) = (z - a) / (1 - conj(a) z)`` runs over ``zeros_inside``, ``b``
    over ``outer_zeros`` and ``p`` over ``outer_poles``. The outer part
    ``scale * prod(1 - z/b) / prod(1 - z/p)`` equals ``scale > 0`` at the
    origin. ``scale == 0`` encodes the zero function.
    """

    c: complex = 1.0
    zpower: int = 0
    zeros_inside: tuple = ()
    outer_zeros: tuple = ()
    scale: float = 1.0
    outer_poles: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "scale", float(self.scale))
        for name in ("zeros_inside", "outer_zeros", "outer_poles"):
            object.__setattr__(self, name, tuple(complex(x) for x in getattr(self, name)))
        if self.scale < 0:
            raise DomainError("scale must be nonnegative")
        if self.scale > 0 and abs(abs(self.c) - 1) > 1e-10:
            raise DomainError(f"constant {self.c} is not unimodular")
        if self.zpower < 0:
            raise DomainError("zpower must be nonnegative")
        for a in self.zeros_inside:
            if abs(a) >= 1 - TOL_BOUNDARY:
                raise DomainError(f"Blaschke zero {a} not inside the disk")
        for b in self.outer_zeros:
            # outer functions may vanish on the circle (e.g. 1 + z)
            if abs(b) < 1 - BOUNDARY_ZERO_SLACK:
                raise DomainError(f"outer zero {b} lies inside the disk")
        for b in self.outer_poles:
            if abs(b) <= 1 + TOL_BOUNDARY:
                raise DomainError(f"outer pole {b} not outside the closed disk")

    @classmethod
    def zero(cls):
        return cls(scale=0.0)

    @classmethod
    def constant(cls, value):
        value = complex(value)
        if value == 0:
            return cls.zero()
        return cls(c=value / abs(value), scale=abs(value))

    @property
    def is_zero(self):
        return self.scale == 0

    @property
    def is_inner(self):
        return not self.outer_zeros and not self.outer_poles and abs(self.scale - 1) < 1e-12

    @property
    def is_outer(self):
        return self.zpower == 0 and not self.zeros_inside and abs(self.c - 1) < 1e-12

    @property
    def inner_degree(self):
        return self.zpower + len(self.zeros_inside)

    def inner_part(self):
        return FactoredScalar(self.c, self.zpower, self.zeros_inside)

    def outer_part(self):
        return FactoredScalar(1.0, 0, (), self.outer_zeros, self.scale, self.outer_poles)

    def pole_radius(self):
        """Smallest modulus of a pole (``inf`` for polynomials)."""
        radii = [abs(p) for p in self.outer_poles]
        radii += [1 / abs(a) for a in self.zeros_inside if a != 0]
        return min(radii, default=np.inf)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros(z.shape, complex)
        out = np.full(z.shape, self.c * self.scale, complex)
        if self.zpower:
            out = out * z**self.zpower
        for a in self.zeros_inside:
            out = out * (z - a) / (1 - np.conj(a) * z)
        for b in self.outer_zeros:
            out = out * (1 - z / b)
        for p in self.outer_poles:
            out = out / (1 - z / p)
        return out

    def __mul__(self, other):
        if isinstance(other, FactoredScalar):
            if self.is_zero or other.is_zero:
                return FactoredScalar.zero()
            return _cancel(
                FactoredScalar(
                    self.c * other.c,
                    self.zpower + other.zpower,
                    self.zeros_inside + other.zeros_inside,
                    self.outer_zeros + other.outer_zeros,
                    self.scale * other.scale,
                    self.outer_poles + other.outer_poles,
                )
            )
        value = complex(other)
        if value == 0 or self.is_zero:
            return FactoredScalar.zero()
        return FactoredScalar(
            self.c * value / abs(value),
            self.zpower,
            self.zeros_inside,
            self.outer_zeros,
            self.scale * abs(value),
            self.outer_poles,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __truediv__(self, other):
        if not isinstance(other, FactoredScalar):
            return self * (1.0 / complex(other))
        if other.is_zero:
            raise DomainError("division by the zero function")
        if self.is_zero:
            return self
        if other.zpower > self.zpower:
            raise DomainError("quotient would have a pole at the origin")
        zeros = _multiset_remove(self.zeros_inside, other.zeros_inside, TOL_BOUNDARY)
        return _cancel(
            FactoredScalar(
                self.c / other.c,
                self.zpower - other.zpower,
                zeros,
                self.outer_zeros + other.outer_poles,
                self.scale / other.scale,
                self.outer_poles + other.outer_zeros,
            )
        )

    def taylor(self, tol=1e-16):
        """Taylor coefficients, truncated once they fall below ``tol`` times the peak."""
        if self.is_zero:
            return np.zeros(1, complex)
        if not self.zeros_inside and not self.outer_poles:
            coeffs = np.array([self.c * self.scale], complex)
            for b in self.outer_zeros:
                coeffs = np.convolve(coeffs, [1.0, -1.0 / b])
            coeffs = np.concatenate([np.zeros(self.zpower, complex), coeffs])
        else:
            freqs, coeffs, _ = adaptive_coefficients(self, N0=64, tail_tol=max(tol, 1e-15))  # FFT roundoff floor
            coeffs = coeffs[freqs >= 0]
        return _trim(coeffs, tol)

    def l2_norm(self):
        return float(np.linalg.norm(self.taylor()))


def _multiset_remove(items, remove, tol):
    items = list(items)
    for r in remove:
        if not items:
            raise DomainError(f"zero {r} not present in dividend")
        j = int(np.argmin([abs(x - r) for x in items]))
        if abs(items[j] - r) > tol:
            raise DomainError(f"zero {r} not present in dividend")
        items.pop(j)
    return tuple(items)


def _cancel(f, tol=1e-12):
    """Cancel coincident outer zeros and outer poles."""
    zeros = list(f.outer_zeros)
    poles = []
    for p in f.outer_poles:
        j = next((i for i, b in enumerate(zeros) if abs(b - p) <= tol * max(1, abs(p))), None)
        if j is None:
            poles.append(p)
        else:
            zeros.pop(j)
    return FactoredScalar(f.c, f.zpower, f.zeros_inside, tuple(zeros), f.scale, tuple(poles))


def _trim(coeffs, tol):
    coeffs = np.asarray(coeffs, dtype=complex)
    peak = np.abs(coeffs).max() if coeffs.size else 0.0
    if peak == 0:
        return np.zeros(1, complex)
    big = np.nonzero(np.abs(coeffs) > tol * peak)[0] if tol else np.nonzero(coeffs)[0]
    return coeffs[: big[-1] + 1]


def taylor_coefficients(s, tol=1e-16):
    """Taylor coefficients of an analytic scalar."""
    if isinstance(s, FactoredScalar):
        return s.taylor(tol)
    return np.asarray(s.coef, dtype=complex)


def scalar_is_zero(s):
    if isinstance(s, FactoredScalar):
        return s.is_zero
    return not np.any(np.abs(s.coef) >= PRUNE_TOL)


def poly(coeffs):
    """Analytic polynomial scalar from Taylor coefficients (low order first)."""
    return Polynomial(np.asarray(coeffs, dtype=complex))


@dataclass(frozen=True)
class AnalyticColumn:
    """A column of analytic scalars."""

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ShapeError("empty column")

    @classmethod
    def from_coefficients(cls, coeffs):
        """Polynomial column from an array ``(degree+1, dim)``."""
        coeffs = np.asarray(coeffs, dtype=complex)
        return cls(tuple(poly(_trim(coeffs[:, i], 0.0)) for i in range(coeffs.shape[1])))

    @classmethod
    def from_laurent(cls, sym):
        if sym.n != 1 or not sym.is_analytic:
            raise ShapeError("need an analytic column symbol")
        if sym.is_zero:
            return cls.from_coefficients(np.zeros((1, sym.m)))
        return cls.from_coefficients(sym.dense(0, sym.kmax)[:, :, 0])

    @property
    def dimension(self):
        return len(self.entries)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.asarray(e(z), dtype=complex) * np.ones(z.shape) for e in self.entries], axis=-1)

    def taylor(self, tol=1e-16):
        """Coefficient array ``(K, dim)``."""
        cols = [taylor_coefficients(e, tol) for e in self.entries]
        K = max(len(c) for c in cols)
        out = np.zeros((K, len(cols)), complex)
        for i, c in enumerate(cols):
            out[: len(c), i] = c
        return out

    def to_laurent(self, tol=1e-16):
        return LaurentMatrix.from_dense(0, self.taylor(tol)[:, :, None])

    def l2_norm(self):
        return float(np.linalg.norm(self.taylor()))


def evaluate(sym, zeta):
    """Value of a symbol, scalar or column at circle point(s) ``zeta``."""
    zeta = check_on_circle(zeta)
    return sym(zeta)
