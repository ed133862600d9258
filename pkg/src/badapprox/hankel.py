"""Block Hankel truncations of ``H_Phi``, maximizing vectors and diagnostics."""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DegeneracyError, DomainError, ZeroHankelError
from .grid import DEFAULT_GRID, circle_grid
from .symbols import AnalyticColumn, LaurentMatrix, linf_norm, riesz_project_minus

log = logging.getLogger(__name__)

TRUNCATION_CAP = 1024
GAP_WARN = 1e-8


@dataclass(frozen=True, eq=False)
class BlockHankelMatrix:
    """``H[j, k] = Phi^(-1-j-k)`` for ``0 <= j, k < truncation``.

    Rows are indexed by the frequency ``-1-j`` of the output, columns by the
    Taylor index ``k`` of the input; both blocks are stacked row-major.
    """

    matrix: np.ndarray
    truncation: int
    m: int
    n: int
    exact: bool

    def block(self, j, k):
        m, n = self.m, self.n
        return self.matrix[j * m : (j + 1) * m, k * n : (k + 1) * n]

    def apply(self, coeffs):
        """``P_-(Phi f)`` for ``f`` with Taylor coefficients ``(K, n)``, ``K <= truncation``.

        Returns the coefficients of ``z^(-1-j)`` as an array ``(truncation, m)``.
        """
        coeffs = np.asarray(coeffs, dtype=complex)
        x = np.zeros((self.truncation, self.n), complex)
        x[: len(coeffs)] = coeffs
        return (self.matrix @ x.reshape(-1)).reshape(self.truncation, self.m)


def build_hankel(phi, truncation):
    """Finite block Hankel matrix of ``phi`` with ``truncation`` block rows."""
    if truncation < 1:
        raise DomainError("truncation must be positive")
    N, m, n = truncation, phi.m, phi.n
    C = np.zeros((2 * N - 1, m, n), complex)
    for k, A in phi.terms.items():
        s = -1 - k
        if 0 <= s < 2 * N - 1:
            C[s] = A
    idx = np.add.outer(np.arange(N), np.arange(N))
    M = C[idx].transpose(0, 2, 1, 3).reshape(N * m, N * n)
    exact = phi.negative_bandwidth <= N
    return BlockHankelMatrix(M, N, m, n, exact)


def fix_phase(x, rel=1e-10):
    """Rotate ``x`` so that its first non-negligible entry is real positive."""
    x = np.asarray(x, dtype=complex)
    big = np.nonzero(np.abs(x) > rel * np.abs(x).max())[0]
    if not big.size:
        return x
    a = x[big[0]]
    return x * (abs(a) / a)


class TopSingular(NamedTuple):
    sigma1: float
    sigma2: float
    vector: np.ndarray
    tie: bool


def svd_top(M, tie_tol=GAP_WARN):
    """Top two singular values and a phase-fixed unit top right singular vector."""
    M = np.asarray(M, dtype=complex)
    if not np.any(M):
        raise DegeneracyError("zero matrix has no distinguished singular vector")
    _, s, vh = np.linalg.svd(M)
    s1 = float(s[0])
    s2 = float(s[1]) if len(s) > 1 else 0.0
    vec = fix_phase(vh[0].conj())
    return TopSingular(s1, s2, vec, s1 - s2 <= tie_tol * max(1.0, s1))


@dataclass(frozen=True, eq=False)
class MaximizingData:
    """Top singular data of ``H_Phi``: ``sigma``, maximizer ``f`` and ``g``.

    ``g = conj(z) * conj(H_Phi f) / sigma``. ``f_coeffs`` has shape
    ``(truncation, n)`` and unit Euclidean norm.
    """

    sigma: float
    sigma2: float
    f: AnalyticColumn
    g: AnalyticColumn
    f_coeffs: np.ndarray
    g_coeffs: np.ndarray
    truncation: int
    exact: bool
    multiplicity: int = 1
    maximizing_residual: float = 0.0
    plus_residual: float = 0.0
    warnings: tuple = field(default=())

    @property
    def gap(self):
        return self.sigma - self.sigma2

    @property
    def degenerate(self):
        return self.multiplicity > 1 or self.gap < GAP_WARN


def _svd_at(phi, N):
    H = build_hankel(phi, N)
    _, s, vh = np.linalg.svd(H.matrix)
    return H, s, vh


def _select_maximizer(s, vh, n, tie_tol):
    """Unit top singular vector; inside a degenerate cluster, the one with largest ``|f(0)|``."""
    s1 = s[0]
    mult = int(np.sum(s1 - s <= tie_tol * max(1.0, s1)))
    if mult == 1:
        return fix_phase(vh[0].conj()), mult
    basis = vh[:mult].conj().T  # columns span the top singular subspace
    at_zero = basis[:n]
    _, _, wh = np.linalg.svd(at_zero)
    combo = wh[0].conj()
    x = basis @ combo
    return fix_phase(x / np.linalg.norm(x)), mult


def norm_and_maximizer(phi, tol=1e-8, cap=TRUNCATION_CAP, tie_tol=GAP_WARN):
    """``||H_Phi||`` with a maximizing vector.

    Exact whenever the negative spectrum of ``phi`` fits within ``cap`` block
    rows; otherwise the truncation doubles until ``sigma`` stabilises to
    ``tol``.
    """
    minus = riesz_project_minus(phi)
    if minus.is_zero:
        raise ZeroHankelError("P_- Phi = 0: the zero function is a best approximant")
    bw = minus.negative_bandwidth
    if bw <= cap:
        N = max(bw, 8)
        H, s, vh = _svd_at(phi, N)
    else:
        N = 8
        H, s, vh = _svd_at(phi, N)
        while True:
            if 2 * N > cap:
                raise ConvergenceError(f"sigma not converged at truncation cap {cap}")
            H2, s2, vh2 = _svd_at(phi, 2 * N)
            converged = abs(s2[0] - s[0]) < tol
            H, s, vh, N = H2, s2, vh2, 2 * N
            if converged:
                break
    n = phi.n
    x, mult = _select_maximizer(s, vh, n, tie_tol)
    sigma = float(s[0])
    sigma2 = float(s[mult]) if len(s) > mult else 0.0
    warnings = []
    if mult > 1 or sigma - sigma2 < tie_tol:
        msg = f"top singular value is degenerate (multiplicity {mult}); using max |f(0)| vector"
        log.warning(msg)
        warnings.append(msg)
    f_coeffs = x.reshape(N, n)
    y = H.apply(f_coeffs)
    g_coeffs = np.conj(y) / sigma
    resid = abs(np.linalg.norm(y) - sigma * np.linalg.norm(x))
    f_sym = LaurentMatrix.from_dense(0, f_coeffs[:, :, None])
    plus = (phi @ f_sym).project_plus().l2_norm()
    return MaximizingData(
        sigma=sigma,
        sigma2=sigma2,
        f=AnalyticColumn.from_coefficients(f_coeffs),
        g=AnalyticColumn.from_coefficients(g_coeffs),
        f_coeffs=f_coeffs,
        g_coeffs=g_coeffs,
        truncation=N,
        exact=H.exact,
        multiplicity=mult,
        maximizing_residual=float(resid),
        plus_residual=float(plus),
        warnings=tuple(warnings),
    )


def flatness_residual(phi, data, N=DEFAULT_GRID):
    """``max | ||Phi f|| - sigma ||f|| |`` over the grid (``||f||_2 = 1``)."""
    z = circle_grid(N)
    fz = data.f(z)
    Pz = phi.grid_values(N)
    lhs = np.linalg.norm(np.einsum("tij,tj->ti", Pz, fz), axis=1)
    rhs = data.sigma * np.linalg.norm(fz, axis=1)
    return float(np.abs(lhs - rhs).max())


@dataclass(frozen=True, eq=False)
class BadApproxDiagnostic:
    hankel_norm: float
    linf_norm: float
    gap: float
    verdict: bool
    flatness_residual: float = None
    maximizing: MaximizingData = None


def check_badly_approximable(phi, tol=1e-8, N=DEFAULT_GRID, cap=TRUNCATION_CAP):
    """Compare ``||H_Phi||`` with ``||Phi||_inf``; verdict ``gap <= tol * ||Phi||_inf``."""
    if phi.is_zero:
        raise DomainError("zero symbol")
    data = norm_and_maximizer(phi, tol=tol, cap=cap)
    sup = linf_norm(phi, N)
    gap = sup - data.sigma
    verdict = gap <= tol * sup
    flat = flatness_residual(phi, data, N) if verdict else None
    return BadApproxDiagnostic(data.sigma, sup, gap, bool(verdict), flat, data)
