"""Factorizations of badly approximable symbols and their dual extremal functions.

The central object is :class:`FactorizationData`, holding

    Phi = W^* diag(t u, Phi_sharp) V^*,    u = conj(z theta h) / h,

with ``V`` and ``W^t`` thematic. :func:`factorize` computes it from a
maximizing vector of the Hankel operator, :func:`construct_phi` goes the
other way, and :func:`dual_extremal` builds the rank-one function
``Psi = z theta h^2 v w^t`` whose trace pairing with ``Phi`` attains
``||H_Phi||``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (
    FactorizationError,
    NotBadlyApproximableError,
    PreconditionError,
    ShapeError,
    UnsupportedSizeError,
    ZeroHankelError,
)
from .grid import DEFAULT_GRID, circle_grid
from .hankel import TRUNCATION_CAP, build_hankel, check_badly_approximable, norm_and_maximizer
from .scalar_factor import make_u, normalized_outer
from .symbols import (
    FactoredScalar,
    LaurentMatrix,
    l1_trace_norm,
    linf_norm,
    pad_to_square,
    trace_pairing,
)
from .thematic import ThematicMatrix, inner_outer_column, thematic_complete

BLOCK_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class FactorizationData:
    """Ingredients of ``Phi = W^* diag(t u, Phi_sharp) V^*``.

    ``Wt`` stores the thematic matrix ``W^t``. ``phi_sharp`` is
    ``(m-1) x (n-1)``, or ``None`` when ``m == 1`` or ``n == 1``.
    """

    t: float
    theta: FactoredScalar
    h: object
    V: ThematicMatrix
    Wt: ThematicMatrix
    phi_sharp: LaurentMatrix = None
    residuals: dict = field(default_factory=dict)
    warnings: tuple = ()
    grid: int = DEFAULT_GRID
    truncation: int = 0

    @property
    def m(self):
        return self.Wt.size

    @property
    def n(self):
        return self.V.size

    @cached_property
    def u(self):
        return make_u(self.theta, self.h)

    @property
    def v(self):
        return self.V.v

    @property
    def w(self):
        return self.Wt.v

    def invariant_residuals(self, N=DEFAULT_GRID):
        z = circle_grid(N)
        hz = np.asarray(self.h(z), dtype=complex)
        out = {
            "unimodularity": self.u.unimodularity_residual(N),
            "h_l2_norm": abs(float(np.sqrt(np.mean(np.abs(hz) ** 2))) - 1.0),
            "phi_sharp_excess": 0.0,
        }
        if self.phi_sharp is not None:
            out["phi_sharp_excess"] = max(0.0, linf_norm(self.phi_sharp, N) - self.t)
        return out

    def check_invariants(self, N=DEFAULT_GRID):
        if self.t <= 0:
            raise PreconditionError("t must be positive")
        if (self.phi_sharp is None) != (self.m == 1 or self.n == 1):
            raise PreconditionError("phi_sharp must be present exactly when m, n >= 2")
        if self.phi_sharp is not None and self.phi_sharp.shape != (self.m - 1, self.n - 1):
            raise PreconditionError(f"phi_sharp has shape {self.phi_sharp.shape}")
        res = self.invariant_residuals(N)
        if res["phi_sharp_excess"] > 1e-9 * max(1.0, self.t):
            raise PreconditionError(f"||Phi_sharp||_inf exceeds t by {res['phi_sharp_excess']:.3g}")
        if res["unimodularity"] > 1e-10:
            raise PreconditionError(f"|u| deviates from 1 by {res['unimodularity']:.3g}")
        if res["h_l2_norm"] > 1e-10:
            raise PreconditionError(f"||h||_2 deviates from 1 by {res['h_l2_norm']:.3g}")
        return res

    def middle(self, z):
        """``diag(t u, Phi_sharp)`` at points ``z``, shape ``z.shape + (m, n)``."""
        z = np.asarray(z, dtype=complex)
        D = np.zeros(z.shape + (self.m, self.n), complex)
        D[..., 0, 0] = self.t * self.u(z)
        if self.phi_sharp is not None:
            D[..., 1:, 1:] = self.phi_sharp(z)
        return D

    def phi_values(self, z):
        Wstar = np.conj(self.Wt(z))
        Vstar = np.conj(np.swapaxes(self.V(z), -1, -2))
        return Wstar @ self.middle(z) @ Vstar


def _exact_taylor(s):
    """Finite Taylor coefficients of ``s``, or ``None`` for infinite series."""
    if isinstance(s, Polynomial):
        return np.asarray(s.coef, dtype=complex)
    if isinstance(s, FactoredScalar) and not s.zeros_inside and not s.outer_poles:
        return np.asarray(s.taylor(0.0), dtype=complex)
    return None


def _exact_column(col):
    coeffs = [_exact_taylor(e) for e in col.entries]
    return None if any(c is None for c in coeffs) else coeffs


def _coefficient_matrix(rows, shift=0):
    """Analytic symbol from nested lists of Taylor coefficient arrays."""
    m, n = len(rows), len(rows[0])
    K = max(len(c) for row in rows for c in row)
    arr = np.zeros((K, m, n), complex)
    for i, row in enumerate(rows):
        for j, c in enumerate(row):
            arr[: len(c), i, j] = c
    return LaurentMatrix.from_dense(shift, arr)


def _thematic_symbol(T):
    v = _exact_column(T.v)
    if v is None:
        return None
    first = _coefficient_matrix([[c] for c in v])
    if T.theta is None:
        return first
    th = _exact_column(T.theta)
    if th is None:
        return None
    second = _coefficient_matrix([[c] for c in th]).conj()
    terms = {}
    for k in set(first.terms) | set(second.terms):
        terms[k] = np.hstack([first.coefficient(k), second.coefficient(k)])
    return LaurentMatrix(first.m, 2, terms)


def _exact_phi(data):
    """``Phi`` by coefficient arithmetic when ``h`` is constant and all factors are polynomials."""
    theta, h = _exact_taylor(data.theta), _exact_taylor(data.h)
    if theta is None or h is None or np.any(h[1:]):
        return None
    V, Wt = _thematic_symbol(data.V), _thematic_symbol(data.Wt)
    if V is None or Wt is None:
        return None
    u = _coefficient_matrix([[theta * (np.conj(h[0]) / h[0])]], shift=1).conj()
    terms = {}
    for k in set(u.terms) | (set() if data.phi_sharp is None else set(data.phi_sharp.terms)):
        D = np.zeros((data.m, data.n), complex)
        D[0, 0] = data.t * u.coefficient(k)[0, 0]
        if data.phi_sharp is not None:
            D[1:, 1:] = data.phi_sharp.coefficient(k)
        terms[k] = D
    return Wt.conj() @ LaurentMatrix(data.m, data.n, terms) @ V.adjoint()


def construct_phi(data, check=True):
    """Assemble ``Phi`` from factorization data.

    Polynomial data with constant ``h`` is multiplied out exactly; otherwise
    the product is sampled on a grid and Fourier-recovered.
    """
    if check:
        data.check_invariants()
    exact = _exact_phi(data)
    if exact is not None:
        return exact
    return LaurentMatrix.from_function(data.phi_values, data.m, data.n)


def _scalar_phase(column):
    """Unimodular constant carried by a length-1 inner column."""
    c = complex(np.asarray(column(np.array([1.0 + 0j])))[0, 0])
    return c / abs(c)


def factorize(phi, tol=1e-8, N=DEFAULT_GRID, cap=TRUNCATION_CAP, block_tol=BLOCK_TOL):
    """Thematic factorization of a badly approximable symbol of size at most 2x2."""
    if max(phi.m, phi.n) > 2:
        raise UnsupportedSizeError(
            f"symbols up to 2x2 are supported, got {phi.m}x{phi.n}"
        )
    if phi.is_zero:
        raise PreconditionError("zero symbol")
    diag = check_badly_approximable(phi, tol=tol, N=N, cap=cap)
    if not diag.verdict:
        raise NotBadlyApproximableError(
            f"not badly approximable: ||Phi||_inf - ||H_Phi|| = {diag.gap:.6g}",
            gap=diag.gap,
            diagnostic=diag,
        )
    md = diag.maximizing
    t = md.sigma
    theta1, h1, v = inner_outer_column(md.f, N=N)
    theta2, h2, w = inner_outer_column(md.g, N=N)
    z = circle_grid(N)
    mod1 = np.abs(np.asarray(h1(z), dtype=complex))
    mod2 = np.abs(np.asarray(h2(z), dtype=complex))
    outer_mismatch = float(np.abs(mod1 - mod2).max() / mod1.max())
    h = normalized_outer(h1)
    theta = theta1 * theta2
    # length-1 columns are unimodular constants; fold them into theta
    if phi.n == 1:
        theta = theta * _scalar_phase(v.column)
        V = ThematicMatrix.identity(1)
    else:
        V = thematic_complete(v)
    if phi.m == 1:
        theta = theta * _scalar_phase(w.column)
        Wt = ThematicMatrix.identity(1)
    else:
        Wt = thematic_complete(w)
    u = make_u(theta, h)
    Wz = np.swapaxes(Wt(z), -1, -2)
    M = Wz @ phi.grid_values(N) @ V(z)
    r11 = float(np.abs(M[:, 0, 0] - t * u(z)).max())
    off = 0.0
    if phi.n > 1:
        off = max(off, float(np.abs(M[:, 0, 1:]).max()))
    if phi.m > 1:
        off = max(off, float(np.abs(M[:, 1:, 0]).max()))
    if r11 > block_tol * max(1.0, t) or off > block_tol * max(1.0, t):
        raise FactorizationError(
            f"W Phi V is not block diagonal: corner residual {r11:.3g}, off-diagonal {off:.3g}",
            residual=max(r11, off),
        )
    phi_sharp = None
    if phi.m > 1 and phi.n > 1:
        phi_sharp = LaurentMatrix.from_samples(M[:, 1:, 1:])
    residuals = {
        "gap": diag.gap,
        "flatness": diag.flatness_residual,
        "corner": r11,
        "offdiagonal": off,
        "outer_mismatch": outer_mismatch,
        "v_isometry": v.isometry_residual,
        "w_isometry": w.isometry_residual,
        "analytic_leak": md.plus_residual,
    }
    return FactorizationData(
        t=t,
        theta=theta,
        h=h,
        V=V,
        Wt=Wt,
        phi_sharp=phi_sharp,
        residuals=residuals,
        warnings=md.warnings,
        grid=N,
        truncation=md.truncation,
    )


def reconstruction_residual(phi, data):
    """Largest coefficient difference between ``phi`` and ``construct_phi(data)``."""
    return construct_phi(data, check=False).max_coefficient_diff(phi)


@dataclass(frozen=True, eq=False)
class DualExtremalCertificate:
    psi: LaurentMatrix
    pairing: complex
    dist: float
    norm_residual: float
    pairing_residual: float
    max_second_singular: float
    grid: int
    truncation: int
    certified: bool
    tol: float


def _rank_profile(psi, N):
    if min(psi.shape) < 2 or psi.is_zero:
        return 0.0
    s = np.linalg.svd(psi.grid_values(N), compute_uv=False)
    return float(s[:, 1].max())


def _certificate(phi, psi, dist, tol, N, truncation):
    norm = l1_trace_norm(psi, N)
    pairing = trace_pairing(phi, psi)
    norm_res = abs(norm - 1.0)
    pair_res = abs(pairing - dist)
    certified = norm_res <= tol and pair_res <= tol
    return DualExtremalCertificate(
        psi=psi,
        pairing=pairing,
        dist=float(dist),
        norm_residual=float(norm_res),
        pairing_residual=float(pair_res),
        max_second_singular=_rank_profile(psi, N),
        grid=N,
        truncation=truncation,
        certified=bool(certified),
        tol=tol,
    )


def psi_from_data(data):
    """``Psi = z theta h^2 v w^t`` as an ``n x m`` symbol."""
    theta, h = _exact_taylor(data.theta), _exact_taylor(data.h)
    v, w = _exact_column(data.v), _exact_column(data.w)
    if not any(x is None for x in (theta, h, v, w)):
        scal = np.convolve(theta, np.convolve(h, h))
        rows = [[np.convolve(scal, np.convolve(a, b)) for b in w] for a in v]
        return _coefficient_matrix(rows, shift=1)

    def values(z):
        z = np.asarray(z, dtype=complex)
        scal = z * data.theta(z) * np.asarray(data.h(z), dtype=complex) ** 2
        return scal[:, None, None] * data.v(z)[:, :, None] * data.w(z)[:, None, :]

    return LaurentMatrix.from_function(values, data.n, data.m)


def dual_extremal(data, phi=None, tol=1e-8, N=DEFAULT_GRID):
    """Dual extremal function of ``phi`` (default ``construct_phi(data)``) with its certificate."""
    data.check_invariants(N)
    if phi is None:
        phi = construct_phi(data, check=False)
    psi = psi_from_data(data)
    return _certificate(phi, psi, data.t, tol, N, data.truncation)


def sarason_rank_one(data):
    """Rank-one factors ``Q = h v e1^t`` and ``R = z theta h e1 w^t`` (square, padded)."""
    data.check_invariants()
    s = max(data.m, data.n)
    theta, h = _exact_taylor(data.theta), _exact_taylor(data.h)
    v, w = _exact_column(data.v), _exact_column(data.w)
    if not any(x is None for x in (theta, h, v, w)):
        zero = np.zeros(1, complex)
        q_rows = [[zero] * s for _ in range(s)]
        r_rows = [[zero] * s for _ in range(s)]
        for i, a in enumerate(v):
            q_rows[i][0] = np.convolve(h, a)
        th = np.convolve(theta, h)
        for j, b in enumerate(w):
            r_rows[0][j] = np.convolve(th, b)
        return _coefficient_matrix(q_rows), _coefficient_matrix(r_rows, shift=1)

    def pad(col, z):
        out = np.zeros(z.shape + (s,), complex)
        out[..., : col.dimension] = col(z)
        return out

    def q_values(z):
        Q = np.zeros(z.shape + (s, s), complex)
        Q[..., :, 0] = np.asarray(data.h(z), dtype=complex)[:, None] * pad(data.v, z)
        return Q

    def r_values(z):
        R = np.zeros(z.shape + (s, s), complex)
        scal = z * data.theta(z) * np.asarray(data.h(z), dtype=complex)
        R[..., 0, :] = scal[:, None] * pad(data.w, z)
        return R

    Q = LaurentMatrix.from_function(q_values, s, s)
    R = LaurentMatrix.from_function(r_values, s, s)
    return Q, R


@dataclass(frozen=True)
class ChainReport:
    pairing: complex
    column_sum: complex
    majorant: float
    hankel_norm: float
    q_norm: float
    r_norm: float
    identity_holds: bool
    bound_holds: bool
    equality: bool
    maximizing_columns: tuple
    column_residuals: tuple


def duality_chain_check(phi, Q, R, tol=1e-9, cap=TRUNCATION_CAP):
    """Evaluate the Cauchy-Schwarz chain ``pairing = sum_j <H Qe_j, R^*e_j> <= ||H|| ||Q|| ||R||``."""
    P = pad_to_square(phi)
    s = P.m
    if Q.shape != (s, s) or R.shape != (s, s):
        raise ShapeError(f"Q and R must be {s}x{s}, got {Q.shape} and {R.shape}")
    if not Q.is_analytic or not R.vanishes_at_zero:
        raise ShapeError("Q must be analytic and R must vanish at the origin")
    pairing = trace_pairing(P, Q @ R)
    hn = norm_and_maximizer(P, cap=cap).sigma
    trunc = max(P.negative_bandwidth, (Q.kmax or 0) + 1, 1)
    H = build_hankel(P, trunc)
    column_sum = 0j
    maximizing, residuals = [], []
    Rd = R.dense(0, max(R.kmax or 0, trunc + 1))  # Rd[k] = R^(k)
    for j in range(s):
        x = Q.block(range(s), [j]).dense(0, Q.kmax)[:, :, 0] if not Q.is_zero else np.zeros((1, s))
        y = H.apply(x)  # y[i] = coefficient of z^(-1-i)
        blocks = Rd[1 : 1 + trunc, j, :]
        column_sum += np.sum(y[: len(blocks)] * blocks)
        qn = np.linalg.norm(x)
        if qn > 0:
            res = abs(np.linalg.norm(y) - hn * qn)
            residuals.append(float(res))
            if res <= tol * max(1.0, hn * qn):
                maximizing.append(j)
    qn, rn = Q.l2_norm(), R.l2_norm()
    majorant = hn * qn * rn
    identity = abs(pairing - column_sum) <= tol
    bound = abs(column_sum) <= majorant + tol
    equality = identity and abs(pairing - majorant) <= tol
    return ChainReport(
        pairing=complex(pairing),
        column_sum=complex(column_sum),
        majorant=float(majorant),
        hankel_norm=float(hn),
        q_norm=qn,
        r_norm=rn,
        identity_holds=bool(identity),
        bound_holds=bool(bound),
        equality=bool(equality),
        maximizing_columns=tuple(maximizing),
        column_residuals=tuple(residuals),
    )


def verify_dual_extremal(phi, psi, tol=1e-8, N=DEFAULT_GRID, cap=TRUNCATION_CAP):
    """Certify ``psi`` as a dual extremal function of ``phi``."""
    if psi.shape != (phi.n, phi.m):
        raise PreconditionError(f"Psi must be {phi.n}x{phi.m}, got {psi.m}x{psi.n}")
    if not psi.vanishes_at_zero:
        raise PreconditionError("Psi must be analytic and vanish at the origin")
    try:
        md = norm_and_maximizer(phi, cap=cap)
        dist, trunc = md.sigma, md.truncation
    except ZeroHankelError:
        dist, trunc = 0.0, 0
    return _certificate(phi, psi, dist, tol, N, trunc)


@dataclass(frozen=True)
class ShiftReport:
    pairing: complex
    shifted_pairing: complex
    pairings_equal: bool
    hankel_equal: bool
    verdicts_agree: bool


def shift_by_analytic(phi, F, psi, tol=1e-8):
    """Check that an analytic shift ``Phi - F`` leaves pairing and Hankel data unchanged."""
    if not F.is_analytic:
        raise PreconditionError("F must be analytic")
    if not psi.vanishes_at_zero:
        raise PreconditionError("Psi must vanish at the origin")
    shifted = phi - F
    p0 = trace_pairing(phi, psi)
    p1 = trace_pairing(shifted, psi)
    N = max(phi.negative_bandwidth, shifted.negative_bandwidth, 1)
    same_hankel = np.array_equal(build_hankel(phi, N).matrix, build_hankel(shifted, N).matrix)
    agree = True
    if not riesz_is_zero(phi):
        c0 = verify_dual_extremal(phi, psi, tol)
        c1 = verify_dual_extremal(shifted, psi, tol)
        agree = c0.certified == c1.certified
    return ShiftReport(p0, p1, p0 == p1, bool(same_hankel), bool(agree))


def riesz_is_zero(phi):
    return phi.negative_bandwidth == 0


@dataclass(frozen=True)
class ColumnCase:
    t: float
    u: object
    Wt: ThematicMatrix
    data: FactorizationData
    reconstruction_residual: float


def column_case_factorize(phi, tol=1e-8, N=DEFAULT_GRID):
    """``Phi = W^* (t u, 0)^t`` for a 2x1 badly approximable column."""
    if phi.shape != (2, 1):
        raise ShapeError(f"column case needs a 2x1 symbol, got {phi.m}x{phi.n}")
    data = factorize(phi, tol=tol, N=N)
    return ColumnCase(data.t, data.u, data.Wt, data, reconstruction_residual(phi, data))


@dataclass(frozen=True)
class ScalarCase:
    accepted: bool
    gap: float
    t: float = None
    theta: FactoredScalar = None
    h: object = None
    residual: float = None


def scalar_case_check(phi, tol=1e-8, N=DEFAULT_GRID):
    """Write a scalar badly approximable ``phi`` as ``t conj(z theta h) / h``, or reject it."""
    if phi.shape != (1, 1):
        raise ShapeError("scalar case needs a 1x1 symbol")
    try:
        data = factorize(phi, tol=tol, N=N)
    except NotBadlyApproximableError as exc:
        return ScalarCase(False, exc.gap)
    z = circle_grid(N)
    rec = data.t * data.u(z)
    residual = float(np.abs(rec - phi.grid_values(N)[:, 0, 0]).max())
    return ScalarCase(True, data.residuals["gap"], data.t, data.theta, data.h, residual)
