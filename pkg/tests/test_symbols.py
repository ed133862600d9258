import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Polynomial

from badapprox.errors import DomainError, ShapeError
from badapprox.grid import adaptive_coefficients, circle_grid, coefficients_from_samples
from badapprox.symbols import (
    AnalyticColumn,
    FactoredScalar,
    LaurentMatrix,
    evaluate,
    l1_trace_norm,
    linf_norm,
    pad_to_square,
    refine_linf_norm,
    riesz_project_minus,
    trace_pairing,
    trace_pairing_quadrature,
)
from conftest import SQ, worked_phi, worked_psi

Z = LaurentMatrix.scalar({-1: 1})


def laurent_strategy(m=None, n=None, kmin=-4, kmax=4):
    dims = st.integers(1, 2)

    @st.composite
    def build(draw):
        mm = m or draw(dims)
        nn = n or draw(dims)
        lo = draw(st.integers(kmin, kmax))
        hi = draw(st.integers(lo, kmax))
        seed = draw(st.integers(0, 2**32 - 1))
        rng = np.random.default_rng(seed)
        K = hi - lo + 1
        coeffs = rng.normal(size=(K, mm, nn)) + 1j * rng.normal(size=(K, mm, nn))
        return LaurentMatrix.from_dense(lo, coeffs)

    return build()


# evaluation


def test_evaluate_conj_z():
    assert evaluate(Z, 1.0) == pytest.approx(1.0)
    assert evaluate(Z, 1j) == pytest.approx(-1j)


def test_evaluate_factored_outer():
    h = FactoredScalar(outer_zeros=(2,), scale=2.0)  # 2 - z
    assert evaluate(h, 1.0) == pytest.approx(1.0)


def test_evaluate_off_circle():
    with pytest.raises(DomainError):
        evaluate(Z, 0.5)


# canonical form


def test_zero_coefficients_pruned():
    sym = LaurentMatrix(1, 1, {-2: [[0.0]], 1: [[1e-16]], 3: [[2.0]]})
    assert sym.freqs == (3,)
    assert sym.kmin == sym.kmax == 3


def test_shape_checked():
    with pytest.raises(ShapeError):
        LaurentMatrix(2, 2, {0: [[1, 0]]})


def test_flags():
    psi = worked_psi()
    assert psi.is_analytic and psi.vanishes_at_zero
    assert worked_phi().is_antianalytic
    assert not LaurentMatrix.scalar({0: 1}).vanishes_at_zero


# projection


def test_riesz_projection_filters():
    A, B, C = np.eye(2), 2 * np.eye(2), 3 * np.eye(2)
    out = riesz_project_minus(LaurentMatrix(2, 2, {-1: A, 0: B, 2: C}))
    assert out.freqs == (-1,)
    np.testing.assert_array_equal(out.coefficient(-1), A)


def test_riesz_projection_of_analytic_is_zero():
    assert riesz_project_minus(LaurentMatrix.scalar({0: 1, 3: 2})).is_zero


def test_riesz_projection_keeps_antianalytic():
    sym = LaurentMatrix.scalar({-3: 1.5})
    assert riesz_project_minus(sym).terms.keys() == sym.terms.keys()


@given(laurent_strategy())
def test_riesz_projection_idempotent_contraction(sym):
    p = riesz_project_minus(sym)
    assert riesz_project_minus(p).max_coefficient_diff(p) == 0
    assert p.l2_norm() <= sym.l2_norm() + 1e-15


# norms


def test_linf_examples():
    assert linf_norm(Z) == pytest.approx(1.0, abs=1e-14)
    assert linf_norm(worked_phi()) == pytest.approx(1.0, abs=1e-14)
    assert linf_norm(LaurentMatrix.scalar({-1: 1, 0: 0.5})) == pytest.approx(1.5, abs=1e-14)


def test_linf_small_grid_rejected():
    with pytest.raises(DomainError):
        linf_norm(Z, 16)


def test_refine_linf_norm_converges():
    value, N, delta = refine_linf_norm(LaurentMatrix.scalar({-1: 1, 0: 0.5, 3: 0.25j}))
    assert delta < 1e-9
    assert value <= linf_norm(LaurentMatrix.scalar({-1: 1, 0: 0.5, 3: 0.25j}), 8 * N) + 1e-9


def test_l1_trace_norm_examples():
    assert l1_trace_norm(LaurentMatrix.scalar({1: 1})) == pytest.approx(1.0, abs=1e-14)
    assert l1_trace_norm(worked_psi()) == pytest.approx(1.0, abs=1e-14)
    assert l1_trace_norm(LaurentMatrix.scalar({1: 2})) == pytest.approx(2.0, abs=1e-14)


@given(laurent_strategy(), st.floats(0, 2 * np.pi))
def test_norms_unimodular_invariant(sym, angle):
    c = np.exp(1j * angle)
    assert linf_norm(sym * c, 256) == pytest.approx(linf_norm(sym, 256), rel=1e-12)
    assert l1_trace_norm(sym * c, 256) == pytest.approx(l1_trace_norm(sym, 256), rel=1e-12)


# pairing


def test_trace_pairing_examples():
    assert trace_pairing(Z, LaurentMatrix.scalar({1: 1})) == 1
    assert trace_pairing(Z, LaurentMatrix.scalar({2: 1})) == 0
    assert trace_pairing(worked_phi(), worked_psi()) == pytest.approx(1.0, abs=1e-15)


def test_trace_pairing_shape_error():
    with pytest.raises(ShapeError):
        trace_pairing(worked_phi(), LaurentMatrix.zero(1, 2))


@given(st.data())
def test_trace_pairing_matches_quadrature(data):
    phi = data.draw(laurent_strategy(kmin=-6, kmax=6))
    psi = data.draw(laurent_strategy(m=phi.n, n=phi.m, kmin=-6, kmax=6))
    exact = trace_pairing(phi, psi)
    quad = trace_pairing_quadrature(phi, psi)
    assert abs(exact - quad) <= 1e-10 * max(1.0, phi.l2_norm() * psi.l2_norm())


@given(st.data())
def test_analytic_annihilates_h1_0(data):
    F = data.draw(laurent_strategy(kmin=0, kmax=4))
    psi = data.draw(laurent_strategy(m=F.n, n=F.m, kmin=1, kmax=5))
    assert trace_pairing(F, psi) == 0


# padding


def test_pad_column():
    col = LaurentMatrix(2, 1, {-1: [[1], [2]]})
    sq = pad_to_square(col)
    assert sq.shape == (2, 2)
    np.testing.assert_array_equal(sq.coefficient(-1), [[1, 0], [2, 0]])


def test_pad_square_identity():
    assert pad_to_square(worked_phi()) is worked_phi() or pad_to_square(worked_phi()).max_coefficient_diff(worked_phi()) == 0


def test_pad_row_preserves_norm():
    row = LaurentMatrix(1, 2, {-1: [[SQ, 0]], -2: [[0, SQ]]})
    sq = pad_to_square(row)
    assert sq.shape == (2, 2)
    assert linf_norm(sq) == linf_norm(row)


@given(laurent_strategy())
def test_pad_preserves_linf(sym):
    assert linf_norm(pad_to_square(sym), 256) == linf_norm(sym, 256)


# algebra against pointwise values


@given(st.data())
def test_product_is_pointwise(data):
    A = data.draw(laurent_strategy())
    B = data.draw(laurent_strategy(m=A.n))
    z = circle_grid(64)
    np.testing.assert_allclose((A @ B)(z), A(z) @ B(z), atol=1e-12)


@given(laurent_strategy())
def test_conj_and_adjoint_pointwise(sym):
    z = circle_grid(64)
    np.testing.assert_allclose(sym.conj()(z), np.conj(sym(z)), atol=1e-13)
    np.testing.assert_allclose(sym.adjoint()(z), np.conj(np.swapaxes(sym(z), -1, -2)), atol=1e-13)


@given(laurent_strategy())
def test_grid_values_match_direct(sym):
    np.testing.assert_allclose(sym.grid_values(8), sym(circle_grid(8)), atol=1e-12)


@given(laurent_strategy())
def test_samples_round_trip(sym):
    back = LaurentMatrix.from_samples(sym.grid_values(32), truncate=0)
    assert back.max_coefficient_diff(sym) < 1e-13


def test_parseval_l2():
    sym = LaurentMatrix.scalar({-1: 3, 2: 4})
    assert sym.l2_norm() == pytest.approx(5.0)


# grid helpers


def test_coefficients_from_samples_frequencies():
    freqs, coeffs = coefficients_from_samples(circle_grid(8) ** -2)
    assert list(freqs) == list(range(-3, 5))
    np.testing.assert_allclose(coeffs[freqs == -2], [1.0])


def test_adaptive_coefficients_geometric():
    freqs, coeffs, N = adaptive_coefficients(lambda z: 1 / (1 - z / 3))
    np.testing.assert_allclose(coeffs[(freqs >= 0) & (freqs < 10)], 3.0 ** -np.arange(10), atol=1e-15)


# factored scalars


def test_factored_invariants_enforced():
    with pytest.raises(DomainError):
        FactoredScalar(zeros_inside=(1.5,))
    with pytest.raises(DomainError):
        FactoredScalar(outer_zeros=(0.5,))
    with pytest.raises(DomainError):
        FactoredScalar(c=2.0)
    with pytest.raises(DomainError):
        FactoredScalar(outer_poles=(1.0,))


def test_factored_evaluation_and_taylor():
    a = 0.3 + 0.2j
    s = FactoredScalar(c=1j, zpower=1, zeros_inside=(a,), outer_zeros=(2.0,), scale=3.0)
    z = np.exp(1j * np.linspace(0, 6, 7))
    direct = 1j * z * (z - a) / (1 - np.conj(a) * z) * 3.0 * (1 - z / 2)
    np.testing.assert_allclose(s(z), direct, atol=1e-14)
    assert np.allclose(Polynomial(s.taylor())(0.4), s(0.4), atol=1e-13)


def test_factored_algebra():
    a = FactoredScalar(zeros_inside=(0.5,), outer_zeros=(2.0,), scale=2.0)
    b = FactoredScalar(c=-1, zeros_inside=(0.5,))
    q = a / b
    assert not q.zeros_inside
    z = circle_grid(16)
    np.testing.assert_allclose(q(z), a(z) / b(z), atol=1e-13)
    h = FactoredScalar(outer_zeros=(3.0,), scale=1.0)
    np.testing.assert_allclose((a / h)(z), a(z) / h(z), atol=1e-13)
    assert (a / h).outer_poles == (3.0,)
    assert FactoredScalar.zero().is_zero
    assert FactoredScalar.constant(-2).scale == 2 and FactoredScalar.constant(-2).c == -1


def test_inner_outer_parts():
    s = FactoredScalar(c=1j, zpower=2, zeros_inside=(0.1,), outer_zeros=(4.0,), scale=0.5)
    assert s.inner_part().is_inner and s.outer_part().is_outer
    assert s.inner_degree == 3
    z = circle_grid(16)
    np.testing.assert_allclose(s.inner_part()(z) * s.outer_part()(z), s(z), atol=1e-14)


def test_analytic_column():
    col = AnalyticColumn.from_coefficients(np.array([[1, 0], [0, 1]]) * SQ)
    z = circle_grid(32)
    np.testing.assert_allclose(np.sum(np.abs(col(z)) ** 2, axis=-1), 1.0)
    assert col.to_laurent().shape == (2, 1)
    assert col.l2_norm() == pytest.approx(1.0)
