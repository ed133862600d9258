import numpy as np
import pytest
from hypothesis import given, strategies as st

from badapprox.errors import DegeneracyError, DomainError, ZeroHankelError
from badapprox.hankel import (
    build_hankel,
    check_badly_approximable,
    fix_phase,
    flatness_residual,
    norm_and_maximizer,
    svd_top,
)
from badapprox.symbols import LaurentMatrix, linf_norm
from conftest import SQ, worked_phi

R2 = np.sqrt(2)


@st.composite
def laurent(draw, lo=-6, hi=3, m=None, n=None):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    m = m or draw(st.integers(1, 2))
    n = n or draw(st.integers(1, 2))
    K = hi - lo + 1
    return LaurentMatrix.from_dense(lo, rng.normal(size=(K, m, n)) + 1j * rng.normal(size=(K, m, n)))


def test_build_hankel_monomial():
    H = build_hankel(LaurentMatrix.scalar({-1: 1}), 2)
    np.testing.assert_array_equal(H.matrix, [[1, 0], [0, 0]])
    assert H.exact


def test_build_hankel_two_terms():
    H = build_hankel(LaurentMatrix.scalar({-1: 1, -2: 0.5}), 2)
    np.testing.assert_array_equal(H.matrix, [[1, 0.5], [0.5, 0]])
    assert H.exact
    assert not build_hankel(LaurentMatrix.scalar({-3: 1}), 2).exact


def test_build_hankel_analytic_is_zero():
    H = build_hankel(LaurentMatrix.scalar({0: 1, 2: 3}), 4)
    assert not np.any(H.matrix)


def test_build_hankel_blocks():
    phi = worked_phi()
    H = build_hankel(phi, 3)
    np.testing.assert_array_equal(H.block(0, 0), phi.coefficient(-1))
    np.testing.assert_array_equal(H.block(0, 1), phi.coefficient(-2))
    np.testing.assert_array_equal(H.block(1, 0), phi.coefficient(-2))
    with pytest.raises(DomainError):
        build_hankel(phi, 0)


@given(laurent())
def test_hankel_constant_antidiagonals(phi):
    H = build_hankel(phi, 5)
    for j in range(4):
        for k in range(1, 5):
            np.testing.assert_array_equal(H.block(j, k), H.block(j + 1, k - 1))


@given(laurent(), laurent(lo=0, hi=4))
def test_hankel_ignores_analytic_part(phi, F):
    if F.shape != phi.shape:
        F = LaurentMatrix(phi.m, phi.n, {k: np.resize(A, phi.shape) for k, A in F.terms.items()})
    np.testing.assert_array_equal(build_hankel(phi, 7).matrix, build_hankel(phi + F, 7).matrix)


def test_hankel_apply_is_riesz_projection():
    phi = LaurentMatrix.scalar({-2: 1, -1: 2, 1: 5})
    y = build_hankel(phi, 3).apply([[1], [3]])  # f = 1 + 3z
    # P_-(phi f) = (2 + 3) /z... coefficients of z^-1, z^-2, z^-3
    np.testing.assert_allclose(y[:, 0], [2 + 3, 1, 0])


def test_svd_top_examples():
    top = svd_top([[1, 0], [0, 0]])
    assert (top.sigma1, top.sigma2) == (1, 0)
    np.testing.assert_allclose(top.vector, [1, 0])
    top = svd_top([[1, 0.5], [0.5, 0]])
    assert top.sigma1 == pytest.approx((1 + R2) / 2, abs=1e-15)
    assert top.sigma2 == pytest.approx((R2 - 1) / 2, abs=1e-15)
    assert not top.tie
    top = svd_top(np.eye(2))
    assert top.sigma1 == top.sigma2 == pytest.approx(1) and top.tie
    with pytest.raises(DegeneracyError):
        svd_top(np.zeros((2, 2)))


def test_fix_phase():
    x = fix_phase(np.array([0, 1j, 1]))
    assert x[1] == pytest.approx(1)
    assert x[2] == pytest.approx(-1j)


def test_maximizer_monomial():
    md = norm_and_maximizer(LaurentMatrix.scalar({-1: 1}))
    assert md.sigma == pytest.approx(1)
    np.testing.assert_allclose(md.f.taylor()[:, 0], [1], atol=1e-15)
    np.testing.assert_allclose(md.g.taylor()[:, 0], [1], atol=1e-15)
    assert md.exact


def test_maximizer_two_terms():
    md = norm_and_maximizer(LaurentMatrix.scalar({-1: 1, -2: 0.5}))
    assert md.sigma == pytest.approx((1 + R2) / 2, abs=1e-14)
    f = md.f.taylor()[:, 0]
    np.testing.assert_allclose(f[:2] / f[0], [1, 1 / (1 + R2)], atol=1e-14)
    assert np.abs(f[2:]).max(initial=0) < 1e-14


def test_maximizer_worked_fixture():
    md = norm_and_maximizer(worked_phi())
    assert md.sigma == pytest.approx(1, abs=1e-14)
    f = md.f.taylor()
    np.testing.assert_allclose(f[:2], [[SQ, 0], [0, SQ]], atol=1e-14)
    np.testing.assert_allclose(md.g.taylor()[:1], [[1, 0]], atol=1e-14)
    assert md.sigma2 == pytest.approx(SQ, abs=1e-14)
    assert not md.degenerate


def test_maximizer_degenerate_kernel_choice():
    # every z^j with j <= 1 is maximizing for conj(z)^2; the convention picks f = 1
    md = norm_and_maximizer(LaurentMatrix.scalar({-2: 1}))
    np.testing.assert_allclose(md.f.taylor()[:, 0], [1], atol=1e-14)
    assert md.multiplicity == 2


def test_zero_hankel():
    with pytest.raises(ZeroHankelError):
        norm_and_maximizer(LaurentMatrix.scalar({0: 1, 1: 2}))


def test_maximizer_long_symbol_truncation_doubling():
    # bandwidth above the cap forces the doubling schedule
    coeffs = {-k: 0.5**k for k in range(1, 60)}
    md = norm_and_maximizer(LaurentMatrix.scalar(coeffs), cap=32)
    exact = norm_and_maximizer(LaurentMatrix.scalar(coeffs))
    assert md.sigma == pytest.approx(exact.sigma, abs=1e-8)


@given(laurent())
def test_maximizing_property(phi):
    md = norm_and_maximizer(phi)
    y = build_hankel(phi, md.truncation).apply(md.f_coeffs)
    assert abs(np.linalg.norm(y) - md.sigma) <= 1e-9 * max(1, md.sigma)
    assert np.linalg.norm(md.f_coeffs) == pytest.approx(1)


@given(laurent())
def test_exact_truncation_stable_under_doubling(phi):
    md = norm_and_maximizer(phi)
    H = build_hankel(phi, 2 * md.truncation)
    assert np.linalg.norm(H.matrix, 2) == pytest.approx(md.sigma, rel=1e-13)


@given(laurent(), laurent(lo=0, hi=6))
def test_nehari_upper_bound(phi, F):
    if F.shape != phi.shape:
        F = LaurentMatrix(phi.m, phi.n, {k: np.resize(A, phi.shape) for k, A in F.terms.items()})
    sigma = norm_and_maximizer(phi).sigma
    assert sigma <= linf_norm(phi - F) + 1e-9


def test_badly_approximable_examples():
    d = check_badly_approximable(LaurentMatrix.scalar({-1: 1}))
    assert d.verdict and abs(d.gap) < 1e-14
    d = check_badly_approximable(LaurentMatrix.scalar({-1: 1, 0: 0.5}))
    assert not d.verdict
    assert d.hankel_norm == pytest.approx(1) and d.linf_norm == pytest.approx(1.5)
    assert d.gap == pytest.approx(0.5, abs=1e-10)
    d = check_badly_approximable(worked_phi())
    assert d.verdict and d.flatness_residual < 1e-12
    with pytest.raises(DomainError):
        check_badly_approximable(LaurentMatrix.zero(1, 1))


def test_flatness_on_fixture():
    phi = worked_phi()
    md = norm_and_maximizer(phi)
    assert flatness_residual(phi, md) < 1e-14
