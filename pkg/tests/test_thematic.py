import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Polynomial, polynomial as P

from badapprox.errors import PreconditionError, UnsupportedSizeError
from badapprox.grid import circle_grid
from badapprox.scalar_factor import TrigPolynomial, factor_polynomial, fejer_riesz
from badapprox.symbols import AnalyticColumn, FactoredScalar
from badapprox.thematic import (
    ThematicMatrix,
    certify_column,
    inner_outer_column,
    is_thematic,
    thematic_complete,
)
from conftest import SQ

Z = circle_grid(1024)


def column(*coeffs):
    return AnalyticColumn(tuple(Polynomial(np.asarray(c, dtype=complex)) for c in coeffs))


def check_round_trip(f, res):
    fz = f(Z)
    rec = res.theta(Z)[:, None] * np.asarray(res.h(Z))[:, None] * res.v(Z)
    np.testing.assert_allclose(rec, fz, atol=1e-9)
    np.testing.assert_allclose(np.abs(res.h(Z)), np.linalg.norm(fz, axis=1), atol=1e-9)


def test_normalized_column():
    f = column([SQ], [0, SQ])
    res = inner_outer_column(f)
    assert res.theta.inner_degree == 0
    np.testing.assert_allclose(np.asarray(res.h.taylor()), [1], atol=1e-14)
    np.testing.assert_allclose(res.v.column.taylor(), [[SQ, 0], [0, SQ]], atol=1e-14)
    assert res.v.certified()


def test_unnormalized_column():
    f = column([1], [0, 1])
    res = inner_outer_column(f)
    np.testing.assert_allclose(np.asarray(res.h.taylor()), [np.sqrt(2)], atol=1e-14)
    np.testing.assert_allclose(res.v.column.taylor(), [[SQ, 0], [0, SQ]], atol=1e-14)
    check_round_trip(f, res)


def test_common_inner_factor_extracted():
    f = column([0, 1], [0, 0, 1])
    res = inner_outer_column(f)
    assert res.theta.zpower == 1 and not res.theta.zeros_inside
    np.testing.assert_allclose(np.asarray(res.h.taylor()), [np.sqrt(2)], atol=1e-14)
    np.testing.assert_allclose(res.v.column.taylor(), [[SQ, 0], [0, SQ]], atol=1e-14)


def test_trivial_column():
    res = inner_outer_column(column([1], [0]))
    assert res.theta.inner_degree == 0
    np.testing.assert_allclose(res.v.column.taylor(), [[1, 0]], atol=1e-15)


def test_zero_column_rejected():
    with pytest.raises(PreconditionError):
        inner_outer_column(column([0], [0]))


def test_long_column_grid_route():
    rng = np.random.default_rng(3)
    a = 0.8 ** np.arange(80) * (rng.normal(size=80) + 1j * rng.normal(size=80))
    b = 0.8 ** np.arange(80) * (rng.normal(size=80) + 1j * rng.normal(size=80))
    f = column(a, b)
    res = inner_outer_column(f)
    check_round_trip(f, res)
    assert res.v.isometry_residual < 1e-9


@st.composite
def coprime_pair(draw, max_degree=4):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    polys = []
    for _ in range(2):
        d = int(rng.integers(0, max_degree + 1))
        radii = np.where(rng.random(d) < 0.4, rng.uniform(0.2, 0.7, d), rng.uniform(1.4, 3, d))
        roots = radii * np.exp(2j * np.pi * rng.random(d))
        polys.append(complex(rng.normal(), rng.normal()) * P.polyfromroots(roots) if d else np.array([1 + 0j]))
    roots = [np.roots(p[::-1]) if len(p) > 1 else [] for p in polys]
    gap = min((abs(a - b) for a in roots[0] for b in roots[1]), default=1.0)
    assume_ok = gap > 0.05
    return polys, assume_ok


@given(coprime_pair())
def test_inner_outer_column_round_trip(data):
    polys, ok = data
    if not ok:
        return
    theta = FactoredScalar(zeros_inside=(0.4j,))
    f = AnalyticColumn(tuple(theta * factor_polynomial(p) for p in polys))
    res = inner_outer_column(f)
    check_round_trip(f, res)
    assert res.theta.inner_degree == 1


def test_complete_identity():
    V = thematic_complete(AnalyticColumn((FactoredScalar(), FactoredScalar.zero())))
    np.testing.assert_allclose(V(Z), np.broadcast_to(np.eye(2), (len(Z), 2, 2)), atol=1e-15)


def test_complete_worked_column():
    V = thematic_complete(column([SQ], [0, SQ]))
    expected = np.stack(
        [np.stack([SQ * np.ones_like(Z), -SQ * np.conj(Z)], -1), np.stack([SQ * Z, SQ * np.ones_like(Z)], -1)],
        -2,
    )
    np.testing.assert_allclose(V(Z), expected, atol=1e-15)
    assert is_thematic(V).passed


def test_complete_rejects_common_factor():
    with pytest.raises(PreconditionError):
        thematic_complete(column([0, 1], [0]))


def test_complete_rejects_non_inner():
    with pytest.raises(PreconditionError):
        thematic_complete(column([1], [1]))


def test_complete_scope():
    with pytest.raises(UnsupportedSizeError):
        thematic_complete(column([1], [0], [0]))
    with pytest.raises(UnsupportedSizeError):
        ThematicMatrix.identity(3)


def test_is_thematic_examples():
    v = is_thematic(ThematicMatrix.identity(2))
    assert v.passed and v.unitarity_residual == 0
    bad = ThematicMatrix(column([1], [0]), column([0], [2]))
    verdict = is_thematic(bad)
    assert not verdict.passed
    assert verdict.unitarity_residual == pytest.approx(1.0)


@given(coprime_pair())
def test_random_completion_is_thematic(data):
    polys, ok = data
    if not ok:
        return
    k = fejer_riesz(TrigPolynomial.modulus_squared(polys))
    if k.outer_zeros and min(abs(b) for b in k.outer_zeros) < 1.05:
        return
    v = AnalyticColumn(tuple(factor_polynomial(p) / k for p in polys))
    V = thematic_complete(certify_column(v))
    verdict = is_thematic(V)
    assert verdict.passed
    assert verdict.unitarity_residual < 1e-9
    assert verdict.determinant_residual < 1e-9
    # unitary invariance of pointwise norms
    rng = np.random.default_rng(0)
    x = rng.normal(size=(len(Z), 2)) + 1j * rng.normal(size=(len(Z), 2))
    np.testing.assert_allclose(np.linalg.norm(np.einsum("tij,tj->ti", V(Z), x), axis=1), np.linalg.norm(x, axis=1))
