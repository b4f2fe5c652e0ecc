import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hbvm_fdepca.errors import InvalidParameterError
from hbvm_fdepca.tableau import build_tableau, gauss_collocation_matrix

pairs = st.integers(1, 16).flatmap(lambda k: st.tuples(st.just(k), st.integers(1, k)))


def test_midpoint():
    tab = build_tableau(1, 1)
    np.testing.assert_array_equal(tab.A, [[0.5]])
    np.testing.assert_array_equal(tab.b, [1.0])
    np.testing.assert_array_equal(tab.c, [0.5])


def test_two_stage_gauss_closed_form():
    d = np.sqrt(3) / 6
    expected = np.array([[0.25, 0.25 - d], [0.25 + d, 0.25]])
    np.testing.assert_allclose(build_tableau(2, 2).A, expected, atol=1e-15)
    np.testing.assert_allclose(gauss_collocation_matrix(2), expected, atol=1e-15)


@pytest.mark.parametrize("s", range(1, 9))
def test_square_case_is_gauss_collocation(s):
    np.testing.assert_allclose(build_tableau(s, s).A, gauss_collocation_matrix(s), atol=1e-12)


@given(pairs)
def test_row_sums_equal_nodes(ks):
    tab = build_tableau(*ks)
    np.testing.assert_allclose(tab.A.sum(axis=1), tab.c, atol=1e-12)


@given(pairs)
def test_shapes_and_factorization(ks):
    k, s = ks
    tab = build_tableau(k, s)
    assert tab.Ps.shape == tab.Is.shape == (k, s)
    assert tab.PtO.shape == (s, k)
    np.testing.assert_allclose(tab.PtO, tab.Ps.T @ tab.omega, rtol=1e-15)
    # the Legendre basis is orthonormal under the k-point rule since s <= k
    np.testing.assert_allclose(tab.PtO @ tab.Ps, np.eye(s), atol=1e-13)


@given(pairs)
def test_quadrature_order_conditions(ks):
    # b A^(j) c^(q) moment conditions of order 2s are implied by
    # b^T A c^(q-1) = 1 / (q (q + 1)) for q <= 2s - 1
    k, s = ks
    tab = build_tableau(k, s)
    for q in range(1, 2 * s):
        assert tab.b @ tab.A @ tab.c ** (q - 1) == pytest.approx(1 / (q * (q + 1)), abs=1e-12)


def test_rank_is_s():
    tab = build_tableau(6, 2)
    assert np.linalg.matrix_rank(tab.A) == 2


@pytest.mark.parametrize("k,s", [(1, 2), (3, 0), (0, 0), (65, 2)])
def test_invalid(k, s):
    with pytest.raises(InvalidParameterError):
        build_tableau(k, s)


def test_error_message():
    with pytest.raises(InvalidParameterError, match="s must satisfy 1 ≤ s ≤ k"):
        build_tableau(1, 2)
