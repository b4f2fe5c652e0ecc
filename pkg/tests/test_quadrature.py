import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import legendre as npleg

from hbvm_fdepca.errors import InvalidParameterError
from hbvm_fdepca.quadrature import MAX_NODES, apply_rule, gauss_legendre


def test_midpoint_and_two_point():
    r1 = gauss_legendre(1)
    np.testing.assert_array_equal(r1.c, [0.5])
    np.testing.assert_array_equal(r1.b, [1.0])
    r2 = gauss_legendre(2)
    d = np.sqrt(3) / 6
    np.testing.assert_allclose(r2.c, [0.5 - d, 0.5 + d], rtol=1e-15)
    np.testing.assert_allclose(r2.b, [0.5, 0.5], rtol=1e-15)
    assert r2.order == 4


@pytest.mark.parametrize("k", [3, 7, 16, 33, 64])
def test_matches_numpy_leggauss(k):
    x, w = npleg.leggauss(k)
    rule = gauss_legendre(k)
    np.testing.assert_allclose(rule.c, (x + 1) / 2, atol=1e-15)
    np.testing.assert_allclose(rule.b, w / 2, rtol=2e-12, atol=1e-16)


@given(st.integers(1, 64))
def test_rule_structure(k):
    rule = gauss_legendre(k)
    assert np.all(np.diff(rule.c) > 0)
    assert 0 < rule.c[0] and rule.c[-1] < 1
    assert np.all(rule.b > 0)
    assert rule.b.sum() == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(rule.c, 1.0 - rule.c[::-1], rtol=0, atol=2.3e-16)
    np.testing.assert_array_equal(rule.b, rule.b[::-1])


@pytest.mark.parametrize("k", range(1, 13))
def test_exact_to_degree_2k_minus_1(k):
    rule = gauss_legendre(k)
    for d in range(2 * k):
        assert apply_rule(rule, rule.c**d) == pytest.approx(1.0 / (d + 1), abs=1e-14)
    # the first degree it misses
    assert abs(apply_rule(rule, rule.c ** (2 * k)) - 1.0 / (2 * k + 1)) > 1e-16


def test_apply_rule_vector_samples():
    rule = gauss_legendre(4)
    samples = np.stack([rule.c, rule.c**2], axis=1)
    np.testing.assert_allclose(apply_rule(rule, samples), [1 / 2, 1 / 3], atol=1e-15)
    with pytest.raises(InvalidParameterError):
        apply_rule(rule, np.ones(3))


def test_cached_and_readonly():
    assert gauss_legendre(5) is gauss_legendre(5)
    with pytest.raises(ValueError):
        gauss_legendre(5).c[0] = 0.0


@pytest.mark.parametrize("k", [0, -2, MAX_NODES + 1, 2.5])
def test_invalid_k(k):
    with pytest.raises(InvalidParameterError):
        gauss_legendre(k)
