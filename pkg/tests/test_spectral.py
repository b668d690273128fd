import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigenphase.ensemble import one_factor_sample, woe_sample, EnsembleSpec
from eigenphase.errors import BadGroupCount, NotSymmetric, ZeroMatrix
from eigenphase.spectral import (
    abs_power,
    count_group_modes,
    marchenko_pastur_upper,
    market_mode,
    mode_split,
    perron_centrality,
    symmetric_eigen,
)

from oracles import charpoly, charpoly_eigenvalues, top_eigenvector_mp


def test_charpoly_oracle_sanity():
    # det([[2,1],[1,2]] - x I) = x^2 - 4x + 3
    assert charpoly([[2, 1], [1, 2]]) == [3, -4, 1]
    assert charpoly_eigenvalues([[2, 1], [1, 2]]) == pytest.approx([3, 1], abs=1e-30)


def test_identity_eigenvalues():
    d = symmetric_eigen(np.eye(3))
    assert d.eigenvalues.tolist() == [1, 1, 1]


def test_two_by_two():
    d = symmetric_eigen(np.array([[2.0, 1], [1, 2]]))
    np.testing.assert_allclose(d.eigenvalues, [3, 1], atol=1e-15)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(d.vector(0), [s, s], atol=1e-15)
    np.testing.assert_allclose(d.vector(1), [s, -s], atol=1e-15)


@pytest.mark.parametrize("seed", range(20))
def test_random_4x4_against_characteristic_polynomial(seed):
    a = np.random.default_rng(seed).uniform(-1, 1, (4, 4))
    a = a + a.T
    d = symmetric_eigen(a)
    np.testing.assert_allclose(d.eigenvalues, charpoly_eigenvalues(a), rtol=0, atol=1e-8)


def test_not_symmetric():
    with pytest.raises(NotSymmetric):
        symmetric_eigen(np.array([[1.0, 2], [0, 1]]))


sym_st = st.integers(2, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**32 - 1)))


def _random_sym(n, seed, scale=1.0):
    a = np.random.default_rng(seed).normal(0, scale, (n, n))
    return a + a.T


@settings(max_examples=60, deadline=None)
@given(sym_st)
def test_decomposition_invariants(ns):
    a = _random_sym(*ns)
    d = symmetric_eigen(a)
    v, w = d.eigenvectors, d.eigenvalues
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.abs(v.T @ v - np.eye(len(w)))) <= 1e-10
    assert np.max(np.abs(d.reconstruct() - a)) <= 1e-8 * np.max(np.abs(a))
    # sign convention: the largest-magnitude entry of each vector is non-negative
    idx = np.argmax(np.abs(v), axis=0)
    assert np.all(v[idx, np.arange(v.shape[1])] >= 0)


@settings(max_examples=30, deadline=None)
@given(sym_st)
def test_decomposition_is_bitwise_deterministic(ns):
    a = _random_sym(*ns)
    d1, d2 = symmetric_eigen(a), symmetric_eigen(a)
    assert d1.eigenvectors.tobytes() == d2.eigenvectors.tobytes()
    assert d1.eigenvalues.tobytes() == d2.eigenvalues.tobytes()


@pytest.mark.parametrize("seed", range(5))
def test_trace_of_correlation_matrix(seed):
    c = one_factor_sample(30, 25, 0.4, seed)  # rank deficient on purpose
    assert math.fsum(symmetric_eigen(c).eigenvalues) == pytest.approx(30, abs=1e-8)


def test_abs_power_examples():
    assert abs_power(np.array([[-0.5]]), 2)[0, 0] == 0.25
    c = np.array([[1.0, 0.3], [0.3, 1.0]])
    np.testing.assert_array_equal(abs_power(c, 1), c)
    assert abs_power(np.array([[-0.3]]), 3)[0, 0] == pytest.approx(0.027, abs=1e-17)
    with pytest.raises(ValueError):
        abs_power(c, 0)


def test_perron_uniform_cases():
    for n in (2, 5, 194):
        cv = perron_centrality(np.ones((n, n)))
        np.testing.assert_allclose(cv.p, 1 / n, atol=1e-15)
    cv = perron_centrality(np.eye(2))
    np.testing.assert_array_equal(cv.p, [0.5, 0.5])


def test_perron_three_by_three_against_eigensolvers():
    a = np.array([[1, 0.25, 0.25], [0.25, 1, 0.04], [0.25, 0.04, 1]])
    cv = perron_centrality(a)
    assert math.fsum(cv.p) == pytest.approx(1, abs=1e-12)
    top = np.abs(symmetric_eigen(a).vector(0))
    np.testing.assert_allclose(cv.p, top / top.sum(), atol=1e-10, rtol=0)
    np.testing.assert_allclose(cv.p, top_eigenvector_mp(a), atol=1e-10, rtol=0)
    assert cv.p[0] > cv.p[1] == pytest.approx(cv.p[2], abs=1e-13)


def test_perron_zero_matrix():
    with pytest.raises(ZeroMatrix):
        perron_centrality(np.zeros((3, 3)))


def test_perron_rejects_negative_entries():
    with pytest.raises(ValueError):
        perron_centrality(np.array([[1.0, -0.1], [-0.1, 1.0]]))


def test_perron_fallback_on_oscillation():
    # bipartite: eigenvalues +1 and -1, power iteration from a non-eigenvector never settles
    a = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    cv = perron_centrality(a)
    top = np.abs(symmetric_eigen(a).vector(0))
    np.testing.assert_allclose(cv.p, top / top.sum(), atol=1e-12)
    assert cv.method == "eigen" and cv.converged


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_perron_consistency_and_scale_invariance(n, seed, c):
    x = np.random.default_rng(seed).uniform(0.01, 1, (n, n))
    a = x + x.T
    cv = perron_centrality(a)
    top = np.abs(symmetric_eigen(a).vector(0))
    np.testing.assert_allclose(cv.p, top / top.sum(), atol=1e-10, rtol=0)
    assert np.all(cv.p >= 0) and abs(math.fsum(cv.p) - 1) <= 1e-12
    np.testing.assert_allclose(perron_centrality(c * a).p, cv.p, atol=1e-12, rtol=0)


def test_market_mode_rank_one_matrix():
    n = 6
    c = np.ones((n, n))
    cm = market_mode(symmetric_eigen(c))
    np.testing.assert_allclose(cm, c, atol=1e-14)


def test_market_mode_identity_tie_break():
    for n in (2, 3, 7):
        cm = market_mode(symmetric_eigen(np.eye(n)))
        np.testing.assert_allclose(cm, np.full((n, n), 1 / n), atol=1e-14)


def test_residual_top_eigenvalue_is_second_eigenvalue():
    c = np.array([[1, 0.25, 0.25], [0.25, 1, 0.04], [0.25, 0.04, 1]])
    d = symmetric_eigen(c)
    resid = c - market_mode(d)
    assert charpoly_eigenvalues(resid)[0] == pytest.approx(d.eigenvalues[1], abs=1e-12)
    assert charpoly_eigenvalues(c)[1] == pytest.approx(d.eigenvalues[1], abs=1e-12)


def _matrices():
    yield np.ones((5, 5))
    yield np.eye(5)
    yield np.array([[1, 0.25, 0.25], [0.25, 1, 0.04], [0.25, 0.04, 1]])
    for s in range(5):
        yield woe_sample(EnsembleSpec(12, 20, 5, s), 0)
        yield one_factor_sample(12, 8, 0.7, s)


@pytest.mark.parametrize("c", list(_matrices()))
def test_mode_completeness(c):
    n = c.shape[0]
    d = symmetric_eigen(c)
    for ng in (None, 2, n - 1):
        m = mode_split(c, d, ng)
        assert np.max(np.abs(m.market + m.group_random - c)) <= 1e-10
        if ng is not None:
            assert np.max(np.abs(m.market + m.group + m.random - c)) <= 1e-10


def test_mode_split_boundary_and_rank():
    c = one_factor_sample(10, 50, 0.5, 3)
    d = symmetric_eigen(c)
    m = mode_split(c, d, 9)
    v = d.vector(9)
    np.testing.assert_allclose(m.random, d.eigenvalues[9] * np.outer(v, v), atol=1e-13)


def test_mode_split_default_group_count():
    c = one_factor_sample(194, 400, 0.3, 11)
    m = mode_split(c, n_group=20)
    assert np.linalg.matrix_rank(m.group, tol=1e-8) <= 19
    assert m.n_group == 20


@pytest.mark.parametrize("ng", [1, 5, 0])
def test_bad_group_count(ng):
    c = np.eye(5)
    with pytest.raises(BadGroupCount):
        mode_split(c, n_group=ng)


def test_marchenko_pastur_upper():
    assert marchenko_pastur_upper(1, 1) == 4.0
    assert marchenko_pastur_upper(1, 4) == 2.25
    # 40-digit evaluation of 0.25 (1 + 1/sqrt 2)^2
    assert marchenko_pastur_upper(0.5, 2) == pytest.approx(0.72855339059327376220, abs=1e-15)
    with pytest.raises(ValueError):
        marchenko_pastur_upper(0, 1)


def test_count_group_modes():
    assert count_group_modes([10.0, 5.0, 3.0, 1.0, 0.5], 2.25) == 3
    assert count_group_modes([10.0, 1.0], 2.25) == 1
