import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nsslab.datagen import paper_gaussian_spec, sample_gaussian_mixture
from nsslab.exceptions import BadDimension, DimensionMismatch, EmptyClass, NotSymmetric
from nsslab.linalg import centered_scatter, full_eigenpairs, mean_vector, principal_angles, top_eigenpairs

from oracles import charpoly_eigenvalues, random_orthonormal_candidates

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def symmetric_matrices(draw, max_size=6):
    n = draw(st.integers(1, max_size))
    A = draw(arrays(float, (n, n), elements=finite))
    return (A + A.T) / 2


def test_mean_vector_examples():
    np.testing.assert_array_equal(mean_vector([(1, 2, 3), (-1, -2, -3)]), [0, 0, 0])
    np.testing.assert_array_equal(mean_vector([(2, 0)]), [2, 0])


def test_mean_vector_of_gaussian_class():
    data = sample_gaussian_mixture(paper_gaussian_spec(), 1200, seed=7)
    first = data.X[data.y == 1]
    assert len(first) == 400
    # per-coordinate sd <= sqrt(3), so 0.4 is > 4.6 standard errors
    assert np.all(np.abs(mean_vector(first) - [1, 2, 3]) < 0.4)


def test_mean_vector_errors():
    with pytest.raises(EmptyClass):
        mean_vector([])
    with pytest.raises(DimensionMismatch):
        mean_vector([(1, 2), (1, 2, 3)])


def test_centered_scatter_examples():
    np.testing.assert_array_equal(centered_scatter([(1, 0), (-1, 0)], (0, 0)), [[2, 0], [0, 0]])
    np.testing.assert_array_equal(centered_scatter([(1, 1)], (1, 1)), np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        centered_scatter([(1, 1)], (1, 1, 1))


@given(arrays(float, st.tuples(st.integers(1, 12), st.integers(1, 6)), elements=finite))
def test_centered_scatter_is_symmetric_psd(X):
    S = centered_scatter(X, X.mean(axis=0))
    assert np.abs(S - S.T).max() <= 1e-12
    scale = max(1.0, np.abs(S).max())
    assert np.linalg.eigvalsh(S).min() >= -1e-9 * scale


def test_top_eigenpairs_diagonal():
    values, vectors = top_eigenpairs(np.diag([3.0, 2.0, 1.0]), 2)
    np.testing.assert_allclose(values, [3, 2])
    np.testing.assert_allclose(np.abs(vectors), [[1, 0], [0, 1], [0, 0]], atol=1e-12)


def test_top_eigenpairs_degenerate_identity():
    values, vectors = top_eigenpairs(np.eye(3), 1)
    v = vectors[:, 0]
    assert values[0] == pytest.approx(1.0)
    np.testing.assert_allclose(np.eye(3) @ v, v, atol=1e-12)
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_top_eigenpairs_two_by_two():
    # lambda^2 - 4 lambda + 3 = 0 -> 3, 1
    values, vectors = top_eigenpairs(np.array([[2.0, 1.0], [1.0, 2.0]]), 1)
    assert values[0] == pytest.approx(3.0, abs=1e-12)
    np.testing.assert_allclose(vectors[:, 0], np.array([1, 1]) / math.sqrt(2), atol=1e-12)


def test_top_eigenpairs_errors():
    with pytest.raises(NotSymmetric):
        top_eigenpairs(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)
    with pytest.raises(BadDimension):
        top_eigenpairs(np.eye(3), 0)
    with pytest.raises(BadDimension):
        top_eigenpairs(np.eye(3), 4)


def test_sign_policy_largest_entry_positive():
    S = np.array([[1.0, -2.0], [-2.0, 5.0]])
    _, vectors = full_eigenpairs(S)
    for v in vectors.T:
        assert v[np.argmax(np.abs(v))] > 0


@settings(max_examples=150, deadline=None)
@given(symmetric_matrices(), st.data())
def test_eigenpairs_invariants(S, data):
    D = S.shape[0]
    d = data.draw(st.integers(1, D))
    values, B = top_eigenpairs(S, d)
    assert np.all(np.diff(values) <= 0)
    np.testing.assert_allclose(B.T @ B, np.eye(d), atol=1e-8)
    for lam, v in zip(values, B.T):
        assert np.linalg.norm(S @ v - lam * v) <= 1e-6 * max(1.0, abs(lam))
    P = B @ B.T
    np.testing.assert_allclose(P, P.T, atol=1e-8)
    np.testing.assert_allclose(P @ P, P, atol=1e-8)
    assert np.trace(P) == pytest.approx(d, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(symmetric_matrices())
def test_eigenvalues_match_characteristic_polynomial(S):
    values, _ = full_eigenpairs(S)
    np.testing.assert_allclose(values, charpoly_eigenvalues(S), atol=1e-6)


@given(symmetric_matrices())
def test_eigenvalue_sum_rule(S):
    values, _ = full_eigenpairs(S)
    tr = np.trace(S)
    assert abs(values.sum() - tr) <= 1e-8 * max(1.0, abs(tr))


@settings(max_examples=30, deadline=None)
@given(symmetric_matrices(), st.data())
def test_rayleigh_optimality(S, data):
    D = S.shape[0]
    d = data.draw(st.integers(1, D))
    values, _ = top_eigenpairs(S, d)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    best = values.sum()
    for B in random_orthonormal_candidates(D, d, 50, rng):
        assert np.trace(B.T @ S @ B) <= best + 1e-8 * max(1.0, np.abs(S).max())


def test_principal_angles_known_planes():
    e = np.eye(3)
    A = e[:, :2]
    theta = 0.3
    B = np.column_stack([e[:, 0], math.cos(theta) * e[:, 1] + math.sin(theta) * e[:, 2]])
    np.testing.assert_allclose(principal_angles(A, B), [0.0, theta], atol=1e-7)
