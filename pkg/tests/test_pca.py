import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatmeans.distance import energy
from flatmeans.errors import DimensionTooLarge, EmptySet, NotSymmetric
from flatmeans.model import Flat, WeightVector
from flatmeans.pca import fit_flat, mean, scatter_matrix, symmetric_eigen

from oracles import pca_energy, random_orthonormal

R2 = 1 / math.sqrt(2)


def test_mean_examples():
    assert mean([[0, 0], [2, 0]]).tolist() == [1, 0]
    assert mean([[1, 2]]).tolist() == [1, 2]
    assert mean([[0, 0], [1, 0], [2, 3]]).tolist() == [1, 1]
    with pytest.raises(EmptySet):
        mean(np.zeros((0, 2)))


def test_scatter_examples():
    assert scatter_matrix([[1, 0], [-1, 0], [0, 0]], [0, 0]).tolist() == [[2, 0], [0, 0]]
    # oracle: (1,1)(1,1)^T + (-1,-1)(-1,-1)^T
    assert scatter_matrix([[1, 1], [-1, -1]], [0, 0]).tolist() == [[2, 2], [2, 2]]
    assert scatter_matrix([[3, 4]], [3, 4]).tolist() == [[0, 0], [0, 0]]


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_eigen_examples(method):
    e = symmetric_eigen([[2, 0], [0, 0]], method)
    assert e.eigenvalues.tolist() == [2, 0]
    assert e.eigenvectors.tolist() == [[1, 0], [0, 1]]

    e = symmetric_eigen([[2, 2], [2, 2]], method)
    np.testing.assert_allclose(e.eigenvalues, [4, 0], atol=1e-14)
    np.testing.assert_allclose(e.eigenvectors[0], [R2, R2], rtol=1e-15)

    e = symmetric_eigen(np.eye(3), method)
    assert e.eigenvalues.tolist() == [1, 1, 1]
    np.testing.assert_allclose(e.eigenvectors @ e.eigenvectors.T, np.eye(3), atol=1e-15)


def test_not_symmetric():
    with pytest.raises(NotSymmetric):
        symmetric_eigen([[1, 2], [0, 1]])


@pytest.mark.parametrize("N", [1, 2, 3, 5, 8, 16])
def test_jacobi_decomposition_quality(rng, N):
    for _ in range(5):
        A = rng.normal(size=(N, N)) * rng.uniform(1e-3, 1e3)
        A = A + A.T
        e = symmetric_eigen(A, "jacobi")
        V, lam = e.eigenvectors, e.eigenvalues
        assert np.all(np.diff(lam) <= 0)
        assert np.linalg.norm(A - V.T @ np.diag(lam) @ V) <= 1e-8 * max(1, np.linalg.norm(A))
        assert np.max(np.abs(V @ V.T - np.eye(N))) <= 1e-10
        np.testing.assert_allclose(lam, symmetric_eigen(A, "lapack").eigenvalues,
                                   atol=1e-12 * np.linalg.norm(A))


def test_repeated_eigenvalues_are_orthonormal(rng):
    Q = random_orthonormal(rng, 6, 5)
    Q = np.vstack([Q, np.linalg.svd(Q)[2][-1]])
    A = Q.T @ np.diag([3, 3, 3, 1, 1, 0]) @ Q
    e = symmetric_eigen((A + A.T) / 2, "jacobi")
    np.testing.assert_allclose(e.eigenvalues, [3, 3, 3, 1, 1, 0], atol=1e-12)
    assert np.max(np.abs(e.eigenvectors @ e.eigenvectors.T - np.eye(6))) <= 1e-10


def test_fit_flat_collinear():
    f = fit_flat([[0, 0], [1, 1], [2, 2]], 1)
    assert f.center.tolist() == [1, 1]
    np.testing.assert_allclose(f.basis[0], [R2, R2], rtol=1e-15)


def test_fit_flat_zero_dim_is_barycenter(rng):
    X = rng.normal(size=(7, 3))
    f = fit_flat(X, 0)
    assert f.flat_dim == 0
    np.testing.assert_array_equal(f.center, mean(X))


def test_fit_flat_singleton():
    f = fit_flat([[3, -2]], 1)
    assert f.center.tolist() == [3, -2]
    assert f.basis.tolist() == [[1, 0]]


def test_fit_flat_dimension_errors():
    with pytest.raises(DimensionTooLarge):
        fit_flat([[0, 0]], 2)
    with pytest.raises(EmptySet):
        fit_flat(np.zeros((0, 3)), 1)


def test_residual_identity(rng):
    for _ in range(50):
        N = int(rng.integers(1, 7))
        n = int(rng.integers(0, N))
        X = rng.normal(size=(int(rng.integers(1, 40)), N)) * rng.uniform(0.1, 10, size=N)
        w = WeightVector(rng.dirichlet(np.ones(n + 1)))
        lam = symmetric_eigen(scatter_matrix(X)).eigenvalues
        expected = sum(wj * lam[j:].sum() for j, wj in enumerate(w.weights))
        got = energy(X, fit_flat(X, n), w)
        assert got == pytest.approx(expected, rel=1e-8, abs=1e-12)
        # independent route through singular values
        assert got == pytest.approx(pca_energy(X, n, w.weights), rel=1e-8, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fit_beats_random_competitors(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 5))
    n = int(rng.integers(0, min(2, N - 1) + 1))
    X = rng.normal(size=(int(rng.integers(1, 21)), N))
    w = WeightVector(rng.dirichlet(np.ones(n + 1)))
    best = energy(X, fit_flat(X, n), w)
    for _ in range(25):
        center = X.mean(axis=0) + rng.normal(size=N) * rng.choice([1e-3, 0.1, 1])
        other = Flat(center, random_orthonormal(rng, N, n))
        assert best <= energy(X, other, w) + 1e-9


def test_fit_is_deterministic(rng):
    X = rng.normal(size=(30, 5))
    a, b = fit_flat(X, 3), fit_flat(X.copy(), 3)
    assert a == b


def test_fit_beats_thousand_competitors(rng):
    for _ in range(5):
        N = int(rng.integers(2, 5))
        n = int(rng.integers(0, min(2, N - 1) + 1))
        X = rng.normal(size=(int(rng.integers(1, 21)), N))
        w = WeightVector(rng.dirichlet(np.ones(n + 1)))
        best = energy(X, fit_flat(X, n), w)
        for _ in range(1000):
            other = Flat(X.mean(axis=0) + rng.normal(size=N) * 0.3, random_orthonormal(rng, N, n))
            assert best <= energy(X, other, w) + 1e-9
