"""Best-fit flats: barycenter, scatter matrix and a Jacobi eigensolver.

The flat of dimension n minimising the weighted energy of a point set is the
barycenter plus the n leading eigenvectors of the (unnormalised) scatter
matrix, for every admissible weight vector at once.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge, EmptySet, NoConvergence, NotSymmetric
from .model import Flat

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-12
# "auto" switches from Jacobi to LAPACK above this matrix size
AUTO_JACOBI_MAX_DIM = 32

EIGEN_METHODS = ("auto", "jacobi", "lapack")


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues sorted descending; ``eigenvectors[i]`` belongs to ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_matrix(S):
    X = np.asarray(S, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size else X.reshape(0, 0)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptySet("point set is empty")
    return X


def mean(S) -> np.ndarray:
    X = _as_matrix(S)
    return X.sum(axis=0) / X.shape[0]


def scatter_matrix(S, mu=None) -> np.ndarray:
    """Sum over points of (s - mu)(s - mu)^T, not divided by the point count."""
    X = _as_matrix(S)
    mu = mean(X) if mu is None else np.asarray(mu, dtype=np.float64)
    if mu.shape != (X.shape[1],):
        raise DimensionMismatch(f"center has shape {mu.shape}, points have dimension {X.shape[1]}")
    D = X - mu
    M = D.T @ D
    # exact symmetry; gemm may differ from its transpose in the last bit
    return np.triu(M) + np.triu(M, 1).T


def _jacobi(M, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    A = np.array(M, dtype=np.float64)
    N = A.shape[0]
    V = np.eye(N)
    threshold = tol * max(1.0, float(np.linalg.norm(A)))
    polished = False
    for sweep in range(max_sweeps + 1):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= threshold:
            # one more sweep: convergence is quadratic here, and the
            # eigenvectors inherit off / gap as their error
            if polished or off == 0.0:
                return np.diag(A).copy(), V
            polished = True
        elif sweep == max_sweeps:
            break
        for p in range(N - 1):
            for q in range(p + 1, N):
                apq = float(A[p, q])
                if apq == 0.0:
                    continue
                app = float(A[p, p])
                aqq = float(A[q, q])
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q]
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :]
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _canonical(values, vectors):
    """Sort descending (stable) and make each vector's largest entry positive."""
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order].T.copy()
    for row in vectors:
        i = int(np.argmax(np.abs(row)))
        if row[i] < 0:
            row *= -1.0
    return values, vectors


def symmetric_eigen(M, method: str = "auto") -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix.

    ``method`` is ``"jacobi"`` (cyclic-by-row rotations), ``"lapack"``
    (``numpy.linalg.eigh``) or ``"auto"``, which picks Jacobi for matrices up
    to 32x32. Output ordering and signs are canonical for every method.
    """
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NotSymmetric("matrix has non-finite entries")
    scale = max(1.0, float(np.linalg.norm(A)))
    if A.size and float(np.max(np.abs(A - A.T))) > SYMMETRY_TOL * scale:
        raise NotSymmetric("matrix is not symmetric")
    A = np.triu(A) + np.triu(A, 1).T
    if method == "auto":
        method = "jacobi" if A.shape[0] <= AUTO_JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        values, vectors = _jacobi(A)
    elif method == "lapack":
        values, vectors = np.linalg.eigh(A)
    else:
        raise ValueError(f"unknown eigen method {method!r}")
    values, vectors = _canonical(values, vectors)
    return EigenDecomposition(values, vectors)


def fit_flat(S, n: int, method: str = "auto") -> Flat:
    """The n-dimensional flat of least weighted energy for the points ``S``.

    Center is the barycenter; the basis is the n leading scatter eigenvectors.
    With n == 0 this is just the barycenter.
    """
    X = _as_matrix(S)
    N = X.shape[1]
    if n < 0 or n >= N:
        raise DimensionTooLarge(f"flat dimension {n} must satisfy 0 <= n < {N}")
    mu = mean(X)
    if n == 0:
        return Flat(mu)
    eig = symmetric_eigen(scatter_matrix(X, mu), method=method)
    return Flat(mu, eig.eigenvectors[:n])
