"""Weighted nested-subspace distance between points and flats.

The squared distance is evaluated as ``|x - v0|^2 - sum_j w_j * c_j`` where
``c_j`` is the running sum of squared projections onto the first j basis
vectors (``c_0 = 0``).  This needs one projection per basis vector instead of
one per nested flat.
"""

import numpy as np

from .errors import ConsistencyError, DimensionMismatch
from .model import Flat, WeightVector

# clamp window for cancellation, scaled by |x - v0|^2
NEGATIVE_TOL = 1e-9


def _check(points, flat: Flat, weights: WeightVector):
    if points.shape[-1] != flat.ambient_dim:
        raise DimensionMismatch(
            f"point dimension {points.shape[-1]} != flat ambient dimension {flat.ambient_dim}"
        )
    if len(weights) != flat.flat_dim + 1:
        raise DimensionMismatch(
            f"{len(weights)} weights given for a flat of dimension {flat.flat_dim}"
        )


def dist_sq_many(points, flat: Flat, weights: WeightVector) -> np.ndarray:
    """Squared weighted distance of every row of ``points`` (m, N) to ``flat``."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    _check(X, flat, weights)
    D = X - flat.center
    norm2 = np.sum(D * D, axis=1)
    w = weights.weights
    if flat.flat_dim == 0:
        out = norm2
    else:
        cum = np.cumsum(np.square(D @ flat.basis.T), axis=1)
        out = norm2 - cum @ w[1:]
    neg = out < 0
    if np.any(neg):
        floor = -NEGATIVE_TOL * np.maximum(1.0, norm2)
        if np.any(out < floor):
            i = int(np.argmax(out < floor))
            raise ConsistencyError(f"squared distance {out[i]!r} is negative beyond rounding")
        out = np.where(neg, 0.0, out)
    return out


def dist_sq(x, flat: Flat, weights: WeightVector) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("expected a single point")
    return float(dist_sq_many(x, flat, weights)[0])


def dist(x, flat: Flat, weights: WeightVector) -> float:
    return float(np.sqrt(dist_sq(x, flat, weights)))


def energy(points, flat: Flat, weights: WeightVector) -> float:
    """Sum of squared weighted distances; an empty set has zero energy."""
    X = np.asarray(points, dtype=np.float64)
    if X.size == 0:
        if len(weights) != flat.flat_dim + 1:
            raise DimensionMismatch("weight arity does not match flat dimension")
        return 0.0
    return float(np.sum(dist_sq_many(X, flat, weights)))
