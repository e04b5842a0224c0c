"""Shared domain types: weight vectors, flats, datasets and clusterings.

All types are immutable once built; array fields are stored as read-only
float64 (or int64) copies so instances can be shared between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllZero,
    DimensionMismatch,
    EmptySet,
    NegativeWeight,
    NonFiniteValue,
    NotOrthonormal,
    SumNotOne,
)

WEIGHT_SUM_TOL = 1e-9
ORTHONORMAL_TOL = 1e-8


def _frozen(a, dtype=np.float64):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Per-dimension weights omega_0..omega_n, nonnegative and summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(np.atleast_1d(self.weights))
        if w.ndim != 1 or w.size == 0:
            raise DimensionMismatch("weight vector must be a nonempty 1-d list")
        if not np.all(np.isfinite(w)):
            raise NonFiniteValue("weights must be finite")
        if np.any(w < 0):
            raise NegativeWeight(f"negative weight in {w.tolist()}")
        if np.any(w > 1):
            raise SumNotOne(f"weight above 1 in {w.tolist()}")
        if abs(float(np.sum(w)) - 1.0) > WEIGHT_SUM_TOL:
            raise SumNotOne(f"weights sum to {float(np.sum(w))!r}, expected 1")
        object.__setattr__(self, "weights", w)

    @property
    def flat_dim(self) -> int:
        return self.weights.size - 1

    def __len__(self):
        return self.weights.size

    def __eq__(self, other):
        return isinstance(other, WeightVector) and np.array_equal(self.weights, other.weights)

    def __repr__(self):
        return f"WeightVector({self.weights.tolist()})"

    @classmethod
    def subspace(cls, n: int) -> "WeightVector":
        """Pure distance to the n-flat itself: (0, ..., 0, 1)."""
        w = np.zeros(n + 1)
        w[-1] = 1.0
        return cls(w)

    @classmethod
    def centroid(cls, n: int) -> "WeightVector":
        """Classical point distance to the center: (1, 0, ..., 0)."""
        w = np.zeros(n + 1)
        w[0] = 1.0
        return cls(w)


def validate_weights(raw, normalize: bool = False) -> WeightVector:
    """Build a :class:`WeightVector` from raw numbers.

    With ``normalize`` the values are divided by their sum (all entries must be
    nonnegative and the sum positive).
    """
    w = np.asarray(raw, dtype=np.float64).ravel()
    if w.size == 0:
        raise DimensionMismatch("empty weight list")
    if not np.all(np.isfinite(w)):
        raise NonFiniteValue("weights must be finite")
    if np.any(w < 0):
        raise NegativeWeight(f"negative weight in {w.tolist()}")
    total = float(np.sum(w))
    if total == 0.0:
        raise AllZero("all weights are zero")
    if normalize:
        w = w / total
    return WeightVector(w)


@dataclass(frozen=True, eq=False)
class Flat:
    """An affine subspace ``center + span(basis)`` with orthonormal basis rows.

    ``basis`` has shape (n, N); n == 0 gives a single point.
    """

    center: np.ndarray
    basis: np.ndarray = None

    def __post_init__(self):
        c = _frozen(self.center)
        if c.ndim != 1 or c.size == 0:
            raise DimensionMismatch("flat center must be a nonempty vector")
        N = c.size
        b = np.zeros((0, N)) if self.basis is None else np.asarray(self.basis, dtype=np.float64)
        if b.ndim == 1 and b.size == N:
            b = b.reshape(1, N)
        if b.size == 0:
            b = np.zeros((0, N))
        if b.ndim != 2 or b.shape[1] != N:
            raise DimensionMismatch(f"basis shape {b.shape} does not match ambient dimension {N}")
        if b.shape[0] >= N:
            raise DimensionMismatch(f"flat dimension {b.shape[0]} must be below ambient dimension {N}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(b))):
            raise NonFiniteValue("flat entries must be finite")
        if b.shape[0]:
            gram = b @ b.T
            dev = float(np.max(np.abs(gram - np.eye(b.shape[0]))))
            if dev > ORTHONORMAL_TOL:
                raise NotOrthonormal(f"basis deviates from orthonormal by {dev:.3g}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def ambient_dim(self) -> int:
        return self.center.size

    @property
    def flat_dim(self) -> int:
        return self.basis.shape[0]

    def truncate(self, j: int) -> "Flat":
        """The nested flat aff(v0, ..., vj)."""
        return Flat(self.center, self.basis[:j])

    def __eq__(self, other):
        return (
            isinstance(other, Flat)
            and np.array_equal(self.center, other.center)
            and np.array_equal(self.basis, other.basis)
        )

    def __repr__(self):
        return f"Flat(N={self.ambient_dim}, n={self.flat_dim}, center={self.center.tolist()})"


@dataclass(frozen=True, eq=False)
class Dataset:
    """m points in R^N as a read-only (m, N) array."""

    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64)
        if p.ndim == 1:
            p = p.reshape(-1, 1)
        if p.ndim != 2 or p.shape[0] == 0:
            raise EmptySet("a dataset needs at least one point")
        if p.shape[1] == 0:
            raise DimensionMismatch("points must have at least one coordinate")
        if not np.all(np.isfinite(p)):
            raise NonFiniteValue("dataset contains NaN or infinite coordinates")
        object.__setattr__(self, "points", _frozen(p))

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


def as_points(data) -> np.ndarray:
    """Return the (m, N) array behind a Dataset or array-like."""
    if isinstance(data, Dataset):
        return data.points
    return Dataset(data).points


@dataclass(frozen=True, eq=False)
class Clustering:
    assignments: np.ndarray
    flats: tuple
    weights: WeightVector
    energy: float
    iterations_run: int = 0
    converged: bool = False
    repaired: bool = False

    def __post_init__(self):
        a = _frozen(self.assignments, dtype=np.int64)
        flats = tuple(self.flats)
        k = len(flats)
        if a.ndim != 1:
            raise DimensionMismatch("assignments must be a flat list")
        if a.size and (a.min() < 0 or a.max() >= k):
            raise DimensionMismatch(f"cluster index out of range [0, {k})")
        if self.energy < 0:
            raise ValueError("energy must be nonnegative")
        object.__setattr__(self, "assignments", a)
        object.__setattr__(self, "flats", flats)
        object.__setattr__(self, "energy", float(self.energy))

    @property
    def k(self) -> int:
        return len(self.flats)

    def __eq__(self, other):
        return (
            isinstance(other, Clustering)
            and np.array_equal(self.assignments, other.assignments)
            and self.flats == other.flats
            and self.weights == other.weights
            and self.energy == other.energy
            and self.iterations_run == other.iterations_run
            and self.converged == other.converged
        )
