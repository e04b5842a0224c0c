"""Raster images of generalized Voronoi regions of flats in the plane.

Pixels sample their cell centers; row 0 is the top edge (``ymax``).  Each
pixel takes the index of the nearest flat, with ties going to the lowest
index.  Flats in R^3 are handled by sampling a user-supplied 2D slice.
"""

from dataclasses import dataclass

import numpy as np

from .distance import dist_sq_many
from .errors import DimensionMismatch, InvalidGrid, NotOrthonormal, TooFewFlats
from .model import ORTHONORMAL_TOL, WeightVector


@dataclass(frozen=True)
class GridSpec:
    bounds: tuple  # (xmin, ymin, xmax, ymax)
    resolution: tuple  # (width, height)

    def __post_init__(self):
        xmin, ymin, xmax, ymax = (float(b) for b in self.bounds)
        w, h = (int(r) for r in self.resolution)
        if not (xmax > xmin and ymax > ymin):
            raise InvalidGrid(f"empty bounds {self.bounds}")
        if w < 1 or h < 1:
            raise InvalidGrid(f"resolution {self.resolution} must be positive")
        object.__setattr__(self, "bounds", (xmin, ymin, xmax, ymax))
        object.__setattr__(self, "resolution", (w, h))

    @property
    def width(self):
        return self.resolution[0]

    @property
    def height(self):
        return self.resolution[1]


@dataclass(frozen=True)
class Slice:
    """Plane ``origin + u*axis_u + v*axis_v`` embedding grid coordinates in R^N."""

    origin: tuple
    axis_u: tuple
    axis_v: tuple

    def __post_init__(self):
        o, u, v = (np.asarray(a, dtype=np.float64) for a in (self.origin, self.axis_u, self.axis_v))
        if not (o.shape == u.shape == v.shape) or o.ndim != 1:
            raise DimensionMismatch("slice origin and axes must have the same dimension")
        gram = np.array([[u @ u, u @ v], [v @ u, v @ v]])
        if np.max(np.abs(gram - np.eye(2))) > ORTHONORMAL_TOL:
            raise NotOrthonormal("slice axes must be orthonormal")
        object.__setattr__(self, "origin", tuple(o.tolist()))
        object.__setattr__(self, "axis_u", tuple(u.tolist()))
        object.__setattr__(self, "axis_v", tuple(v.tolist()))

    def embed(self, uv):
        uv = np.asarray(uv, dtype=np.float64)
        return np.asarray(self.origin) + np.outer(uv[:, 0], self.axis_u) + np.outer(uv[:, 1], self.axis_v)


def cell_centers(grid: GridSpec):
    """Cell-center coordinates as two (height, width) arrays ``(x, y)``."""
    xmin, ymin, xmax, ymax = grid.bounds
    w, h = grid.resolution
    xs = xmin + (np.arange(w) + 0.5) * ((xmax - xmin) / w)
    ys = ymax - (np.arange(h) + 0.5) * ((ymax - ymin) / h)
    return np.meshgrid(xs, ys)


def rasterize(flats, weights: WeightVector, grid: GridSpec, plane: Slice = None) -> np.ndarray:
    """Label every cell with the index of the nearest flat.

    Returns an int array of shape (height, width).
    """
    flats = list(flats)
    if len(flats) < 2:
        raise TooFewFlats("at least two flats are needed")
    dims = {f.ambient_dim for f in flats}
    ns = {f.flat_dim for f in flats}
    if len(dims) != 1 or len(ns) != 1:
        raise DimensionMismatch("all flats must share ambient and flat dimension")
    N = dims.pop()
    if len(weights) != ns.pop() + 1:
        raise DimensionMismatch("weight arity does not match flat dimension")
    x, y = cell_centers(grid)
    pts = np.column_stack([x.ravel(), y.ravel()])
    if plane is not None:
        pts = plane.embed(pts)
    if pts.shape[1] != N:
        raise DimensionMismatch(
            f"flats live in R^{N}; rasterizing needs R^2 flats or a slice into R^{N}"
        )
    D = np.column_stack([dist_sq_many(pts, f, weights) for f in flats])
    return np.argmin(D, axis=1).reshape(grid.height, grid.width)


def extract_boundary(labels) -> np.ndarray:
    """Boolean mask of pixels whose label differs from a 4-neighbour."""
    L = np.asarray(labels)
    out = np.zeros(L.shape, dtype=bool)
    dv = L[1:, :] != L[:-1, :]
    dh = L[:, 1:] != L[:, :-1]
    out[1:, :] |= dv
    out[:-1, :] |= dv
    out[:, 1:] |= dh
    out[:, :-1] |= dh
    return out


def labels_to_gray(labels, count: int) -> np.ndarray:
    """Spread labels 0..count-1 evenly over gray levels 0..255."""
    L = np.asarray(labels, dtype=np.int64)
    span = max(count - 1, 1)
    return ((L * 255 + span // 2) // span).astype(np.uint8)


def boundary_to_gray(mask) -> np.ndarray:
    return np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)
