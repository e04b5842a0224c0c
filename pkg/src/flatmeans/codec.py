"""Cluster-wise PCA compression of RGB images.

An image is cut into 8x8 tiles, each flattened to a vector of 192 values
(pixels row-major, R, G, B consecutive).  The tiles are clustered with
(omega, k)-means; every tile is stored as its cluster id plus its n
coordinates in the cluster's flat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyImage, FlatMeansError, InvalidConfig, MalformedModel, SizeMismatch
from .lloyd import ClusteringConfig, run
from .model import WeightVector

BLOCK = 8
BLOCK_DIM = BLOCK * BLOCK * 3


@dataclass(frozen=True, eq=False)
class BlockImage:
    width: int
    height: int
    pad_right: int
    pad_bottom: int
    blocks: np.ndarray  # (blocks_y * blocks_x, 192), row-major block order

    @property
    def blocks_x(self):
        return (self.width + self.pad_right) // BLOCK

    @property
    def blocks_y(self):
        return (self.height + self.pad_bottom) // BLOCK


@dataclass(frozen=True, eq=False)
class CompressedImage:
    width: int
    height: int
    pad_right: int
    pad_bottom: int
    weights: WeightVector
    flats: tuple
    cluster_ids: np.ndarray  # (B,) integer
    coefficients: np.ndarray  # (B, n) float32

    @property
    def k(self):
        return len(self.flats)

    @property
    def n(self):
        return self.coefficients.shape[1]

    @property
    def block_count(self):
        return ((self.width + self.pad_right) // BLOCK) * ((self.height + self.pad_bottom) // BLOCK)

    def validate(self):
        if self.width < 1 or self.height < 1:
            raise MalformedModel("image size must be positive")
        if not (0 <= self.pad_right < BLOCK and 0 <= self.pad_bottom < BLOCK):
            raise MalformedModel("padding must be in 0..7")
        if (self.width + self.pad_right) % BLOCK or (self.height + self.pad_bottom) % BLOCK:
            raise MalformedModel("padded size is not a multiple of 8")
        if self.k < 1:
            raise MalformedModel("model has no flats")
        for f in self.flats:
            if f.ambient_dim != BLOCK_DIM or f.flat_dim != self.n:
                raise MalformedModel("flat shape does not match the block layout")
        if len(self.weights) != self.n + 1:
            raise MalformedModel("weight count does not match flat dimension")
        B = self.block_count
        if self.cluster_ids.shape != (B,) or self.coefficients.shape != (B, self.n):
            raise MalformedModel(f"expected {B} block records")
        if B and (self.cluster_ids.min() < 0 or self.cluster_ids.max() >= self.k):
            raise MalformedModel("cluster id out of range")


def _as_rgb(pixels):
    a = np.asarray(pixels)
    if a.ndim != 3 or a.shape[2] != 3:
        if a.size == 0:
            raise EmptyImage("image has no pixels")
        raise SizeMismatch(f"expected an (height, width, 3) RGB array, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise EmptyImage("image has no pixels")
    return a


def blockify(pixels) -> BlockImage:
    """Edge-pad to multiples of 8 and flatten each 8x8 tile to a 192-vector."""
    a = _as_rgb(pixels).astype(np.float64)
    if a.min() < 0 or a.max() > 255:
        raise FlatMeansError("pixel values must lie in [0, 255]")
    h, w = a.shape[:2]
    pad_b = -h % BLOCK
    pad_r = -w % BLOCK
    a = np.pad(a, ((0, pad_b), (0, pad_r), (0, 0)), mode="edge")
    by, bx = a.shape[0] // BLOCK, a.shape[1] // BLOCK
    blocks = a.reshape(by, BLOCK, bx, BLOCK, 3).transpose(0, 2, 1, 3, 4).reshape(by * bx, BLOCK_DIM)
    return BlockImage(w, h, pad_r, pad_b, blocks)


def unblockify(blocks, blocks_x: int, blocks_y: int) -> np.ndarray:
    b = np.asarray(blocks).reshape(blocks_y, blocks_x, BLOCK, BLOCK, 3)
    return b.transpose(0, 2, 1, 3, 4).reshape(blocks_y * BLOCK, blocks_x * BLOCK, 3)


def compress(pixels, k: int, n: int, weights=None, **options) -> CompressedImage:
    """Cluster the tiles of ``pixels`` into k flats of dimension n.

    ``weights`` defaults to (0, ..., 0, 1); remaining keyword arguments are
    passed to :class:`ClusteringConfig` (restarts, seed, max_iters, ...).
    """
    if not 0 <= n < BLOCK_DIM:
        raise InvalidConfig(f"flat dimension must be in [0, {BLOCK_DIM})")
    bi = blockify(pixels)
    cfg = ClusteringConfig(k=k, n=n, weights=weights, **options)
    clustering, _ = run(bi.blocks, cfg)
    ids = clustering.assignments
    coef = np.zeros((bi.blocks.shape[0], n), dtype=np.float32)
    for j, flat in enumerate(clustering.flats):
        rows = ids == j
        if n and np.any(rows):
            coef[rows] = ((bi.blocks[rows] - flat.center) @ flat.basis.T).astype(np.float32)
    return CompressedImage(
        bi.width, bi.height, bi.pad_right, bi.pad_bottom,
        cfg.weights, clustering.flats, ids.astype(np.int64), coef,
    )


def reconstruct(c: CompressedImage) -> np.ndarray:
    """Float reconstruction cropped to the original size, before clamping and rounding."""
    c.validate()
    blocks = np.empty((c.block_count, BLOCK_DIM))
    coef = c.coefficients.astype(np.float64)
    for j, flat in enumerate(c.flats):
        rows = c.cluster_ids == j
        blocks[rows] = flat.center + coef[rows] @ flat.basis
    bx = (c.width + c.pad_right) // BLOCK
    by = (c.height + c.pad_bottom) // BLOCK
    return unblockify(blocks, bx, by)[: c.height, : c.width]


def to_pixels(values) -> np.ndarray:
    """Clamp to [0, 255] and round half up to uint8."""
    return np.floor(np.clip(values, 0.0, 255.0) + 0.5).astype(np.uint8)


def decompress(c: CompressedImage) -> np.ndarray:
    return to_pixels(reconstruct(c))


def image_error(a, b) -> float:
    """Euclidean norm of the pixel-by-pixel, channel-by-channel difference."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise SizeMismatch(f"image shapes differ: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


@dataclass
class ErrorTable:
    ks: list
    ns: list
    errors: np.ndarray  # (len(ks), len(ns))

    def rows(self):
        for i, k in enumerate(self.ks):
            for j, n in enumerate(self.ns):
                yield k, n, float(self.errors[i, j])

    def format(self) -> str:
        cells = [[f"{e:.1f}" for e in row] for row in self.errors]
        width = max([len(c) for row in cells for c in row] + [len(str(n)) for n in self.ns])
        corner = "k/n"
        kw = max(len(corner), max(len(str(k)) for k in self.ks))
        lines = [f"{corner:>{kw}} " + " ".join(f"{n:>{width}}" for n in self.ns)]
        for k, row in zip(self.ks, cells):
            lines.append(f"{k:>{kw}} " + " ".join(f"{c:>{width}}" for c in row))
        return "\n".join(lines)


def error_table(pixels, k_range, n_range, rounded: bool = True, **options) -> ErrorTable:
    """Reconstruction error for every (k, n), using the (0, ..., 0, 1) weights.

    With ``rounded=False`` the error is measured on the float reconstruction.
    """
    ks, ns = list(k_range), list(n_range)
    original = _as_rgb(pixels)
    errors = np.zeros((len(ks), len(ns)))
    for i, k in enumerate(ks):
        for j, n in enumerate(ns):
            c = compress(original, k, n, **options)
            out = decompress(c) if rounded else reconstruct(c)
            errors[i, j] = image_error(original, out)
    return ErrorTable(ks, ns, errors)
