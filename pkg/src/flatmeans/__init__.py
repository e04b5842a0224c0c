"""(omega, k)-means: clustering with k affine flats under a weighted nested distance."""

from .codec import compress, decompress, error_table, image_error
from .distance import dist, dist_sq, energy
from .errors import FlatMeansError
from .lloyd import ClusteringConfig, RunTrace, lloyd_step, run, total_energy
from .model import Clustering, Dataset, Flat, WeightVector, validate_weights
from .pca import fit_flat, symmetric_eigen
from .voronoi import GridSpec, extract_boundary, rasterize

__all__ = [
    "Clustering",
    "ClusteringConfig",
    "Dataset",
    "Flat",
    "FlatMeansError",
    "GridSpec",
    "RunTrace",
    "WeightVector",
    "compress",
    "decompress",
    "dist",
    "dist_sq",
    "energy",
    "error_table",
    "extract_boundary",
    "fit_flat",
    "image_error",
    "lloyd_step",
    "rasterize",
    "run",
    "symmetric_eigen",
    "total_energy",
    "validate_weights",
]
