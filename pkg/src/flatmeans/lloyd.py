"""(omega, k)-means: Lloyd iteration over k flats of a fixed dimension.

Each iteration fits the energy-optimal flat to every cluster and reassigns
each point to the flat at the smallest weighted distance.  Several seeded
restarts are run and the lowest-energy result is kept.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging

import numpy as np

from .distance import dist_sq_many, energy
from .errors import DimensionTooLarge, InvalidConfig, KTooLarge
from .model import Clustering, WeightVector, as_points
from .pca import EIGEN_METHODS, fit_flat

log = logging.getLogger(__name__)

INIT_METHODS = ("random-points", "kmeans++", "given-partition")


@dataclass(frozen=True)
class ClusteringConfig:
    k: int
    n: int
    weights: WeightVector = None
    epsilon: float = 1e-9
    max_iters: int = 100
    restarts: int = 16
    seed: int = 0
    init: str = "random-points"
    initial_assignments: tuple = None
    relative_epsilon: bool = False
    eigen_method: str = "auto"
    workers: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise InvalidConfig(f"k must be at least 1, got {self.k}")
        if self.n < 0:
            raise InvalidConfig(f"flat dimension must be nonnegative, got {self.n}")
        w = self.weights
        if w is None:
            w = WeightVector.subspace(self.n)
        elif not isinstance(w, WeightVector):
            w = WeightVector(w)
        if len(w) != self.n + 1:
            raise InvalidConfig(f"{len(w)} weights given, flat dimension {self.n} needs {self.n + 1}")
        object.__setattr__(self, "weights", w)
        if not self.epsilon > 0:
            raise InvalidConfig("epsilon must be positive")
        if self.max_iters < 1 or self.restarts < 1 or self.workers < 1:
            raise InvalidConfig("max_iters, restarts and workers must be at least 1")
        if self.init not in INIT_METHODS:
            raise InvalidConfig(f"unknown init {self.init!r}; choose from {INIT_METHODS}")
        if self.eigen_method not in EIGEN_METHODS:
            raise InvalidConfig(f"unknown eigen method {self.eigen_method!r}")
        if self.init == "given-partition":
            if self.initial_assignments is None:
                raise InvalidConfig("given-partition init needs initial_assignments")
            object.__setattr__(self, "initial_assignments", tuple(int(a) for a in self.initial_assignments))


@dataclass
class RunTrace:
    """Energies per restart: the initial partition, then one entry per iteration.

    ``repairs[r]`` lists the iterations of restart r in which an empty cluster
    was reseeded (0 stands for the initial partition).
    """

    energies: list = field(default_factory=list)
    repairs: list = field(default_factory=list)
    best_restart: int = 0

    @property
    def best_energies(self):
        return self.energies[self.best_restart]

    @property
    def final_energies(self):
        return [e[-1] for e in self.energies]


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """PCG64 stream for one restart; restart i is the same for any restart count."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(restart,))
    return np.random.Generator(np.random.PCG64(ss))


def _check(X, cfg):
    m, N = X.shape
    if cfg.k > m:
        raise KTooLarge(f"k={cfg.k} exceeds the number of points ({m})")
    if cfg.n >= N:
        raise DimensionTooLarge(f"flat dimension {cfg.n} must be below ambient dimension {N}")


def _sq_to_points(X, seeds):
    return np.column_stack([np.sum((X - X[i]) ** 2, axis=1) for i in seeds])


def choose_seeds(X, k: int, rng: np.random.Generator, method: str = "random-points") -> np.ndarray:
    """Pick k distinct point indices, uniformly or by D^2 (k-means++) sampling."""
    m = X.shape[0]
    if k > m:
        raise KTooLarge(f"k={k} exceeds the number of points ({m})")
    if method == "random-points":
        return rng.choice(m, size=k, replace=False)
    if method != "kmeans++":
        raise InvalidConfig(f"cannot draw seeds with init {method!r}")
    seeds = [int(rng.integers(m))]
    d2 = np.sum((X - X[seeds[0]]) ** 2, axis=1)
    for _ in range(1, k):
        mass = d2.copy()
        mass[seeds] = 0.0
        total = float(np.sum(mass))
        if total > 0:
            cum = np.cumsum(mass)
            u = rng.random() * cum[-1]
            i = int(np.searchsorted(cum, u, side="right"))
            i = min(i, m - 1)
            while mass[i] == 0.0:
                i -= 1
        else:
            # every remaining point coincides with a seed
            free = np.setdiff1d(np.arange(m), seeds)
            i = int(free[rng.integers(free.size)])
        seeds.append(i)
        d2 = np.minimum(d2, np.sum((X - X[i]) ** 2, axis=1))
    return np.asarray(seeds)


def _repair(assign, own, k):
    """Reseed empty clusters with the points farthest from their own flat."""
    counts = np.bincount(assign, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return assign, False
    assign = assign.copy()
    order = np.argsort(-own, kind="stable")
    pos = 0
    for j in empty:
        while True:
            i = order[pos]
            pos += 1
            if counts[assign[i]] > 1:
                break
        counts[assign[i]] -= 1
        assign[i] = j
        counts[j] = 1
    return assign, True


def _fit_all(X, assign, cfg, previous=None):
    flats = []
    for j in range(cfg.k):
        members = X[assign == j]
        if members.shape[0] == 0:
            flats.append(previous[j])
        else:
            flats.append(fit_flat(members, cfg.n, method=cfg.eigen_method))
    return flats


def _energy(X, assign, flats, weights):
    total = 0.0
    for j, flat in enumerate(flats):
        total += energy(X[assign == j], flat, weights)
    return total


def _seeded_clustering(X, seeds, cfg):
    """Nearest-seed partition (squared Euclidean), with flats fitted to it."""
    D = _sq_to_points(X, seeds)
    assign = np.argmin(D, axis=1)
    assign, repaired = _repair(assign, D[np.arange(X.shape[0]), assign], cfg.k)
    flats = _fit_all(X, assign, cfg)
    return Clustering(assign, flats, cfg.weights, _energy(X, assign, flats, cfg.weights), repaired=repaired)


def init_random_points(S, cfg: ClusteringConfig, rng=None) -> Clustering:
    X = as_points(S)
    _check(X, cfg)
    rng = restart_rng(cfg.seed, 0) if rng is None else rng
    return _seeded_clustering(X, choose_seeds(X, cfg.k, rng, "random-points"), cfg)


def init_kmeanspp(S, cfg: ClusteringConfig, rng=None) -> Clustering:
    X = as_points(S)
    _check(X, cfg)
    rng = restart_rng(cfg.seed, 0) if rng is None else rng
    return _seeded_clustering(X, choose_seeds(X, cfg.k, rng, "kmeans++"), cfg)


def init_given_partition(S, cfg: ClusteringConfig, assignments=None) -> Clustering:
    """Start from an explicit partition; empty clusters are reseeded."""
    X = as_points(S)
    _check(X, cfg)
    assign = np.asarray(cfg.initial_assignments if assignments is None else assignments, dtype=np.int64)
    if assign.shape != (X.shape[0],):
        raise InvalidConfig(f"{assign.size} initial assignments for {X.shape[0]} points")
    if assign.min() < 0 or assign.max() >= cfg.k:
        raise InvalidConfig(f"initial assignment outside [0, {cfg.k})")
    repaired = False
    if np.bincount(assign, minlength=cfg.k).min() == 0:
        # distances to the overall fit decide which points move
        whole = fit_flat(X, cfg.n, method=cfg.eigen_method)
        assign, repaired = _repair(assign, dist_sq_many(X, whole, cfg.weights), cfg.k)
    flats = _fit_all(X, assign, cfg)
    return Clustering(assign, flats, cfg.weights, _energy(X, assign, flats, cfg.weights), repaired=repaired)


def _initialize(X, cfg, restart):
    if cfg.init == "given-partition":
        return init_given_partition(X, cfg)
    rng = restart_rng(cfg.seed, restart)
    return _seeded_clustering(X, choose_seeds(X, cfg.k, rng, cfg.init), cfg)


def _advance(X, flats, cfg):
    """Assign to nearest flats, repair empties, refit. Returns (assign, flats, energy, repaired)."""
    D = np.column_stack([dist_sq_many(X, f, cfg.weights) for f in flats])
    assign = np.argmin(D, axis=1)
    assign, repaired = _repair(assign, D[np.arange(X.shape[0]), assign], cfg.k)
    new_flats = _fit_all(X, assign, cfg, previous=flats)
    return assign, new_flats, _energy(X, assign, new_flats, cfg.weights), repaired


def _stalled(before, after, cfg):
    threshold = cfg.epsilon * before if cfg.relative_epsilon else cfg.epsilon
    return before - after < threshold


def lloyd_step(S, current: Clustering, cfg: ClusteringConfig) -> Clustering:
    """One assign/fit iteration.

    Every point moves to the nearest of ``current.flats`` (ties to the lowest
    index), emptied clusters are reseeded once, and each cluster gets its
    energy-optimal flat.  Clusterings produced by the init functions and by
    earlier steps already carry flats fitted to their partition, so repeated
    steps alternate fit and assignment exactly as Lloyd iteration does.
    ``converged`` is set when the energy dropped by less than epsilon.
    """
    X = as_points(S)
    assign, flats, e, repaired = _advance(X, list(current.flats), cfg)
    return Clustering(
        assign,
        flats,
        cfg.weights,
        e,
        iterations_run=current.iterations_run + 1,
        converged=(not repaired) and _stalled(current.energy, e, cfg),
        repaired=repaired,
    )


def _single_run(X, cfg, restart):
    init = _initialize(X, cfg, restart)
    assign, flats, e = init.assignments, list(init.flats), init.energy
    energies = [e]
    repairs = [0] if init.repaired else []
    converged = False
    it = 0
    while it < cfg.max_iters:
        it += 1
        new_assign, new_flats, new_e, repaired = _advance(X, flats, cfg)
        energies.append(new_e)
        if repaired:
            repairs.append(it)
        stalled = (not repaired) and _stalled(e, new_e, cfg)
        assign, flats, e = new_assign, new_flats, new_e
        if stalled:
            converged = True
            break
    result = Clustering(assign, flats, cfg.weights, e, iterations_run=it, converged=converged)
    return result, energies, repairs


def total_energy(S, clustering: Clustering) -> float:
    """Sum over clusters of the energy of each cluster w.r.t. its flat."""
    X = as_points(S)
    return _energy(X, clustering.assignments, clustering.flats, clustering.weights)


def run(S, cfg: ClusteringConfig):
    """Run all restarts and return ``(best_clustering, trace)``.

    The result depends only on the data and ``cfg``; ``cfg.workers`` > 1
    evaluates restarts on a thread pool with identical output.
    """
    X = as_points(S)
    _check(X, cfg)
    restarts = 1 if cfg.init == "given-partition" else cfg.restarts
    if cfg.workers > 1 and restarts > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda r: _single_run(X, cfg, r), range(restarts)))
    else:
        results = [_single_run(X, cfg, r) for r in range(restarts)]
    trace = RunTrace()
    best = 0
    for r, (clustering, energies, repairs) in enumerate(results):
        trace.energies.append(energies)
        trace.repairs.append(repairs)
        if clustering.energy < results[best][0].energy:
            best = r
    trace.best_restart = best
    log.debug("best restart %d of %d, energy %.6g", best, restarts, results[best][0].energy)
    return results[best][0], trace
