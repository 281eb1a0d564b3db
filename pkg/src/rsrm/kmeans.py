"""Deterministic batch k-means used as the preprocessing step.

Initial centroids are the first ``k`` training rows. Each sweep assigns
every row to its nearest centroid (lowest ordinal on ties), then
recomputes all means at once. Iteration stops after a sweep in which no
row changed cluster. None of these distances are counted: preprocessing
cost is excluded from the reported totals.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import DistanceCounter, Partition, distance_matrix, distances_to

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 1000


@dataclass(frozen=True)
class Cluster:
    members: np.ndarray  # training row positions, ascending
    centroid: np.ndarray


@dataclass(frozen=True)
class Clustering:
    clusters: tuple
    iterations: int
    capped: bool = False
    assignment: np.ndarray = field(repr=False, default=None)

    @property
    def k_clusters(self) -> int:
        return len(self.clusters)

    @property
    def centroids(self) -> np.ndarray:
        return np.stack([c.centroid for c in self.clusters])


def _as_matrix(train) -> np.ndarray:
    if isinstance(train, Partition):
        return train.X
    return np.ascontiguousarray(train, dtype=np.float64)


def _cluster_means(X: np.ndarray, assign: np.ndarray, k: int):
    # bincount accumulates in row order, which keeps the means reproducible
    sizes = np.bincount(assign, minlength=k)
    sums = np.empty((k, X.shape[1]))
    for j in range(X.shape[1]):
        sums[:, j] = np.bincount(assign, weights=X[:, j], minlength=k)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = sums / sizes[:, None]
    return means, sizes


def cluster_train_set(train, k_clusters: int, max_iterations: int = DEFAULT_MAX_ITERATIONS) -> Clustering:
    """Cluster the training rows into ``k_clusters`` groups.

    A cluster left empty after a sweep is reseeded at the row currently
    farthest from its own cluster's new centroid, so the cluster count
    never shrinks. Hitting ``max_iterations`` sets ``capped`` on the result.
    """
    X = _as_matrix(train)
    n = X.shape[0]
    if k_clusters < 1:
        raise ValueError("k_clusters must be at least 1")
    if k_clusters > n:
        raise ValueError(f"k_clusters={k_clusters} exceeds training size {n}")
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")

    centroids = X[:k_clusters].copy()
    assign = np.full(n, -1, dtype=np.int64)
    sweeps = 0
    converged = False
    while sweeps < max_iterations:
        sweeps += 1
        nearest = _assign_block(X, centroids)
        moved = bool(np.any(nearest != assign))
        assign = nearest
        centroids, sizes = _cluster_means(X, assign, k_clusters)
        empty = np.flatnonzero(sizes == 0)
        if empty.size:
            _reseed(X, assign, centroids, empty)
            moved = True
        if not moved:
            converged = True
            break

    if not converged:
        log.warning("k-means with k=%d stopped at the %d-sweep cap", k_clusters, max_iterations)

    sizes = np.bincount(assign, minlength=k_clusters)
    if np.any(sizes == 0):
        # only reachable when the cap interrupts a pending reseed
        raise RuntimeError("k-means ended with an empty cluster")
    order = np.argsort(assign, kind="stable")
    bounds = np.cumsum(sizes)[:-1]
    clusters = tuple(
        Cluster(members=m, centroid=centroids[c].copy())
        for c, m in enumerate(np.split(order, bounds))
    )
    assign.flags.writeable = False
    return Clustering(clusters=clusters, iterations=sweeps, capped=not converged, assignment=assign)


def _assign_block(X: np.ndarray, centroids: np.ndarray, block: int = 4096) -> np.ndarray:
    out = np.empty(X.shape[0], dtype=np.int64)
    for start in range(0, X.shape[0], block):
        d = distance_matrix(X[start:start + block], centroids)
        out[start:start + block] = np.argmin(d, axis=1)
    return out


def _reseed(X, assign, centroids, empty) -> None:
    own = np.empty(X.shape[0])
    for c in np.unique(assign):
        rows = np.flatnonzero(assign == c)
        own[rows] = distances_to(X[rows], centroids[c])
    used = []
    for c in empty:
        cand = own.copy()
        cand[used] = -1.0
        far = int(np.argmax(cand))
        if cand[far] <= 0.0:
            raise ValueError("fewer distinct training points than clusters")
        used.append(far)
        centroids[c] = X[far]


def nearest_centroid(clustering: Clustering, x, counter: DistanceCounter | None = None) -> int:
    d = distances_to(clustering.centroids, x, counter)
    return int(np.argmin(d))


def clamp_L(L: int, k_clusters: int) -> int:
    if L < 1:
        raise ValueError("L must be at least 1")
    if L > k_clusters:
        warnings.warn(f"L={L} exceeds the {k_clusters} available clusters; using {k_clusters}", stacklevel=3)
        return k_clusters
    return L


def rank_clusters(clustering: Clustering, x, L: int, counter: DistanceCounter) -> np.ndarray:
    """Ordinals of the ``L`` nearest clusters, nearest first.

    All centroid distances are computed (and counted) before sorting.
    """
    ordinals, _ = _ranked(clustering.centroids, x, clamp_L(L, clustering.k_clusters), counter)
    return ordinals


def _ranked(centroids, x, L, counter):
    d = distances_to(centroids, x, counter)
    order = np.argsort(d, kind="stable")[:L]
    return order, d[order]
