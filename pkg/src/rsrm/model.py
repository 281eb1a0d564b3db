"""Reference set reduction on top of a k-means clustering.

At build time each cluster is split by a radius ``D * avg_dist``: members
within it form the core set, the rest the peripheral set. A query whose
distance to its nearest centroid is within that cluster's radius is
searched against the whole nearest cluster; otherwise against the nearest
cluster plus the peripheral sets of the next ``L - 1`` clusters.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .core import DistanceCounter, Partition, distance_matrix, distances_to
from .kmeans import Cluster, Clustering, _ranked, clamp_L
from .knn import find_k_nearest, smallest_k, vote, vote_ids

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClusterPartition:
    ordinal: int
    avg_dist: float
    core: np.ndarray  # training row positions, ascending
    peripheral: np.ndarray


@dataclass(frozen=True)
class QueryTrace:
    nearest_cluster: int
    inside_core: bool
    reference_set_size: int
    centroid_distances: int
    ref_set_distances: int

    @property
    def total_distances(self) -> int:
        return self.centroid_distances + self.ref_set_distances


@dataclass(frozen=True)
class RsrmModel:
    clustering: Clustering
    partitions: tuple
    D: float
    train: Partition

    @property
    def k_clusters(self) -> int:
        return self.clustering.k_clusters

    def radius(self, ordinal: int) -> float:
        return self.D * self.partitions[ordinal].avg_dist


def build_model(clustering: Clustering, train: Partition, D: float) -> RsrmModel:
    if not D > 0:
        raise ValueError("D must be positive")
    parts = []
    for c, cluster in enumerate(clustering.clusters):
        d = distances_to(train.X[cluster.members], cluster.centroid)
        avg = _ordered_mean(d)
        inside = d <= D * avg
        parts.append(ClusterPartition(c, avg, cluster.members[inside], cluster.members[~inside]))
    zero = sum(1 for p in parts if p.avg_dist == 0.0)
    if zero:
        log.info("%d of %d clusters have avg_dist 0; their core test only admits exact centroid hits",
                 zero, len(parts))
    return RsrmModel(clustering, tuple(parts), float(D), train)


def _ordered_mean(values: np.ndarray) -> float:
    s = 0.0
    for v in values.tolist():
        s += v
    return s / len(values)


def assemble_reference_set(model: RsrmModel, x, L: int, counter: DistanceCounter):
    """Returns ``(reference Partition, QueryTrace)`` for one query."""
    L = clamp_L(L, model.k_clusters)
    before = counter.count
    ordinals, dists = _ranked(model.clustering.centroids, x, L, counter)
    inside = bool(dists[0] <= model.radius(int(ordinals[0])))
    rows = _reference_rows(model, ordinals, inside)
    trace = QueryTrace(int(ordinals[0]), inside, len(rows), counter.count - before, len(rows))
    return model.train.subset(rows), trace


def _reference_rows(model: RsrmModel, ordinals, inside: bool) -> np.ndarray:
    members = model.clustering.clusters[int(ordinals[0])].members
    if inside:
        return members
    extra = [model.partitions[int(c)].peripheral for c in ordinals[1:]]
    return np.sort(np.concatenate([members, *extra]))


def rsrm_classify(model: RsrmModel, x, k_neighbors: int, L: int, counter: DistanceCounter):
    ref, trace = assemble_reference_set(model, x, L, counter)
    label = vote(find_k_nearest(ref, x, k_neighbors, counter))
    return label, trace


@dataclass
class BatchResult:
    predictions: np.ndarray
    nearest_cluster: np.ndarray
    inside_core: np.ndarray
    reference_set_size: np.ndarray
    centroid_distances: int
    ref_set_distances: int

    def trace(self, i: int, k_clusters: int) -> QueryTrace:
        size = int(self.reference_set_size[i])
        return QueryTrace(int(self.nearest_cluster[i]), bool(self.inside_core[i]), size, k_clusters, size)


def classify_many(model: RsrmModel, Q: np.ndarray, k_neighbors: int, L: int,
                  counter: DistanceCounter | None = None, block: int = 256) -> BatchResult:
    """Classify every row of ``Q``; same answers and counts as per-query calls.

    Queries that map to the same reference set are searched together.
    """
    L = clamp_L(L, model.k_clusters)
    counter = counter if counter is not None else DistanceCounter()
    m = Q.shape[0]
    centroids = model.clustering.centroids
    cd = distance_matrix(Q, centroids, counter)
    centroid_count = m * model.k_clusters
    order = np.argsort(cd, axis=1, kind="stable")[:, :L]
    d1 = cd[np.arange(m), order[:, 0]]
    radii = np.array([model.radius(c) for c in range(model.k_clusters)])
    inside = d1 <= radii[order[:, 0]]

    # queries inside the core radius need only their nearest cluster
    keys = [(int(order[i, 0]),) if inside[i] else tuple(int(c) for c in order[i]) for i in range(m)]
    groups: dict = {}
    for i, key in enumerate(keys):
        groups.setdefault(key, []).append(i)

    preds = np.empty(m, dtype=np.int64)
    sizes = np.empty(m, dtype=np.int64)
    ref_count = 0
    train = model.train
    for key, members in groups.items():
        rows = _reference_rows(model, key, len(key) == 1)
        ref_X = train.X[rows]
        ref_y = train.y[rows]
        ref_idx = train.index[rows]
        kk = min(k_neighbors, rows.shape[0])
        qi = np.array(members)
        for start in range(0, qi.shape[0], block):
            chunk = qi[start:start + block]
            D = distance_matrix(Q[chunk], ref_X, counter)
            for r, q in enumerate(chunk):
                pos = smallest_k(D[r], ref_idx, kk)
                preds[q] = vote_ids(ref_y[pos])
        sizes[qi] = rows.shape[0]
        ref_count += rows.shape[0] * qi.shape[0]
    return BatchResult(preds, order[:, 0].copy(), inside, sizes, centroid_count, ref_count)


def save_model(model: RsrmModel, path) -> None:
    """Write the model's numeric state as JSON; floats round-trip exactly."""
    doc = {
        "format": "rsrm-model",
        "version": FORMAT_VERSION,
        "k_clusters": model.k_clusters,
        "D": model.D,
        "iterations": model.clustering.iterations,
        "capped": model.clustering.capped,
        "centroids": model.clustering.centroids.tolist(),
        "avg_dist": [p.avg_dist for p in model.partitions],
        "core": [p.core.tolist() for p in model.partitions],
        "peripheral": [p.peripheral.tolist() for p in model.partitions],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_model(path, train: Partition) -> RsrmModel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != "rsrm-model" or doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported model file")
    clusters = []
    parts = []
    assign = np.empty(len(train), dtype=np.int64)
    for c in range(doc["k_clusters"]):
        core = np.array(doc["core"][c], dtype=np.int64)
        per = np.array(doc["peripheral"][c], dtype=np.int64)
        members = np.sort(np.concatenate([core, per]))
        assign[members] = c
        clusters.append(Cluster(members, np.array(doc["centroids"][c], dtype=np.float64)))
        parts.append(ClusterPartition(c, float(doc["avg_dist"][c]), core, per))
    clustering = Clustering(tuple(clusters), doc["iterations"], doc["capped"], assign)
    return RsrmModel(clustering, tuple(parts), float(doc["D"]), train)


__all__ = [
    "BatchResult", "ClusterPartition", "QueryTrace", "RsrmModel",
    "assemble_reference_set", "build_model", "classify_many", "load_model",
    "rsrm_classify", "save_model",
]
