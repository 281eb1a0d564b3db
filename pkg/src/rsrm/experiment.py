"""Benchmark harness: conv-k-NN baseline, best-k search and the RSRM grid.

Costs are exact integer counts of distance evaluations made while
classifying the test partition. Clustering work is never counted.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, DistanceCounter
from .datasets import dataset_fingerprint
from .kmeans import DEFAULT_MAX_ITERATIONS, cluster_train_set
from .knn import neighbor_labels, vote_ids
from .model import build_model, classify_many

log = logging.getLogger(__name__)

DEFAULT_I_RANGE = tuple(range(1, 9))
DEFAULT_D_SET = (1.0, 1.5, 2.0)
DEFAULT_K_MAX = 25


def derive_k_clusters(n: int, i: int) -> int:
    k = math.floor(math.sqrt(n / 2 ** i))
    if k < 1:
        warnings.warn(f"training size {n} is too small for i={i}; using 1 cluster", stacklevel=2)
        return 1
    return k


def derive_L(k_clusters: int) -> int:
    if k_clusters < 1:
        raise ValueError("k_clusters must be at least 1")
    return max(1, math.isqrt(k_clusters))


@dataclass(frozen=True)
class GridConfig:
    i_exponent: int
    k_clusters: int
    L: int
    D: float
    k_neighbors: int

    @classmethod
    def derive(cls, n: int, i: int, D: float, k_neighbors: int) -> "GridConfig":
        k = derive_k_clusters(n, i)
        return cls(i, k, derive_L(k), float(D), k_neighbors)


@dataclass
class ExperimentRecord:
    dataset: str
    fingerprint: str
    config: GridConfig | None  # None marks the conv-k-NN baseline
    k_neighbors: int
    accuracy_percent: float
    correct: int
    distance_computations: int
    centroid_component: int
    ref_set_component: int
    convergence_capped: bool = False
    wall_time: float = 0.0
    predictions: np.ndarray | None = field(default=None, repr=False)

    @property
    def is_baseline(self) -> bool:
        return self.config is None

    @property
    def cost_millions(self) -> float:
        return self.distance_computations / 1e6


def _accuracy(pred: np.ndarray, truth: np.ndarray) -> tuple[int, float]:
    correct = int(np.count_nonzero(pred == truth))
    return correct, 100.0 * correct / truth.shape[0]


def run_conv_baseline(dataset: Dataset, k_neighbors: int, fingerprint: str | None = None) -> ExperimentRecord:
    if k_neighbors < 1:
        raise ValueError("k_neighbors must be at least 1")
    fingerprint = fingerprint or dataset_fingerprint(dataset)
    counter = DistanceCounter()
    t0 = time.perf_counter()
    labels = neighbor_labels(dataset.train, dataset.test.X, k_neighbors, counter)
    pred = np.array([vote_ids(row) for row in labels], dtype=np.int64)
    elapsed = time.perf_counter() - t0
    correct, acc = _accuracy(pred, dataset.test.y)
    return ExperimentRecord(dataset.name, fingerprint, None, k_neighbors, acc, correct,
                            counter.count, 0, counter.count, False, elapsed, pred)


def find_best_k(dataset: Dataset, k_max: int = DEFAULT_K_MAX):
    """Sweep k = 1..k_max with conv-k-NN on the test partition.

    Returns ``(best_k, best_accuracy, table)`` where ``table`` maps each k
    to its accuracy. The smallest k reaching the maximum wins. One neighbor
    list of length ``k_max`` per query serves every k, since each shorter
    list is its prefix under the (distance, index) order.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    labels = neighbor_labels(dataset.train, dataset.test.X, k_max)
    truth = dataset.test.y
    table = {}
    for k in range(1, min(k_max, len(dataset.train)) + 1):
        pred = np.array([vote_ids(row[:k]) for row in labels], dtype=np.int64)
        table[k] = _accuracy(pred, truth)[1]
    best = max(table.values())
    best_k = min(k for k, acc in table.items() if acc == best)
    return best_k, best, table


def run_rsrm_grid(dataset: Dataset, k_neighbors: int, i_range=DEFAULT_I_RANGE, d_set=DEFAULT_D_SET,
                  max_iterations: int = DEFAULT_MAX_ITERATIONS, fingerprint: str | None = None,
                  clusterings: dict | None = None) -> list[ExperimentRecord]:
    """Evaluate every (i, D) cell; one clustering per distinct cluster count.

    ``clusterings`` may be passed in to share cached clusterings between
    calls; it is filled as a side effect.
    """
    fingerprint = fingerprint or dataset_fingerprint(dataset)
    n = len(dataset.train)
    m = len(dataset.test)
    clusterings = {} if clusterings is None else clusterings
    records = []
    for i in i_range:
        for D in d_set:
            cfg = GridConfig.derive(n, i, D, k_neighbors)
            if cfg.k_clusters not in clusterings:
                t0 = time.perf_counter()
                clusterings[cfg.k_clusters] = cluster_train_set(dataset.train, cfg.k_clusters, max_iterations)
                log.info("%s: k-means k=%d done in %d sweeps (%.1fs)", dataset.name, cfg.k_clusters,
                         clusterings[cfg.k_clusters].iterations, time.perf_counter() - t0)
            clustering = clusterings[cfg.k_clusters]
            model = build_model(clustering, dataset.train, cfg.D)
            counter = DistanceCounter()
            t0 = time.perf_counter()
            res = classify_many(model, dataset.test.X, cfg.k_neighbors, cfg.L, counter)
            elapsed = time.perf_counter() - t0
            assert counter.count == res.centroid_distances + res.ref_set_distances
            assert res.centroid_distances == cfg.k_clusters * m
            correct, acc = _accuracy(res.predictions, dataset.test.y)
            records.append(ExperimentRecord(
                dataset.name, fingerprint, cfg, k_neighbors, acc, correct, counter.count,
                res.centroid_distances, res.ref_set_distances, clustering.capped, elapsed,
                res.predictions))
    return records


def pareto_front(records) -> list:
    """Records not dominated in (lower cost, higher accuracy), cheapest first.

    A record is dominated when another is no more expensive and no less
    accurate, and strictly better in at least one of the two.
    """
    ordered = sorted(records, key=lambda r: (r.distance_computations, -r.accuracy_percent))
    front = []
    best_acc = -math.inf
    for r in ordered:
        if r.accuracy_percent > best_acc:
            front.append(r)
            best_acc = r.accuracy_percent
    return front
