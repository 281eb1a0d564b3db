"""Exhaustive k-NN search and voting.

Neighbors are ordered by (distance, training index); every reference row
is visited and counted, never pruned.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import DistanceCounter, Label, Partition, distance_matrix, distances_to

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NeighborList:
    index: np.ndarray  # training ordinals, nearest first
    distance: np.ndarray
    label: np.ndarray  # label ids
    label_names: tuple = ()

    def __len__(self) -> int:
        return len(self.index)


def smallest_k(dist: np.ndarray, index: np.ndarray, k: int) -> np.ndarray:
    """Positions of the k entries smallest by (dist, index), in that order."""
    n = dist.shape[0]
    if k < n:
        part = np.argpartition(dist, k - 1)[:k]
        cut = dist[part].max()
        # re-collect everything up to the cut so boundary ties go by index
        pos = np.flatnonzero(dist <= cut)
    else:
        pos = np.arange(n)
    order = np.lexsort((index[pos], dist[pos]))
    return pos[order[:k]]


def find_k_nearest(ref: Partition, x, k: int, counter: DistanceCounter) -> NeighborList:
    if len(ref) == 0:
        raise ValueError("reference set is empty")
    if k < 1:
        raise ValueError("k must be at least 1")
    d = distances_to(ref.X, x, counter)
    if k > len(ref):
        log.debug("k=%d exceeds reference set of %d; voting over all", k, len(ref))
    pos = smallest_k(d, ref.index, k)
    return NeighborList(ref.index[pos], d[pos], ref.y[pos], ref.label_names)


def vote_ids(labels) -> int:
    """Majority label id; on a tie for the top count, the first entry's id."""
    counts = Counter(int(v) for v in labels)
    top = max(counts.values())
    winners = [lab for lab, c in counts.items() if c == top]
    if len(winners) == 1:
        return winners[0]
    return int(labels[0])


def vote(neighbors: NeighborList) -> Label:
    if len(neighbors) == 0:
        raise ValueError("cannot vote over an empty neighbor list")
    lid = vote_ids(neighbors.label)
    name = neighbors.label_names[lid] if neighbors.label_names else str(lid)
    return Label(lid, name)


def conv_knn_classify(train: Partition, x, k: int, counter: DistanceCounter) -> Label:
    return vote(find_k_nearest(train, x, k, counter))


def neighbor_labels(ref: Partition, Q: np.ndarray, k: int, counter: DistanceCounter | None = None,
                    block: int = 256) -> np.ndarray:
    """Label ids of each query's k nearest references, shape (len(Q), min(k, len(ref))).

    Batched form of :func:`find_k_nearest`; row i matches what the scalar
    search returns for ``Q[i]``.
    """
    kk = min(k, len(ref))
    out = np.empty((Q.shape[0], kk), dtype=np.int64)
    for start in range(0, Q.shape[0], block):
        D = distance_matrix(Q[start:start + block], ref.X, counter)
        for r in range(D.shape[0]):
            pos = smallest_k(D[r], ref.index, kk)
            out[start + r] = ref.y[pos]
    return out


def knn_predict(train: Partition, Q: np.ndarray, k: int, counter: DistanceCounter | None = None) -> np.ndarray:
    labels = neighbor_labels(train, Q, k, counter)
    return np.array([vote_ids(row) for row in labels], dtype=np.int64)
