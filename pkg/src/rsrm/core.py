"""Shared domain types, the Euclidean metric and distance accounting.

Every distance in the package is produced by the same arithmetic: squared
differences accumulated one attribute at a time, in attribute order, in
double precision, then a single square root. The scalar and the vectorised
paths therefore agree bit for bit, which is what makes tie-breaking and the
core/peripheral threshold reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


@dataclass(frozen=True)
class Label:
    id: int
    name: str


@dataclass(frozen=True)
class Instance:
    features: np.ndarray
    label: Label
    index: int


class Partition:
    """An ordered block of instances (train or test) stored column-friendly.

    ``index`` holds each row's ordinal within the partition it was loaded
    from. Subsets keep those ordinals, so neighbor ties can always be
    broken by the original training index.
    """

    def __init__(self, X, y, label_names: Sequence[str], index=None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")
        y = np.asarray(y, dtype=np.int64)
        if y.shape != (X.shape[0],):
            raise ValueError("one label per row is required")
        if index is None:
            index = np.arange(X.shape[0], dtype=np.int64)
        self.X = X
        self.y = y
        self.index = np.asarray(index, dtype=np.int64)
        self.label_names = tuple(label_names)
        self.X.flags.writeable = False
        self.y.flags.writeable = False
        self.index.flags.writeable = False

    def __len__(self) -> int:
        return self.X.shape[0]

    def __getitem__(self, i: int) -> Instance:
        lid = int(self.y[i])
        return Instance(self.X[i], Label(lid, self.label_names[lid]), int(self.index[i]))

    def __iter__(self) -> Iterator[Instance]:
        for i in range(len(self)):
            yield self[i]

    @property
    def num_attributes(self) -> int:
        return self.X.shape[1]

    def subset(self, rows) -> "Partition":
        """Rows selected by position; original ordinals are preserved."""
        rows = np.asarray(rows, dtype=np.int64)
        return Partition(self.X[rows], self.y[rows], self.label_names, self.index[rows])

    def head(self, n: int) -> "Partition":
        return self.subset(np.arange(min(n, len(self))))


@dataclass(frozen=True)
class Dataset:
    name: str
    train: Partition
    test: Partition
    label_names: tuple

    def __post_init__(self):
        if len(self.train) == 0 or len(self.test) == 0:
            raise ValueError("train and test partitions must be non-empty")
        if self.train.num_attributes != self.test.num_attributes:
            raise ValueError("train and test attribute counts differ")

    @property
    def num_attributes(self) -> int:
        return self.train.num_attributes

    @property
    def num_classes(self) -> int:
        return len(self.label_names)


class DistanceCounter:
    """Tally of metric evaluations made on behalf of classification."""

    __slots__ = ("_count",)

    def __init__(self, count: int = 0):
        if count < 0:
            raise ValueError("count must be non-negative")
        self._count = int(count)

    @property
    def count(self) -> int:
        return self._count

    def add(self, n: int) -> None:
        if n < 0:
            raise ValueError("a counter never decrements")
        self._count += int(n)

    def __repr__(self) -> str:
        return f"DistanceCounter({self._count})"


def euclidean_distance(a, b) -> float:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    s = 0.0
    for ai, bi in zip(a, b):
        d = float(ai) - float(bi)
        s += d * d
    return math.sqrt(s)


def counted_distance(counter: DistanceCounter, a, b) -> float:
    value = euclidean_distance(a, b)
    counter.add(1)
    return value


def distances_to(rows: np.ndarray, x, counter: DistanceCounter | None = None) -> np.ndarray:
    """Distances from every row of ``rows`` to ``x``.

    Each entry equals ``euclidean_distance(row, x)`` exactly. When a counter
    is given it is charged one evaluation per row.
    """
    x = np.asarray(x, dtype=np.float64)
    if rows.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: {rows.shape[1]} vs {x.shape[0]}")
    acc = np.zeros(rows.shape[0])
    for j in range(x.shape[0]):
        d = rows[:, j] - x[j]
        acc += d * d
    if counter is not None:
        counter.add(rows.shape[0])
    return np.sqrt(acc)


def distance_matrix(Q: np.ndarray, R: np.ndarray, counter: DistanceCounter | None = None) -> np.ndarray:
    """``out[a, b]`` is the distance between query row a and reference row b."""
    if Q.shape[1] != R.shape[1]:
        raise ValueError(f"dimension mismatch: {Q.shape[1]} vs {R.shape[1]}")
    acc = np.zeros((Q.shape[0], R.shape[0]))
    for j in range(Q.shape[1]):
        d = Q[:, j, None] - R[None, :, j]
        d *= d
        acc += d
    if counter is not None:
        counter.add(Q.shape[0] * R.shape[0])
    return np.sqrt(acc, out=acc)
