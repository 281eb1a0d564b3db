import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rsrm.core import Dataset, Partition  # noqa: E402


def synthetic_dataset(seed, n_train, n_test, dim, classes, name="synthetic", scale=4.0):
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(classes, dim)) * scale
    def draw(n):
        y = rng.integers(0, classes, size=n)
        X = np.round(centers[y] + rng.normal(size=(n, dim)), 2)
        return X, y
    names = tuple(str(c) for c in range(classes))
    Xtr, ytr = draw(n_train)
    Xte, yte = draw(n_test)
    return Dataset(name, Partition(Xtr, ytr, names), Partition(Xte, yte, names), names)


@pytest.fixture
def small_dataset():
    return synthetic_dataset(0, 200, 50, 2, 3)


# Lines recorded by test_acceptance.py, one per criterion (or per dataset
# for criteria that are checked dataset by dataset).
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
