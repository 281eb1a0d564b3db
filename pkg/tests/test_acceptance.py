"""Acceptance suite: one recorded PASS/FAIL/SKIP line per criterion.

Real benchmark files are looked up under $RSRM_DATA_DIR (default: the
repository's ``data/`` directory, filled by ``rsrm fetch-data`` or
``scripts/stage_offline_data.py``). Checks that need a missing file skip
with the reason; checks that only need the sizes use a synthetic stand-in
of identical shape and say so.
"""

import os
import warnings
from pathlib import Path

import numpy as np
import pytest

import oracle_rsrm as oracle
from conftest import ACCEPTANCE_LINES, synthetic_dataset
from rsrm.core import Dataset, DistanceCounter, Partition, euclidean_distance
from rsrm.datasets import dataset_fingerprint, get_spec, load_dataset
from rsrm.experiment import find_best_k, run_conv_baseline, run_rsrm_grid
from rsrm.kmeans import cluster_train_set
from rsrm.knn import knn_predict
from rsrm.model import build_model, classify_many, rsrm_classify

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = Path(os.environ.get("RSRM_DATA_DIR", ROOT / "data"))

# name: (n_train, n_test, attributes, classes, best k, accuracy %, accuracy tolerance)
ROSTER = {
    "letter": (15000, 5000, 16, 26, 4, 95.68, 0.30),
    "magic": (14000, 5020, 10, 2, 12, 81.39, 1.0),
    "pendigits": (7494, 3498, 16, 10, 4, 97.89, 0.30),
    "landsat": (4435, 2000, 36, 6, 4, 90.75, 0.30),
    "shuttle": (43500, 14500, 9, 7, 2, 99.88, 0.30),
}
EXPECTED_COST = {"letter": 75_000_000, "magic": 70_280_000, "pendigits": 26_214_012,
                 "landsat": 8_870_000, "shuttle": 630_750_000}
# content digests recorded on first verified load; guards against silently different files
PINNED_FINGERPRINTS = {
    "landsat": "41e8bd6031d54e97cb060cc87ff3fbf67cb9d93a29dde77693be25b570267b66",
    "magic": "8b761a8c387dbf5bbf6f6127a4c68c9c991ef30f7e39efe98f39e18ab08eba84",
}
PROXIES = {"letter": "letter-keel", "pendigits": "pendigits-keel"}

_datasets, _grids, _sweeps = {}, {}, {}


def record(criterion, status, detail):
    line = f"[{status}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def check(criterion, ok, detail):
    record(criterion, "PASS" if ok else "FAIL", detail)
    assert ok, detail


def skip(criterion, reason):
    record(criterion, "SKIP", reason)
    pytest.skip(reason)


def real_dataset(name):
    """The benchmark file as staged, or None when it is not on disk."""
    if name not in _datasets:
        config = DATA_DIR / "proxies.ini" if name.endswith("-keel") else None
        if config is not None and not config.exists():
            _datasets[name] = None
            return None
        spec = get_spec(name, DATA_DIR, config=config)
        paths = [spec.train_path] + ([spec.test_path] if spec.test_path else [])
        if not all(Path(p).exists() for p in paths):
            _datasets[name] = None
        else:
            ds = load_dataset(spec)
            pinned = PINNED_FINGERPRINTS.get(name)
            if pinned is not None and dataset_fingerprint(ds) != pinned:
                raise AssertionError(f"{name}: file content differs from the pinned fingerprint")
            _datasets[name] = ds
    return _datasets[name]


def stand_in(name):
    n_train, n_test, dim, classes = ROSTER[name][:4]
    return synthetic_dataset(list(ROSTER).index(name), n_train, n_test, dim, classes, name=f"{name}-synthetic")


def grid(name, ds):
    if name not in _grids:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _grids[name] = run_rsrm_grid(ds, ROSTER.get(name, (0,) * 4 + (4,))[4])
    return _grids[name]


def missing(name):
    return f"{name}: benchmark file not found under {DATA_DIR}"


# 1. exact baseline cost law ------------------------------------------------

@pytest.mark.parametrize("name", list(ROSTER))
def test_c1_baseline_cost_law(name):
    ds = real_dataset(name)
    source = "real data"
    if ds is None:
        ds, source = stand_in(name), "synthetic stand-in of identical shape, file unavailable"
    rec = run_conv_baseline(ds, ROSTER[name][4])
    check(1, rec.distance_computations == EXPECTED_COST[name] == len(ds.train) * len(ds.test),
          f"{name} baseline cost {rec.distance_computations:,} (expected {EXPECTED_COST[name]:,}; {source})")


# 2. baseline accuracy --------------------------------------------------------

@pytest.mark.parametrize("name", list(ROSTER))
def test_c2_baseline_accuracy(name):
    ds = real_dataset(name)
    if ds is None:
        skip(2, missing(name))
    _, _, _, _, k, target, tol = ROSTER[name]
    acc = run_conv_baseline(ds, k).accuracy_percent
    check(2, abs(acc - target) <= tol, f"{name} k={k}: {acc:.2f}% vs {target}% (tolerance {tol})")


# 3. best-k sweep agreement -------------------------------------------------

def test_c3_best_k_sweep():
    matches, bad, notes, absent = 0, [], [], []
    for name, row in ROSTER.items():
        ds = real_dataset(name)
        if ds is None:
            absent.append(name)
            continue
        best_k, best_acc, table = find_best_k(ds, 25)
        expected_k = row[4]
        notes.append(f"{name} best k={best_k} (expected {expected_k}, {best_acc:.2f}% vs {table[expected_k]:.2f}% at {expected_k})")
        if best_k == expected_k:
            matches += 1
        elif abs(best_k - expected_k) > 2 or best_acc - table[expected_k] > 0.2:
            bad.append(name)
    detail = "; ".join(notes) + (f"; unavailable: {', '.join(absent)}" if absent else "")
    if bad:
        check(3, False, f"mismatch outside the allowed slack for {', '.join(bad)}: {detail}")
    if matches + len(absent) < 4:
        check(3, False, f"fewer than 4 of 5 can match: {detail}")
    if absent:
        skip(3, f"not decidable without all five datasets: {detail}")
    check(3, matches >= 4, detail)


# 4. degeneracy oracle --------------------------------------------------------

DEGENERACY_SETS = ["letter", "magic", "pendigits", "landsat", "shuttle", "letter-keel", "pendigits-keel"]


@pytest.mark.parametrize("name", DEGENERACY_SETS)
def test_c4_single_cluster_equals_conv_knn(name):
    ds = real_dataset(name)
    if ds is None:
        skip(4, missing(name))
    train = ds.train.head(1000)
    k = ROSTER.get(name.replace("-keel", ""), (0,) * 4 + (4,))[4]
    model = build_model(cluster_train_set(train, 1), train, 1.0)
    counter = DistanceCounter()
    res = classify_many(model, ds.test.X, k, 1, counter)
    expected = knn_predict(train, ds.test.X, k)
    per_query = res.centroid_distances + res.ref_set_distances
    same_cost = bool(np.all(res.reference_set_size == len(train))) and per_query == (1 + len(train)) * len(ds.test)
    # a handful through the single-query path as well
    for x, want in zip(ds.test.X[:25], expected[:25]):
        c = DistanceCounter()
        label, trace = rsrm_classify(model, x, k, 1, c)
        same_cost &= c.count == 1 + len(train) and label.id == want
    check(4, np.array_equal(res.predictions, expected) and same_cost,
          f"{name} (first {len(train)} training rows, k={k}): predictions identical, per-query cost {1 + len(train)}")


# 5. brute-force oracle equivalence ------------------------------------------

def oracle_datasets(count=100):
    rng = np.random.default_rng(5150)
    for seed in range(count):
        dim = int(rng.integers(2, 6))
        n = int(rng.integers(50, 301))
        classes = int(rng.integers(2, 5))
        if seed % 3 == 0:
            # coarse integer grid: exercises every tie-breaking rule
            X = rng.integers(0, 6, size=(n + 20, dim)).astype(float)
        else:
            X = np.round(rng.normal(size=(n + 20, dim)) * 3, 2)
        y = rng.integers(0, classes, size=n + 20)
        yield seed, X[:n], y[:n], X[n:]


@pytest.mark.filterwarnings("ignore:L=. exceeds")
def test_c5_oracle_equivalence():
    n_sets, n_checks, mismatches = 0, 0, []
    for seed, X, y, Q in oracle_datasets():
        n_sets += 1
        names = [str(c) for c in range(int(y.max()) + 1)]
        train = Partition(X, y, names)
        rows, labels, queries = X.tolist(), y.tolist(), Q.tolist()
        for k_clusters in (1, 2, 5, 10):
            try:
                o_assign, o_centroids = oracle.kmeans(rows, k_clusters, max_iter=1000)
            except ValueError:
                o_assign = None
            try:
                clustering = cluster_train_set(train, k_clusters)
            except RuntimeError:
                clustering = None
            if o_assign is None or clustering is None:
                if (o_assign is None) != (clustering is None):
                    mismatches.append((seed, k_clusters, "k-means failure disagrees"))
                continue
            if clustering.assignment.tolist() != o_assign:
                mismatches.append((seed, k_clusters, "k-means assignment"))
                continue
            for D in (1.0, 1.5, 2.0):
                avg, _, peripheral = oracle.build(rows, o_assign, o_centroids, D)
                model = build_model(clustering, train, D)
                for L in (1, 2, 3):
                    for x in queries:
                        want, o_cent, o_ref = oracle.classify_each_k(
                            rows, labels, o_assign, o_centroids, avg, peripheral, D, x, L, (1, 3, 5))
                        for kn in (1, 3, 5):
                            c = DistanceCounter()
                            label, trace = rsrm_classify(model, x, kn, L, c)
                            n_checks += 1
                            if (label.id, trace.centroid_distances, trace.ref_set_distances, c.count) != (
                                    want[kn], o_cent, o_ref, o_cent + o_ref):
                                mismatches.append((seed, k_clusters, D, L, kn, x))
    check(5, n_sets >= 100 and not mismatches,
          f"{n_sets} synthetic datasets, {n_checks} query/configuration pairs, {len(mismatches)} disagreements"
          + (f" (first: {mismatches[0]})" if mismatches else ""))


# 6. partition and threshold invariants ------------------------------------

def test_c6_partition_invariants():
    rng = np.random.default_rng(66)
    failures = []
    runs = 0
    for seed in range(60):
        n = int(rng.integers(30, 400))
        dim = int(rng.integers(1, 6))
        X = np.round(rng.normal(size=(n, dim)) * 5, 2)
        train = Partition(X, np.zeros(n, dtype=int), ["x"])
        k = int(rng.integers(1, min(25, n) + 1))
        clustering = cluster_train_set(train, k)
        if clustering.capped:
            continue
        runs += 1
        members = np.concatenate([c.members for c in clustering.clusters])
        if sorted(members.tolist()) != list(range(n)) or any(len(c.members) == 0 for c in clustering.clusters):
            failures.append((seed, "clusters do not partition the rows"))
        for c, cluster in enumerate(clustering.clusters):
            if not np.array_equal(cluster.centroid, np.array(oracle.mean_of(X[cluster.members].tolist(), dim))):
                failures.append((seed, "centroid is not the member mean"))
            for i in cluster.members:
                d = [euclidean_distance(X[i], other.centroid) for other in clustering.clusters]
                if int(np.argmin(d)) != c:
                    failures.append((seed, "not a fixpoint"))
        previous = None
        for D in (0.5, 1.0, 1.5, 2.0, 3.0):
            model = build_model(clustering, train, D)
            current = []
            for p, cluster in zip(model.partitions, clustering.clusters):
                if sorted(np.concatenate([p.core, p.peripheral]).tolist()) != cluster.members.tolist():
                    failures.append((seed, D, "core/peripheral do not partition the cluster"))
                if any(euclidean_distance(X[i], cluster.centroid) > D * p.avg_dist for i in p.core) or any(
                        euclidean_distance(X[i], cluster.centroid) <= D * p.avg_dist for i in p.peripheral):
                    failures.append((seed, D, "threshold inequality"))
                current.append(set(p.peripheral.tolist()))
            if previous is not None and not all(a <= b for a, b in zip(current, previous)):
                failures.append((seed, D, "peripheral set grew with D"))
            previous = current
    check(6, runs >= 50 and not failures,
          f"{runs} converged clusterings x 5 thresholds, {len(failures)} violations"
          + (f" (first: {failures[0]})" if failures else ""))


# 7. Landsat soft check ------------------------------------------------------

def test_c7_landsat_cell():
    ds = real_dataset("landsat")
    if ds is None:
        skip(7, missing("landsat"))
    [rec] = run_rsrm_grid(ds, 4, i_range=[3], d_set=[1.5])
    cfg = rec.config
    ok = (cfg.k_clusters, cfg.L) == (23, 4) and rec.accuracy_percent >= 89.2 and rec.distance_computations < 8_870_000
    check(7, ok, f"landsat kClusters={cfg.k_clusters} L={cfg.L} D=1.5 k=4: {rec.accuracy_percent:.2f}% "
                 f"at cost {rec.distance_computations:,} (need >= 89.2% and < 8,870,000)")


# 8. D = 1 versus D = 2 --------------------------------------------------------

@pytest.mark.parametrize("name", ["letter", "magic"])
def test_c8_d1_beats_d2(name):
    ds = real_dataset(name)
    if ds is None:
        reason = missing(name)
        proxy = real_dataset(PROXIES[name]) if name in PROXIES else None
        if proxy is not None:
            wins = _d_wins(grid(PROXIES[name], proxy))
            reason += f"; shuffled proxy {PROXIES[name]} (not evidence) gives D=1 >= D=2 in {wins}/8"
        skip(8, reason)
    wins = _d_wins(grid(name, ds))
    check(8, wins >= 6, f"{name}: D=1 >= D=2 in {wins} of 8 values of i")


def _d_wins(records):
    acc = {(r.config.i_exponent, r.config.D): r.accuracy_percent for r in records}
    return sum(acc[(i, 1.0)] >= acc[(i, 2.0)] for i in range(1, 9))


# 9. speed-up sanity ---------------------------------------------------------

@pytest.mark.parametrize("name", list(ROSTER))
def test_c9_grid_cost_sanity(name):
    ds = real_dataset(name)
    if ds is None:
        skip(9, missing(name))
    n, m = len(ds.train), len(ds.test)
    records = grid(name, ds)
    bad = [r.config for r in records if r.config.k_clusters >= 2 and not (
        r.distance_computations < n * m and r.ref_set_component <= n * m
        and r.centroid_component == r.config.k_clusters * m)]
    check(9, not bad, f"{name}: {len(records)} grid records, {len(bad)} violating the cost bounds")
