"""Loading the benchmark datasets from delimited text.

Attributes are parsed as stored, with no scaling of any kind. Class values
are interned to dense ids in sorted order (numerically when every class
value is a number). Row order is preserved, and row position is the
instance's index.

Dataset descriptions live in an INI file, one section per dataset; the
package ships ``datasets.ini`` with the five UCI benchmarks and a small
synthetic set for offline use.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import logging
import os
import urllib.request
import zipfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import Dataset, Partition

log = logging.getLogger(__name__)

DATA_DIR_ENV = "RSRM_DATA_DIR"


class DatasetError(Exception):
    """Base class for ingestion failures."""


class RaggedRowError(DatasetError):
    pass


class NonNumericError(DatasetError):
    pass


class UnseenLabelError(DatasetError):
    pass


class SizeMismatchError(DatasetError):
    pass


class ChecksumError(DatasetError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    train_path: str
    test_path: str | None = None
    label_column: str = "last"  # "first", "last" or a column number
    delimiter: str = ","  # "whitespace" splits on runs of blanks
    split: int | None = None  # rows of a single file that form the train set
    split_mode: str = "head"  # "head": first rows train; "systematic": test rows spread evenly
    train_size: int | None = None
    test_size: int | None = None
    url: str | None = None
    sha256: dict | None = None
    note: str = ""

    def resolve(self, base: Path) -> "DatasetSpec":
        """Copy with relative paths anchored at ``base``."""
        def fix(p):
            if p is None or Path(p).is_absolute():
                return p
            return str(base / p)
        return DatasetSpec(**{**self.__dict__, "train_path": fix(self.train_path), "test_path": fix(self.test_path)})


def default_data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


def _parse_int(value):
    return int(value) if value not in (None, "") else None


def read_specs(path=None) -> dict[str, DatasetSpec]:
    """Parse an INI file of dataset descriptions (default: the bundled one)."""
    parser = configparser.ConfigParser(interpolation=None)
    if path is None:
        parser.read_string(resources.files("rsrm").joinpath("datasets.ini").read_text())
    else:
        with open(path) as fh:
            parser.read_file(fh)
    specs = {}
    for name in parser.sections():
        sec = parser[name]
        sums = {}
        for key, value in sec.items():
            if key.startswith("sha256."):
                sums[key[len("sha256."):]] = value.strip()
        specs[name] = DatasetSpec(
            name=name,
            train_path=sec["train"],
            test_path=sec.get("test") or None,
            label_column=sec.get("label_column", "last"),
            delimiter=sec.get("delimiter", ","),
            split=_parse_int(sec.get("split")),
            split_mode=sec.get("split_mode", "head"),
            train_size=_parse_int(sec.get("train_size")),
            test_size=_parse_int(sec.get("test_size")),
            url=sec.get("url") or None,
            sha256=sums or None,
            note=sec.get("note", ""),
        )
    return specs


def get_spec(name: str, data_dir=None, config=None) -> DatasetSpec:
    specs = read_specs(config)
    if name not in specs:
        raise DatasetError(f"unknown dataset {name!r}; known: {', '.join(sorted(specs))}")
    spec = specs[name]
    if name == "toy" and config is None:
        return spec.resolve(Path(str(resources.files("rsrm"))))
    base = Path(data_dir) if data_dir is not None else default_data_dir()
    return spec.resolve(base / name)


def _split_line(line: str, delimiter: str) -> list[str]:
    if delimiter == "whitespace":
        return line.split()
    return [c.strip() for c in line.split(delimiter)]


def _read_rows(path: str, spec: DatasetSpec):
    features, labels = [], []
    arity = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            cells = _split_line(line.rstrip("\n"), spec.delimiter)
            if arity is None:
                arity = len(cells)
            elif len(cells) != arity:
                raise RaggedRowError(f"{path}:{lineno}: expected {arity} fields, found {len(cells)}")
            col = {"first": 0, "last": arity - 1}.get(spec.label_column)
            if col is None:
                col = int(spec.label_column)
            labels.append(cells[col])
            row = cells[:col] + cells[col + 1:]
            try:
                features.append([float(c) for c in row])
            except ValueError:
                bad = next(c for c in row if not _is_number(c))
                raise NonNumericError(f"{path}:{lineno}: attribute {bad!r} is not numeric") from None
    return features, labels, arity


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _label_key(names):
    if all(_is_number(n) for n in names):
        return lambda n: (float(n), n)
    return lambda n: n


def split_mask(n: int, n_train: int, mode: str = "head") -> list[bool]:
    """True for rows of a single file that go to the test partition.

    ``head`` keeps the first ``n_train`` rows for training. ``systematic``
    picks the ``n - n_train`` test rows at evenly spaced positions, which
    keeps class proportions when the file is sorted by class.
    """
    if not 0 < n_train < n:
        raise DatasetError(f"split of {n_train} rows leaves no test rows out of {n}")
    if mode == "head":
        return [i >= n_train for i in range(n)]
    if mode == "systematic":
        m = n - n_train
        return [(i + 1) * m // n > i * m // n for i in range(n)]
    raise DatasetError(f"unknown split mode {mode!r}")


def load_dataset(spec: DatasetSpec) -> Dataset:
    train_f, train_l, arity = _read_rows(spec.train_path, spec)
    if spec.test_path:
        test_f, test_l, test_arity = _read_rows(spec.test_path, spec)
        if test_f and test_arity != arity:
            raise RaggedRowError(f"{spec.test_path}: {test_arity} fields per row, train file has {arity}")
    elif spec.split is not None:
        is_test = split_mask(len(train_f), spec.split, spec.split_mode)
        test_f = [r for r, t in zip(train_f, is_test) if t]
        test_l = [r for r, t in zip(train_l, is_test) if t]
        train_f = [r for r, t in zip(train_f, is_test) if not t]
        train_l = [r for r, t in zip(train_l, is_test) if not t]
    else:
        raise DatasetError(f"{spec.name}: a test file or a split row count is required")

    for part, got, want in (("train", len(train_f), spec.train_size), ("test", len(test_f), spec.test_size)):
        if want is not None and got != want:
            raise SizeMismatchError(f"{spec.name}: {part} has {got} rows, expected {want}")
    if not train_f or not test_f:
        raise DatasetError(f"{spec.name}: empty train or test partition")

    names = sorted(set(train_l), key=_label_key(set(train_l) | set(test_l)))
    unseen = sorted(set(test_l) - set(names))
    if unseen:
        raise UnseenLabelError(f"{spec.name}: test labels absent from train: {unseen}")
    ids = {n: i for i, n in enumerate(names)}
    train = Partition(np.array(train_f), [ids[n] for n in train_l], names)
    test = Partition(np.array(test_f), [ids[n] for n in test_l], names)
    return Dataset(spec.name, train, test, tuple(names))


def dataset_fingerprint(dataset: Dataset) -> str:
    h = hashlib.sha256()
    h.update(f"{len(dataset.train)}/{len(dataset.test)}/{dataset.num_attributes}/{dataset.num_classes}\n".encode())
    h.update("\x1f".join(dataset.label_names).encode())
    for part in (dataset.train, dataset.test):
        h.update(part.X.astype("<f8").tobytes())
        h.update(part.y.astype("<i8").tobytes())
    return h.hexdigest()


def export_canonical(dataset: Dataset, directory) -> DatasetSpec:
    """Write train.csv/test.csv (comma separated, label last) and return a spec for them."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for part, fname in ((dataset.train, "train.csv"), (dataset.test, "test.csv")):
        with open(directory / fname, "w") as fh:
            for row, lid in zip(part.X.tolist(), part.y.tolist()):
                fh.write(",".join(repr(v) for v in row) + "," + dataset.label_names[lid] + "\n")
    return DatasetSpec(dataset.name, str(directory / "train.csv"), str(directory / "test.csv"),
                       train_size=len(dataset.train), test_size=len(dataset.test))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def verify_checksums(spec: DatasetSpec) -> list[str]:
    """Check the spec's files against pinned digests; returns the names checked."""
    checked = []
    for path in filter(None, (spec.train_path, spec.test_path)):
        fname = Path(path).name
        want = (spec.sha256 or {}).get(fname)
        if want is None:
            continue
        got = sha256_file(path)
        if got != want:
            raise ChecksumError(f"{path}: sha256 {got} does not match pinned {want}")
        checked.append(fname)
    return checked


def _uncompress_z(data: bytes) -> bytes:
    try:
        import unlzw3
    except ImportError as exc:  # pragma: no cover - depends on optional package
        raise DatasetError("a .Z member needs the optional 'unlzw3' package") from exc
    return unlzw3.unlzw(data)


def fetch_dataset(spec: DatasetSpec, opener=urllib.request.urlopen) -> list[Path]:
    """Download the spec's zip archive and unpack the files it names.

    Files land next to ``spec.train_path``, so pass a resolved spec.

    ``.Z`` compressed members are expanded. Pinned checksums are verified
    after extraction; files without a pinned digest are logged with theirs.
    """
    if not spec.url:
        raise DatasetError(f"{spec.name}: no download url configured")
    directory = Path(spec.train_path).parent
    directory.mkdir(parents=True, exist_ok=True)
    with opener(spec.url) as resp:
        payload = resp.read()
    wanted = {Path(p).name for p in (spec.train_path, spec.test_path) if p}
    written = []
    with zipfile.ZipFile(io.BytesIO(payload)) as zf:
        for info in zf.infolist():
            base = Path(info.filename).name
            target = base[:-2] if base.endswith(".Z") else base
            if target not in wanted:
                continue
            data = zf.read(info)
            if base.endswith(".Z"):
                data = _uncompress_z(data)
            out = directory / target
            out.write_bytes(data)
            written.append(out)
    missing = wanted - {p.name for p in written}
    if missing:
        raise DatasetError(f"{spec.name}: archive lacks {sorted(missing)}")
    verify_checksums(spec)
    for p in written:
        if p.name not in (spec.sha256 or {}):
            log.warning("%s has no pinned checksum; sha256=%s", p, sha256_file(p))
    return written

