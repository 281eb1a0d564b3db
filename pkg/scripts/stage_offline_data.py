#!/usr/bin/env python3
"""Stage benchmark files from PyPI-hosted copies when UCI is unreachable.

Some sandboxes can reach the Python package index but not the UCI
repository. Two PyPI distributions carry copies of the benchmark data:

* ``common_datasets`` ships the original Statlog Landsat ``sat.trn`` and
  ``sat.tst`` files, byte for byte.
* ``keel_ds`` ships KEEL conversions. Its ``magic.dat`` keeps the UCI row
  order of ``magic04.data``; its ``letter.dat`` and ``penbased.dat`` hold
  the same rows as UCI but shuffled, so the original train/test split
  cannot be rebuilt. Those two go into ``letter-keel`` and
  ``pendigits-keel``, which are described by ``proxies.ini`` and are only
  stand-ins.

Shuttle has no PyPI copy and must be fetched from UCI.

Usage: python scripts/stage_offline_data.py [DATA_DIR]
"""

import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

PROXIES_INI = """\
# Stand-ins built from shuffled KEEL copies; not the UCI splits.
[letter-keel]
train = letter.dat
label_column = last
delimiter = ,
split = 15000
train_size = 15000
test_size = 5000

[pendigits-keel]
train = penbased.dat
label_column = last
delimiter = ,
split = 7494
train_size = 7494
test_size = 3498
"""


def wheel(name: str, tmp: Path) -> zipfile.ZipFile:
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", str(tmp), name], check=True)
    path = next(tmp.glob(f"{name.replace('-', '_')}-*.whl"))
    return zipfile.ZipFile(path)


def keel_rows(zf: zipfile.ZipFile, member: str) -> str:
    lines = zf.read(member).decode().splitlines()
    rows = [",".join(c.strip() for c in line.split(",")) for line in lines if line.strip() and not line.startswith("@")]
    return "\n".join(rows) + "\n"


def main(argv):
    data = Path(argv[1] if len(argv) > 1 else "data")
    with tempfile.TemporaryDirectory() as t:
        tmp = Path(t)
        cd = wheel("common_datasets", tmp)
        (data / "landsat").mkdir(parents=True, exist_ok=True)
        for src, dst in (("sat.trn.txt", "sat.trn"), ("sat.tst.txt", "sat.tst")):
            (data / "landsat" / dst).write_bytes(cd.read(f"common_datasets/data/classification/satimage/{src}"))

        keel = wheel("keel_ds", tmp)
        raw = "keel_ds/data/balanced/raw/"
        (data / "magic").mkdir(parents=True, exist_ok=True)
        (data / "magic" / "magic04.data").write_text(keel_rows(keel, raw + "magic.dat"))
        for name, member in (("letter-keel", "letter.dat"), ("pendigits-keel", "penbased.dat")):
            (data / name).mkdir(parents=True, exist_ok=True)
            (data / name / member).write_text(keel_rows(keel, raw + member))
    (data / "proxies.ini").write_text(PROXIES_INI)
    print(f"staged landsat, magic, letter-keel, pendigits-keel under {data}")


if __name__ == "__main__":
    main(sys.argv)
