"""Command-line entry point: ``rsrm fetch-data | baseline | grid | report``.

Exit status: 0 success, 1 usage error, 2 data error, 3 results written but
some clustering hit the iteration cap.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import datasets, experiment, report
from .kmeans import DEFAULT_MAX_ITERATIONS

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAPPED = 0, 1, 2, 3

log = logging.getLogger("rsrm")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_int_range(text: str) -> list[int]:
    """``"3"``, ``"1,2,5"`` or ``"1..8"`` (inclusive)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise UsageError(f"empty range {text!r}")
    return out


def parse_float_set(text: str) -> list[float]:
    vals = [float(p) for p in text.split(",") if p.strip()]
    if not vals or any(v <= 0 for v in vals):
        raise UsageError(f"D values must be positive: {text!r}")
    return vals


def _load(args):
    spec = datasets.get_spec(args.dataset, args.data_dir, args.config)
    ds = datasets.load_dataset(spec)
    log.info("%s: %d train / %d test, %d attributes, %d classes", ds.name, len(ds.train),
             len(ds.test), ds.num_attributes, ds.num_classes)
    return ds


def _out_path(args, default_name: str) -> Path:
    path = Path(args.out) if args.out else Path(args.results_dir) / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _print_record(r: experiment.ExperimentRecord) -> None:
    if r.config is None:
        head = f"{r.dataset} conv-k-NN k={r.k_neighbors}"
    else:
        c = r.config
        head = f"{r.dataset} i={c.i_exponent} kClusters={c.k_clusters} L={c.L} D={c.D:g} k={r.k_neighbors}"
    capped = " (k-means capped)" if r.convergence_capped else ""
    print(f"{head}: accuracy {r.accuracy_percent:.2f}%  cost {r.distance_computations} "
          f"({r.cost_millions:.2f}M; centroids {r.centroid_component}, reference sets {r.ref_set_component}){capped}")


def cmd_fetch(args) -> int:
    names = sorted(n for n in datasets.read_specs(args.config) if n != "toy") if args.dataset == "all" else [args.dataset]
    for name in names:
        spec = datasets.get_spec(name, args.data_dir, args.config)
        for path in datasets.fetch_dataset(spec):
            print(f"{name}: wrote {path}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    ds = _load(args)
    fp = datasets.dataset_fingerprint(ds)
    if args.sweep is not None:
        best_k, best_acc, table = experiment.find_best_k(ds, args.sweep)
        print("k\taccuracy")
        for k, acc in table.items():
            print(f"{k}\t{acc:.4f}" + ("\t<- best" if k == best_k else ""))
        k = best_k
    else:
        k = args.k
    rec = experiment.run_conv_baseline(ds, k, fp)
    _print_record(rec)
    out = _out_path(args, f"{ds.name}-baseline.{args.format}")
    report.export_records([rec], out, args.format)
    report.export_predictions([rec], out.with_suffix(".predictions.jsonl"))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_grid(args) -> int:
    ds = _load(args)
    fp = datasets.dataset_fingerprint(ds)
    i_range = parse_int_range(args.i_range)
    d_set = parse_float_set(args.d_set)
    k = args.k_neighbors
    if k is None:
        k, acc, _ = experiment.find_best_k(ds, args.k_max)
        print(f"{ds.name}: best conv-k-NN k = {k} ({acc:.2f}%)")
    records = experiment.run_rsrm_grid(ds, k, i_range, d_set, args.max_iterations, fp)
    for r in records:
        _print_record(r)
    out = _out_path(args, f"{ds.name}-grid.{args.format}")
    report.export_records(records, out, args.format)
    report.export_predictions(records, out.with_suffix(".predictions.jsonl"))
    print(f"wrote {out}")
    if args.plot:
        baseline = experiment.run_conv_baseline(ds, k, fp) if args.with_baseline else None
        report.emit_plot(records, args.plot, baseline)
        print(f"wrote {args.plot}")
    return EXIT_CAPPED if any(r.convergence_capped for r in records) else EXIT_OK


def cmd_report(args) -> int:
    records = report.read_records(args.records)
    grid = [r for r in records if not r.is_baseline]
    baseline = next((r for r in records if r.is_baseline), None)
    if args.baseline:
        baseline = report.read_records(args.baseline)[0]
    report.emit_plot(grid or records, args.out, baseline)
    front = experiment.pareto_front(grid or records)
    print(f"Pareto front ({len(front)} of {len(grid or records)}):")
    for r in front:
        _print_record(r)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rsrm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_opts(sp):
        sp.add_argument("--dataset", required=True)
        sp.add_argument("--data-dir", default=None, help=f"default: ${datasets.DATA_DIR_ENV} or ./data")
        sp.add_argument("--config", default=None, help="dataset INI file (default: bundled)")

    def out_opts(sp):
        sp.add_argument("--out", default=None)
        sp.add_argument("--results-dir", default="results")
        sp.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    sp = sub.add_parser("fetch-data", help="download UCI datasets")
    data_opts(sp)
    sp.set_defaults(func=cmd_fetch)

    sp = sub.add_parser("baseline", help="conv-k-NN over the whole training set")
    data_opts(sp)
    out_opts(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--sweep", type=int, metavar="KMAX", help="find the best k in 1..KMAX")
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("grid", help="RSRM over the (i, D) grid")
    data_opts(sp)
    out_opts(sp)
    sp.add_argument("--i-range", default="1..8")
    sp.add_argument("--d-set", default="1,1.5,2")
    sp.add_argument("--k-neighbors", type=int, default=None, help="default: best conv-k-NN k")
    sp.add_argument("--k-max", type=int, default=experiment.DEFAULT_K_MAX)
    sp.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    sp.add_argument("--plot", default=None, help="also write an SVG plot here")
    sp.add_argument("--with-baseline", action="store_true", help="draw the conv-k-NN reference in the plot")
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("report", help="plot saved records")
    sp.add_argument("--records", required=True)
    sp.add_argument("--baseline", default=None)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rsrm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (datasets.DatasetError, OSError) as exc:
        print(f"rsrm: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"rsrm: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
