"""Result export and accuracy-vs-cost plots."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .experiment import ExperimentRecord, GridConfig, pareto_front

COLUMNS = (
    "dataset", "fingerprint", "iExponent", "kClusters", "L", "D", "kNeighbors",
    "accuracyPercent", "distanceComputations", "centroidComponent", "refSetComponent",
    "convergenceCapped", "costMillions",
)


def record_row(r: ExperimentRecord) -> dict:
    cfg = r.config
    return {
        "dataset": r.dataset,
        "fingerprint": r.fingerprint,
        "iExponent": "" if cfg is None else cfg.i_exponent,
        "kClusters": "" if cfg is None else cfg.k_clusters,
        "L": "" if cfg is None else cfg.L,
        "D": "" if cfg is None else repr(cfg.D),
        "kNeighbors": r.k_neighbors,
        "accuracyPercent": f"{r.accuracy_percent:.4f}",
        "distanceComputations": r.distance_computations,
        "centroidComponent": r.centroid_component,
        "refSetComponent": r.ref_set_component,
        "convergenceCapped": "true" if r.convergence_capped else "false",
        "costMillions": f"{r.cost_millions:.6f}",
    }


def _row_record(row: dict) -> ExperimentRecord:
    k_neighbors = int(row["kNeighbors"])
    cfg = None
    if row["kClusters"] not in ("", None):
        cfg = GridConfig(int(row["iExponent"]), int(row["kClusters"]), int(row["L"]), float(row["D"]), k_neighbors)
    return ExperimentRecord(
        dataset=row["dataset"],
        fingerprint=row["fingerprint"],
        config=cfg,
        k_neighbors=k_neighbors,
        accuracy_percent=float(row["accuracyPercent"]),
        correct=-1,  # not part of the export schema
        distance_computations=int(row["distanceComputations"]),
        centroid_component=int(row["centroidComponent"]),
        ref_set_component=int(row["refSetComponent"]),
        convergence_capped=str(row["convergenceCapped"]).lower() == "true",
    )


def export_records(records, path, fmt: str = "csv") -> Path:
    records = list(records)
    if not records:
        raise ValueError("nothing to export")
    path = Path(path)
    rows = [record_row(r) for r in records]
    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        elif fmt == "jsonl":
            for row in rows:
                fh.write(json.dumps(row) + "\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return path


def read_records(path) -> list[ExperimentRecord]:
    path = Path(path)
    with open(path) as fh:
        text = fh.read()
    if path.suffix == ".jsonl" or text.lstrip().startswith("{"):
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        for row in rows:
            for key, value in row.items():
                row[key] = "" if value is None else str(value)
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
    return [_row_record(row) for row in rows]


def export_predictions(records, path) -> Path:
    """One JSON line per record: its configuration and per-item predicted label ids."""
    path = Path(path)
    with open(path, "w") as fh:
        for r in records:
            row = record_row(r)
            row["predictions"] = [] if r.predictions is None else np.asarray(r.predictions).tolist()
            fh.write(json.dumps(row) + "\n")
    return path


def _series_key(r: ExperimentRecord):
    return "baseline" if r.config is None else r.config.D


def data_table(records, baseline=None) -> str:
    buf = io.StringIO()
    rows = list(records) + ([baseline] if baseline is not None else [])
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(record_row(r) for r in rows)
    return buf.getvalue()


def emit_plot(records, path, baseline: ExperimentRecord | None = None, title: str | None = None) -> Path:
    """Scatter of accuracy against cost (millions), one series per D.

    The Pareto front is ringed, the baseline drawn as dashed reference
    lines, and the plotted numbers are embedded in the SVG as a CSV table
    inside a ``<metadata>`` element.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    records = list(records)
    if not records:
        raise ValueError("nothing to plot")
    path = Path(path)
    front = {id(r) for r in pareto_front(records)}
    fig, ax = plt.subplots(figsize=(7, 4.5))
    series: dict = {}
    for r in records:
        series.setdefault(_series_key(r), []).append(r)
    markers = "osd^v<>"
    for n, (key, rs) in enumerate(sorted(series.items(), key=lambda kv: str(kv[0]))):
        label = "baseline" if key == "baseline" else f"D = {key:g}"
        ax.scatter([r.cost_millions for r in rs], [r.accuracy_percent for r in rs],
                   marker=markers[n % len(markers)], label=label, zorder=3)
    fr = [r for r in records if id(r) in front]
    ax.scatter([r.cost_millions for r in fr], [r.accuracy_percent for r in fr], s=140,
               facecolors="none", edgecolors="black", linewidths=1.0, label="Pareto front", zorder=4)
    if baseline is not None:
        ax.axhline(baseline.accuracy_percent, linestyle="--", color="grey", linewidth=0.8,
                   label=f"conv-k-NN ({baseline.accuracy_percent:.2f}%)")
        ax.axvline(baseline.cost_millions, linestyle=":", color="grey", linewidth=0.8)
    ax.set_xlabel("distance computations (millions)")
    ax.set_ylabel("accuracy (%)")
    ax.set_title(title or records[0].dataset)
    ax.grid(linestyle="--", alpha=0.5)
    ax.legend(fontsize="small")
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    svg = buf.getvalue()
    table = f'<metadata id="rsrm-data"><![CDATA[\n{data_table(records, baseline)}]]></metadata>\n'
    at = svg.index(">", svg.index("<svg")) + 1
    svg = svg[:at] + "\n" + table + svg[at:]
    path.write_text(svg)
    return path


def embedded_table(svg_path) -> str:
    """The CSV table stored in a plot written by :func:`emit_plot`."""
    text = Path(svg_path).read_text()
    start = text.index("<![CDATA[", text.index('id="rsrm-data"')) + len("<![CDATA[\n")
    return text[start:text.index("]]>", start)]


__all__ = ["COLUMNS", "data_table", "embedded_table", "emit_plot", "export_predictions",
           "export_records", "read_records", "record_row"]
