"""Serialising benchmark reports.

Markdown tables mark, among planners with a 100% success rate, the two
shortest mean path lengths in bold and the two fastest mean planning times
underlined (values tied with the second best are marked too).
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

from .bench import BenchmarkReport
from .gridio import PathLike
from .metrics import AggregateRow, TrialRecord, aggregate, display_percent

CSV_COLUMNS = (
    "planner",
    "success_rate_pct",
    "mean_path_length",
    "mean_planning_time_s",
    "mean_distance_left",
    "dataset",
    "n_trials",
    "n_success",
    "mean_path_deviation",
    "mean_smoothness",
    "mean_clearance",
    "mean_peak_memory_kib",
    "mean_planning_time_all_s",
    "min_peak_memory_kib",
    "max_peak_memory_kib",
    "std_peak_memory_kib",
    "min_smoothness",
    "max_smoothness",
    "std_smoothness",
    "min_clearance",
    "max_clearance",
    "std_clearance",
)

# fields that legitimately differ between otherwise identical runs
VOLATILE_FIELDS = ("planning_time_s", "peak_memory_kib")

MARK_TOP_K = 2

PLANNER_LABELS = {
    "dijkstra": "Dijkstra",
    "astar": "AStar",
    "thetastar": "ThetaStar",
    "rrt": "RRT",
    "dynamic_rrt": "Dynamic RRT",
    "rrt_connect": "RRT Connect",
}


class ReportConsistencyError(ValueError):
    pass


def _csv_value(row: AggregateRow, col: str):
    if col == "planner":
        return row.planner_kind
    if col == "dataset":
        return row.dataset_name
    return getattr(row, col)


def aggregates_csv(rows: Sequence[AggregateRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_csv_value(row, c) for c in CSV_COLUMNS])
    return buf.getvalue()


def records_jsonl(records: Sequence[TrialRecord], mask_volatile: bool = False) -> str:
    lines = []
    for r in records:
        d = r.to_dict()
        if mask_volatile:
            for k in VOLATILE_FIELDS:
                d[k] = None
        lines.append(json.dumps(d, sort_keys=True))
    return "".join(line + "\n" for line in lines)


def read_records_jsonl(path: PathLike) -> list[TrialRecord]:
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(TrialRecord.from_dict(json.loads(line)))
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"{path}:{lineno}: bad record ({exc})") from None
    return out


def _marked(rows: Sequence[AggregateRow], attr: str) -> set[int]:
    eligible = [(getattr(r, attr), i) for i, r in enumerate(rows) if r.success_rate_pct == 100.0]
    if not eligible:
        return set()
    values = sorted(v for v, _ in eligible)
    cutoff = values[min(MARK_TOP_K, len(values)) - 1]
    return {i for v, i in eligible if v <= cutoff}


def markdown_table(rows: Sequence[AggregateRow]) -> str:
    bold = _marked(rows, "mean_path_length")
    under = _marked(rows, "mean_planning_time_s")
    head = (
        "| Planner | Success rate | Path length | Plan. time (s) | Dist. left "
        "| Path dev. | Smoothness (rad/move) | Clearance (cells) | Memory (KiB) |"
    )
    lines = [head, "|" + "---|" * 9]
    for i, r in enumerate(rows):
        length = f"{r.mean_path_length:.2f}"
        t = f"{r.mean_planning_time_s:.2f}"
        if i in bold:
            length = f"**{length}**"
        if i in under:
            t = f"<u>{t}</u>"
        lines.append(
            f"| {PLANNER_LABELS.get(r.planner_kind, r.planner_kind)} | {display_percent(r.success_rate_pct)} "
            f"| {length} | {t} | {r.mean_distance_left:.1f} | {r.mean_path_deviation:.2f} "
            f"| {r.mean_smoothness:.3f} | {r.mean_clearance:.2f} | {r.mean_peak_memory_kib:.1f} |"
        )
    return "\n".join(lines) + "\n"


def report_markdown(report: BenchmarkReport) -> str:
    datasets: dict[str, list[AggregateRow]] = {}
    for row in report.aggregates:
        datasets.setdefault(row.dataset_name, []).append(row)
    parts = ["# Benchmark report", ""]
    budget = report.config.get("budget_s")
    parts.append(f"Budget per trial: {budget if budget is not None else 'per task'} s; "
                 f"seed {report.config.get('seed')}; workers {report.config.get('workers', 1)}.")
    parts.append("")
    for name, rows in datasets.items():
        n = rows[0].n_trials if rows else 0
        parts += [f"## {name} ({n} maps)", "", markdown_table(rows).rstrip("\n"), ""]
    parts.append("**Shortest** and <u>fastest</u> planners with success rate (SR) of 100%.")
    return "\n".join(parts) + "\n"


def emit_report(report: BenchmarkReport, fmt: str, destination: PathLike) -> Path:
    """Write ``report`` as ``csv`` (aggregates), ``json`` (lossless) or
    ``markdown``."""
    dest = Path(destination)
    if fmt == "csv":
        text = aggregates_csv(report.aggregates)
    elif fmt == "json":
        text = json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n"
    elif fmt in ("markdown", "md"):
        text = report_markdown(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    try:
        dest.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {dest}: {exc.strerror or exc}") from exc
    return dest


def _rows_equal(a: AggregateRow, b: AggregateRow) -> bool:
    da, db = a.to_dict(), b.to_dict()
    for k, va in da.items():
        vb = db[k]
        if isinstance(va, float) or isinstance(vb, float):
            if not math.isclose(va, vb, rel_tol=1e-12, abs_tol=1e-12):
                return False
        elif va != vb:
            return False
    return True


def check_consistency(report: BenchmarkReport) -> None:
    recomputed = aggregate(report.records)
    if len(recomputed) != len(report.aggregates) or not all(
        _rows_equal(a, b) for a, b in zip(report.aggregates, recomputed)
    ):
        raise ReportConsistencyError("stored aggregates do not match the records")


def load_report(path: PathLike) -> BenchmarkReport:
    """Read a JSON report and verify its aggregates against its records."""
    data = json.loads(Path(path).read_text())
    report = BenchmarkReport(
        config=data["config"],
        records=[TrialRecord.from_dict(d) for d in data["records"]],
        aggregates=[AggregateRow.from_dict(d) for d in data["aggregates"]],
        environment=data.get("environment", {}),
    )
    check_consistency(report)
    return report


def write_outputs(report: BenchmarkReport, out_dir: PathLike) -> dict[str, Path]:
    """The standard output set: records.jsonl, aggregates.csv, report.json,
    report.md."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "records": out / "records.jsonl",
        "aggregates": out / "aggregates.csv",
        "json": out / "report.json",
        "markdown": out / "report.md",
    }
    paths["records"].write_text(records_jsonl(report.records))
    emit_report(report, "csv", paths["aggregates"])
    emit_report(report, "json", paths["json"])
    emit_report(report, "markdown", paths["markdown"])
    return paths
