"""Dataset-scale benchmark runs.

Each (map, planner) pair is run exactly once under the task's time budget.
The budget is enforced twice: planners poll a cooperative
:class:`~planetbench.planners.Deadline`, and a watchdog thread gives up on a
trial ``watchdog_slack_s`` seconds after the budget, recording a timeout and
moving on.
"""

from __future__ import annotations

import datetime as _dt
import json
import logging
import os
import platform
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .grid import OccupancyGrid
from .gridio import GridFormatError, PathLike, list_grid_files, read_grid
from .metrics import AggregateRow, TrialRecord, aggregate, attach_path_deviation, distance_transform, make_record
from .overlay import render_overlay
from .planners import PLANNERS, Deadline, PlannerConfig, PlanResult
from .tasks import PlanningTask, sample_task

log = logging.getLogger(__name__)

DEFAULT_WATCHDOG_SLACK_S = 5.0
REFERENCE_PLANNER = "astar"

PlannerFn = Callable[[OccupancyGrid, PlanningTask, PlannerConfig, Deadline], PlanResult]


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    path: Path


@dataclass
class DatasetManifest:
    dataset_name: str
    entries: list[ManifestEntry]
    format_notes: str = ""
    provenance: str = ""

    def to_dict(self, relative_to: Path | None = None) -> dict:
        def rel(p: Path) -> str:
            if relative_to is not None:
                try:
                    return os.path.relpath(p, relative_to)
                except ValueError:
                    pass
            return str(p)

        return {
            "dataset_name": self.dataset_name,
            "format_notes": self.format_notes,
            "provenance": self.provenance,
            "maps": [{"name": e.name, "path": rel(e.path)} for e in self.entries],
        }


def load_manifest(path: PathLike, validate: bool = True) -> DatasetManifest:
    """Read a manifest JSON file, or build one from a directory of grids.

    Map paths are resolved relative to the manifest's directory. With
    ``validate`` every map is parsed and all problems are reported together.
    """
    path = Path(path)
    if path.is_dir():
        return manifest_from_directory(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"{path}: cannot read manifest: {exc}") from None
    try:
        name = str(data["dataset_name"])
        maps = data["maps"]
    except (KeyError, TypeError):
        raise ManifestError(f"{path}: manifest needs 'dataset_name' and 'maps'") from None
    entries = []
    for i, m in enumerate(maps):
        if isinstance(m, str):
            m = {"path": m}
        if "path" not in m:
            raise ManifestError(f"{path}: maps[{i}] has no 'path'")
        p = Path(m["path"])
        if not p.is_absolute():
            p = path.parent / p
        entries.append(ManifestEntry(str(m.get("name", p.stem)), p))
    manifest = DatasetManifest(name, entries, str(data.get("format_notes", "")), str(data.get("provenance", "")))
    if validate:
        validate_manifest(manifest, origin=str(path))
    return manifest


def manifest_from_directory(directory: PathLike, dataset_name: str | None = None) -> DatasetManifest:
    d = Path(directory)
    entries = [ManifestEntry(p.stem, p) for p in list_grid_files(d)]
    if not entries:
        raise ManifestError(f"{d}: no .pgm or .csv grids found")
    manifest = DatasetManifest(dataset_name or d.name, entries, format_notes="directory listing")
    validate_manifest(manifest, origin=str(d))
    return manifest


def validate_manifest(manifest: DatasetManifest, origin: str = "manifest") -> None:
    problems = []
    seen: set[str] = set()
    for e in manifest.entries:
        if e.name in seen:
            problems.append(f"duplicate map name {e.name!r}")
        seen.add(e.name)
        if not e.path.exists():
            problems.append(f"{e.path}: file not found")
            continue
        try:
            read_grid(e.path)
        except GridFormatError as exc:
            problems.append(str(exc))
    if problems:
        raise ManifestError(f"{origin}: " + "; ".join(problems))


@dataclass
class BenchmarkReport:
    config: dict
    records: list[TrialRecord]
    aggregates: list[AggregateRow]
    environment: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "environment": self.environment,
            "records": [r.to_dict() for r in self.records],
            "aggregates": [a.to_dict() for a in self.aggregates],
        }


def environment_fingerprint(workers: int) -> dict:
    return {
        "machine": platform.machine(),
        "node": platform.node(),
        "platform": platform.platform(),
        "python": platform.python_version(),
        "processor": platform.processor(),
        "cpu_count": os.cpu_count(),
        "workers": workers,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def run_trial(
    fn: PlannerFn,
    grid: OccupancyGrid,
    task: PlanningTask,
    cfg: PlannerConfig,
    watchdog_slack_s: float | None = DEFAULT_WATCHDOG_SLACK_S,
) -> PlanResult:
    """One planner call that never raises.

    With a watchdog slack the planner runs in a daemon thread; if it has not
    returned ``budget + slack`` seconds in, its deadline is cancelled and a
    timeout is recorded without waiting for it.
    """
    deadline = Deadline(task.budget_s)
    box: dict = {}

    def target() -> None:
        try:
            box["result"] = fn(grid, task, cfg, deadline)
        except Exception as exc:  # trial isolation
            box["error"] = exc

    t0 = time.perf_counter()
    if watchdog_slack_s is None:
        target()
    else:
        worker = threading.Thread(target=target, name=f"trial-{cfg.planner_kind}", daemon=True)
        worker.start()
        worker.join(task.budget_s + watchdog_slack_s)
        if worker.is_alive():
            deadline.cancel()
            log.warning("%s on %s exceeded budget + %.1fs; abandoned", cfg.planner_kind, task.grid_name, watchdog_slack_s)
            return PlanResult(
                "timeout",
                [task.start],
                planning_time_s=time.perf_counter() - t0,
                error="watchdog: planner exceeded budget plus slack",
            )
    if "error" in box:
        exc = box["error"]
        log.warning("%s on %s raised %r", cfg.planner_kind, task.grid_name, exc)
        return PlanResult(
            "error",
            [task.start],
            planning_time_s=time.perf_counter() - t0,
            error=f"{type(exc).__name__}: {exc}",
        )
    result = box["result"]
    if not result.path or tuple(result.path[0]) != tuple(task.start):
        return PlanResult("error", [task.start], result.planning_time_s, error="planner returned a path not starting at start")
    return result


def _run_map(
    dataset: str,
    entry: ManifestEntry,
    task: PlanningTask | None,
    configs: Sequence[PlannerConfig],
    budget_s: float | None,
    seed: int,
    watchdog_slack_s: float | None,
    overrides: Mapping[str, PlannerFn] | None,
    overlay_dir: str | None,
) -> list[TrialRecord]:
    grid = read_grid(entry.path)
    if task is None:
        task = sample_task(grid, seed=seed)
    task = PlanningTask(entry.name, task.start, task.goal, budget_s or task.budget_s, task.seed)
    edt = distance_transform(grid)
    records = []
    for cfg in configs:
        fn = (overrides or {}).get(cfg.planner_kind, PLANNERS[cfg.planner_kind])
        result = run_trial(fn, grid, task, cfg, watchdog_slack_s)
        records.append(make_record(dataset, entry.name, cfg.planner_kind, grid, task, result, edt))
        if overlay_dir is not None:
            render_overlay(
                grid,
                [(cfg.planner_kind, result.path)],
                Path(overlay_dir) / f"{entry.name}_{cfg.planner_kind}.svg",
                start=task.start,
                goal=task.goal,
            )
    return records


def run_benchmark(
    manifest: DatasetManifest,
    planner_configs: Sequence[PlannerConfig],
    tasks: Sequence[PlanningTask] | None = None,
    *,
    budget_s: float | None = None,
    seed: int = 0,
    workers: int = 1,
    watchdog_slack_s: float | None = DEFAULT_WATCHDOG_SLACK_S,
    overlay_dir: PathLike | None = None,
    planner_overrides: Mapping[str, PlannerFn] | None = None,
) -> BenchmarkReport:
    """Run every planner on every map of ``manifest``.

    ``tasks`` are matched to maps by grid name; a map without a task gets
    one from :func:`~planetbench.tasks.sample_task` with ``seed``.
    ``budget_s`` overrides the tasks' budgets. ``workers > 1`` spreads maps
    over processes; the planners of one map always run sequentially.
    ``planner_overrides`` swaps the implementation behind a planner kind.
    """
    kinds = [c.planner_kind for c in planner_configs]
    if len(set(kinds)) != len(kinds):
        raise ValueError("each planner kind may appear only once")
    by_name = {t.grid_name: t for t in (tasks or ())}
    if overlay_dir is not None:
        Path(overlay_dir).mkdir(parents=True, exist_ok=True)
    jobs = [
        (
            manifest.dataset_name,
            e,
            by_name.get(e.name),
            list(planner_configs),
            budget_s,
            seed,
            watchdog_slack_s,
            planner_overrides,
            None if overlay_dir is None else str(overlay_dir),
        )
        for e in manifest.entries
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_map = list(pool.map(_run_map, *zip(*jobs)))
    else:
        per_map = [_run_map(*job) for job in jobs]
    order = {k: i for i, k in enumerate(kinds)}
    records = sorted(
        (r for recs in per_map for r in recs),
        key=lambda r: (r.dataset, r.map_name, order[r.planner_kind]),
    )
    attach_path_deviation(records, REFERENCE_PLANNER)
    config = {
        "dataset_name": manifest.dataset_name,
        "planners": [c.to_dict() for c in planner_configs],
        "budget_s": budget_s,
        "seed": seed,
        "workers": workers,
        "watchdog_slack_s": watchdog_slack_s,
        "reference_planner": REFERENCE_PLANNER,
        "tasks": [t.to_dict() for t in (tasks or ())],
    }
    return BenchmarkReport(config, records, aggregate(records), environment_fingerprint(workers))
