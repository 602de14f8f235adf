"""Per-trial and aggregate evaluation metrics.

Aggregation populations (per dataset and planner):

- success rate, distance left, peak memory and ``mean_planning_time_all_s``
  use every trial (a success contributes distance left 0);
- path length, planning time, path deviation, smoothness and clearance use
  successful trials only, and are reported as 0 when a planner never
  succeeded.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .grid import Cell, OccupancyGrid, euclidean, path_length
from .planners.base import PlanResult
from .tasks import PlanningTask


@dataclass
class TrialRecord:
    dataset: str
    map_name: str
    planner_kind: str
    task: PlanningTask
    result: PlanResult
    path_length: float
    distance_left: float
    path_deviation: float | None = None
    smoothness_rad_per_move: float | None = None
    clearance_cells: float | None = None

    @property
    def success(self) -> bool:
        return self.result.status == "success"

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "map": self.map_name,
            "planner": self.planner_kind,
            "task": self.task.to_dict(),
            **self.result.to_dict(),
            "path_length": self.path_length,
            "distance_left": self.distance_left,
            "path_deviation": self.path_deviation,
            "smoothness_rad_per_move": self.smoothness_rad_per_move,
            "clearance_cells": self.clearance_cells,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        return cls(
            dataset=d["dataset"],
            map_name=d["map"],
            planner_kind=d["planner"],
            task=PlanningTask.from_dict(d["task"]),
            result=PlanResult.from_dict(d),
            path_length=float(d["path_length"]),
            distance_left=float(d["distance_left"]),
            path_deviation=d.get("path_deviation"),
            smoothness_rad_per_move=d.get("smoothness_rad_per_move"),
            clearance_cells=d.get("clearance_cells"),
        )


@dataclass
class AggregateRow:
    planner_kind: str
    dataset_name: str
    success_rate_pct: float
    mean_path_length: float
    mean_planning_time_s: float
    mean_distance_left: float
    mean_path_deviation: float
    mean_smoothness: float
    mean_clearance: float
    mean_peak_memory_kib: float
    n_trials: int
    n_success: int = 0
    mean_planning_time_all_s: float = 0.0
    min_peak_memory_kib: float = 0.0
    max_peak_memory_kib: float = 0.0
    std_peak_memory_kib: float = 0.0
    min_smoothness: float = 0.0
    max_smoothness: float = 0.0
    std_smoothness: float = 0.0
    min_clearance: float = 0.0
    max_clearance: float = 0.0
    std_clearance: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AggregateRow":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


def display_percent(pct: float) -> int:
    """Integer percentage for tables, rounding halves up."""
    return int(math.floor(pct + 0.5))


def success_rate(records: Sequence[TrialRecord]) -> float:
    """Percentage of successful trials, ``100 * N_success / N_trials``."""
    if not records:
        raise ValueError("success_rate of an empty record set")
    return 100.0 * sum(1 for r in records if r.success) / len(records)


def distance_left(result: PlanResult, goal: Cell) -> float:
    """Euclidean distance from the path's last waypoint to the goal."""
    if result.status == "success":
        return 0.0
    return euclidean(result.path[-1], goal)


def path_deviation(record: TrialRecord, astar_reference: TrialRecord) -> float:
    """Signed path-length excess over the A* path on the same task."""
    if not (record.success and astar_reference.success):
        raise ValueError("path deviation needs two successful trials")
    if (record.task.start, record.task.goal) != (astar_reference.task.start, astar_reference.task.goal):
        raise ValueError("path deviation needs trials on the same task")
    return record.path_length - astar_reference.path_length


def smoothness(path: Sequence[Cell]) -> float:
    """Mean absolute heading change per interior waypoint, in radians.

    Zero-length segments are skipped; fewer than two segments gives 0.
    """
    headings = [
        math.atan2(q[0] - p[0], q[1] - p[1])
        for p, q in zip(path, path[1:])
        if p[0] != q[0] or p[1] != q[1]
    ]
    if len(headings) < 2:
        return 0.0
    turns = []
    for a, b in zip(headings, headings[1:]):
        d = abs(b - a) % (2 * math.pi)
        turns.append(min(d, 2 * math.pi - d))
    return math.fsum(turns) / len(turns)


def distance_transform(grid: OccupancyGrid) -> np.ndarray:
    """Exact Euclidean distance from each cell centre to the nearest occupied
    cell centre, with the ring of cells just outside the grid counted as
    occupied. Occupied cells map to 0."""
    free = np.pad(grid.cells == 0, 1, constant_values=False)
    return ndimage.distance_transform_edt(free)[1:-1, 1:-1]


def obstacle_clearance(grid: OccupancyGrid, path: Sequence[Cell], edt: np.ndarray | None = None) -> float:
    """Mean distance-transform value over the path's waypoints."""
    if not path:
        raise ValueError("obstacle_clearance of an empty path")
    if edt is None:
        edt = distance_transform(grid)
    return math.fsum(float(edt[r, c]) for r, c in path) / len(path)


def make_record(
    dataset: str,
    map_name: str,
    planner_kind: str,
    grid: OccupancyGrid,
    task: PlanningTask,
    result: PlanResult,
    edt: np.ndarray | None = None,
) -> TrialRecord:
    """Wrap a plan result with its derived metrics (path deviation is filled in
    later by :func:`attach_path_deviation`)."""
    rec = TrialRecord(
        dataset=dataset,
        map_name=map_name,
        planner_kind=planner_kind,
        task=task,
        result=result,
        path_length=path_length(result.path),
        distance_left=distance_left(result, task.goal),
    )
    if result.status == "success":
        rec.smoothness_rad_per_move = smoothness(result.path)
        rec.clearance_cells = obstacle_clearance(grid, result.path, edt)
    return rec


def attach_path_deviation(records: Iterable[TrialRecord], reference_kind: str = "astar") -> None:
    """Set ``path_deviation`` on every successful record whose map also has a
    successful reference-planner trial."""
    records = list(records)
    refs = {
        (r.dataset, r.map_name): r
        for r in records
        if r.planner_kind == reference_kind and r.success
    }
    for r in records:
        ref = refs.get((r.dataset, r.map_name))
        r.path_deviation = path_deviation(r, ref) if (ref is not None and r.success) else None


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values) if values else 0.0


def _spread(values: Sequence[float]) -> tuple[float, float, float]:
    if not values:
        return 0.0, 0.0, 0.0
    return min(values), max(values), statistics.pstdev(values)


def aggregate(records: Sequence[TrialRecord]) -> list[AggregateRow]:
    """One row per (dataset, planner), in order of first appearance."""
    groups: dict[tuple[str, str], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.dataset, r.planner_kind), []).append(r)
    rows = []
    for (dataset, kind), recs in groups.items():
        ok = [r for r in recs if r.success]
        pd = [r.path_deviation for r in ok if r.path_deviation is not None]
        sm = [r.smoothness_rad_per_move for r in ok if r.smoothness_rad_per_move is not None]
        cl = [r.clearance_cells for r in ok if r.clearance_cells is not None]
        mem = [r.result.peak_memory_kib for r in recs]
        mem_lo, mem_hi, mem_sd = _spread(mem)
        sm_lo, sm_hi, sm_sd = _spread(sm)
        cl_lo, cl_hi, cl_sd = _spread(cl)
        rows.append(
            AggregateRow(
                planner_kind=kind,
                dataset_name=dataset,
                success_rate_pct=success_rate(recs),
                mean_path_length=_mean([r.path_length for r in ok]),
                mean_planning_time_s=_mean([r.result.planning_time_s for r in ok]),
                mean_distance_left=_mean([r.distance_left for r in recs]),
                mean_path_deviation=_mean(pd),
                mean_smoothness=_mean(sm),
                mean_clearance=_mean(cl),
                mean_peak_memory_kib=_mean(mem),
                n_trials=len(recs),
                n_success=len(ok),
                mean_planning_time_all_s=_mean([r.result.planning_time_s for r in recs]),
                min_peak_memory_kib=mem_lo,
                max_peak_memory_kib=mem_hi,
                std_peak_memory_kib=mem_sd,
                min_smoothness=sm_lo,
                max_smoothness=sm_hi,
                std_smoothness=sm_sd,
                min_clearance=cl_lo,
                max_clearance=cl_hi,
                std_clearance=cl_sd,
            )
        )
    return rows
