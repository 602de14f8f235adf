from __future__ import annotations

import threading
import time
import tracemalloc
from dataclasses import asdict, dataclass
from typing import Callable, Literal, NamedTuple

from ..grid import Cell, OccupancyGrid, is_free
from ..tasks import PlanningTask

PlannerKind = Literal["dijkstra", "astar", "thetastar", "rrt", "rrt_connect", "dynamic_rrt"]
PLANNER_KINDS: tuple[str, ...] = ("dijkstra", "astar", "thetastar", "rrt", "rrt_connect", "dynamic_rrt")
GRAPH_KINDS = frozenset({"dijkstra", "astar", "thetastar"})

Status = Literal["success", "timeout", "exhausted", "no_path", "error"]


@dataclass(frozen=True)
class PlannerConfig:
    planner_kind: str = "dijkstra"
    epsilon: float = 5.0
    max_iterations: int = 100_000
    # None -> 0 for graph planners, epsilon for sampling planners
    goal_tolerance: float | None = None
    goal_bias: float = 0.05
    seed: int = 0
    track_memory: bool = True

    def __post_init__(self) -> None:
        if self.planner_kind not in PLANNER_KINDS:
            raise ValueError(
                f"unknown planner {self.planner_kind!r}; expected one of {', '.join(PLANNER_KINDS)}"
            )
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must lie in [0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.goal_tolerance is not None and self.goal_tolerance < 0:
            raise ValueError("goal_tolerance must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def effective_goal_tolerance(self) -> float:
        if self.goal_tolerance is not None:
            return self.goal_tolerance
        return 0.0 if self.planner_kind in GRAPH_KINDS else self.epsilon

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PlannerConfig":
        return cls(**d)


@dataclass
class PlanResult:
    status: str
    path: list[Cell]
    planning_time_s: float = 0.0
    peak_memory_kib: float = 0.0
    iterations: int = 0
    expansions: int = 0
    error: str | None = None

    @property
    def success(self) -> bool:
        return self.status == "success"

    def to_dict(self) -> dict:
        d = {
            "status": self.status,
            "waypoints": [list(p) for p in self.path],
            "planning_time_s": self.planning_time_s,
            "peak_memory_kib": self.peak_memory_kib,
            "iterations": self.iterations,
            "expansions": self.expansions,
        }
        if self.error is not None:
            d["error"] = self.error
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PlanResult":
        return cls(
            status=d["status"],
            path=[(int(p[0]), int(p[1])) for p in d["waypoints"]],
            planning_time_s=float(d.get("planning_time_s", 0.0)),
            peak_memory_kib=float(d.get("peak_memory_kib", 0.0)),
            iterations=int(d.get("iterations", 0)),
            expansions=int(d.get("expansions", 0)),
            error=d.get("error"),
        )


class Deadline:
    """Cooperative time budget.

    Planners call :meth:`expired` once per expansion or iteration. A watchdog
    in another thread may :meth:`cancel` it, which the planner sees on its
    next poll.
    """

    def __init__(self, budget_s: float | None, clock: Callable[[], float] = time.monotonic):
        self._clock = clock
        self._end = None if budget_s is None else clock() + budget_s
        self._cancelled = threading.Event()

    def expired(self) -> bool:
        if self._cancelled.is_set():
            return True
        return self._end is not None and self._clock() >= self._end

    def cancel(self) -> None:
        self._cancelled.set()

    @property
    def cancelled(self) -> bool:
        return self._cancelled.is_set()


class SearchOutcome(NamedTuple):
    status: str
    path: list[Cell]
    iterations: int = 0
    expansions: int = 0


SearchFn = Callable[[OccupancyGrid, PlanningTask, PlannerConfig, Deadline], SearchOutcome]


def run_search(
    search: SearchFn,
    grid: OccupancyGrid,
    task: PlanningTask,
    cfg: PlannerConfig,
    deadline: Deadline | None = None,
) -> PlanResult:
    """Time and memory-profile one planner call.

    Memory is the peak of live Python allocations above the level at entry,
    as seen by :mod:`tracemalloc`.
    """
    if deadline is None:
        deadline = Deadline(task.budget_s)
    start, goal = task.start, task.goal
    if not (is_free(grid, start) and is_free(grid, goal)):
        return PlanResult("no_path", [start])

    started_tracing = False
    if cfg.track_memory:
        if not tracemalloc.is_tracing():
            tracemalloc.start()
            started_tracing = True
        tracemalloc.reset_peak()
        base, _ = tracemalloc.get_traced_memory()
    t0 = time.perf_counter()
    try:
        outcome = search(grid, task, cfg, deadline)
    finally:
        elapsed = time.perf_counter() - t0
        peak_kib = 0.0
        if cfg.track_memory:
            _, peak = tracemalloc.get_traced_memory()
            peak_kib = max(0, peak - base) / 1024.0
            if started_tracing:
                tracemalloc.stop()
    return PlanResult(
        status=outcome.status,
        path=outcome.path,
        planning_time_s=elapsed,
        peak_memory_kib=peak_kib,
        iterations=outcome.iterations,
        expansions=outcome.expansions,
    )
