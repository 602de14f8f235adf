"""Start/goal selection and the task CSV format."""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .grid import Cell, OccupancyGrid, iter_neighbor_indices
from .gridio import PathLike

DEFAULT_BUDGET_S = 60.0

TASK_COLUMNS = ("grid_name", "start_row", "start_col", "goal_row", "goal_col", "budget_s", "seed")


class NoFreeSpaceError(ValueError):
    pass


class TaskFormatError(ValueError):
    pass


@dataclass(frozen=True)
class PlanningTask:
    grid_name: str
    start: Cell
    goal: Cell
    budget_s: float = DEFAULT_BUDGET_S
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", (int(self.start[0]), int(self.start[1])))
        object.__setattr__(self, "goal", (int(self.goal[0]), int(self.goal[1])))
        object.__setattr__(self, "budget_s", float(self.budget_s))
        if not self.budget_s > 0:
            raise ValueError("budget_s must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def degenerate(self) -> bool:
        return self.start == self.goal

    def to_dict(self) -> dict:
        return {
            "grid_name": self.grid_name,
            "start": list(self.start),
            "goal": list(self.goal),
            "budget_s": self.budget_s,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlanningTask":
        return cls(
            grid_name=d["grid_name"],
            start=tuple(d["start"]),
            goal=tuple(d["goal"]),
            budget_s=float(d.get("budget_s", DEFAULT_BUDGET_S)),
            seed=int(d.get("seed", 0)),
        )


def _bfs_hops(grid: OccupancyGrid, source: int) -> dict[int, int]:
    """Hop counts from ``source`` under the planners' neighbour relation."""
    flat, w, h = grid.flat, grid.width, grid.height
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v, _ in iter_neighbor_indices(flat, w, h, u):
            if v not in dist:
                dist[v] = du
                queue.append(v)
    return dist


def _components(grid: OccupancyGrid) -> list[list[int]]:
    """Free-space components in order of their smallest row-major index."""
    seen: set[int] = set()
    comps = []
    for idx, v in enumerate(grid.flat):
        if v or idx in seen:
            continue
        comp = sorted(_bfs_hops(grid, idx))
        seen.update(comp)
        comps.append(comp)
    return comps


def _largest_component_indices(grid: OccupancyGrid) -> list[int]:
    comps = _components(grid)
    if not comps:
        raise NoFreeSpaceError(f"grid {grid.name!r} has no free space")
    # max() keeps the first of equal-size components, i.e. the smallest min index
    return max(comps, key=len)


def largest_free_component(grid: OccupancyGrid) -> set[Cell]:
    """Largest connected free region.

    Connectivity is the one the planners use (8-neighbour without corner
    cutting), so any two cells of the result are joined by a planner path.
    """
    w = grid.width
    return {divmod(i, w) for i in _largest_component_indices(grid)}


def _farthest(dist: dict[int, int]) -> int:
    far = max(dist.values())
    return min(i for i, d in dist.items() if d == far)


def seed_cell(component: Sequence[int], seed: int) -> int:
    """Flat index of the seed-selected cell of a sorted component."""
    rng = np.random.default_rng(seed)
    return component[int(rng.integers(len(component)))]


def sample_task(
    grid: OccupancyGrid, seed: int = 0, budget_s: float = DEFAULT_BUDGET_S
) -> PlanningTask:
    """Pick a far-apart start/goal pair by a double BFS sweep.

    A seed-chosen cell of the largest component is swept to its farthest cell
    ``u`` (hop metric), then ``u`` is swept to its farthest cell ``v``; the task
    is the pair ordered so the start has the smaller row-major index.
    Farthest-cell ties go to the smallest row-major index.
    """
    comp = _largest_component_indices(grid)
    s0 = seed_cell(comp, seed)
    u = _farthest(_bfs_hops(grid, s0))
    v = _farthest(_bfs_hops(grid, u))
    u, v = min(u, v), max(u, v)
    w = grid.width
    return PlanningTask(grid.name, divmod(u, w), divmod(v, w), budget_s=budget_s, seed=seed)


def save_tasks(tasks: Iterable[PlanningTask], path: PathLike) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TASK_COLUMNS)
        for t in tasks:
            writer.writerow(
                [t.grid_name, t.start[0], t.start[1], t.goal[0], t.goal[1], repr(float(t.budget_s)), t.seed]
            )
    return path


def load_tasks(path: PathLike) -> list[PlanningTask]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TaskFormatError(f"{path}: {exc.strerror or exc}") from None
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        return []
    header = [h.strip() for h in rows[0]]
    if tuple(header) != TASK_COLUMNS:
        raise TaskFormatError(f"{path}:1: expected header {','.join(TASK_COLUMNS)}")
    tasks = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not v.strip() for v in row):
            continue
        if len(row) != len(TASK_COLUMNS):
            raise TaskFormatError(
                f"{path}:{lineno}: expected {len(TASK_COLUMNS)} fields, got {len(row)}"
            )
        try:
            tasks.append(
                PlanningTask(
                    grid_name=row[0],
                    start=(int(row[1]), int(row[2])),
                    goal=(int(row[3]), int(row[4])),
                    budget_s=float(row[5]),
                    seed=int(row[6]),
                )
            )
        except ValueError as exc:
            raise TaskFormatError(f"{path}:{lineno}: {exc}") from None
    return tasks
