"""The six benchmarked planners behind one call signature.

Every ``plan_*`` function takes ``(grid, task, cfg=None, deadline=None)`` and
returns a :class:`PlanResult`; :func:`plan` dispatches on
``cfg.planner_kind``.
"""

from __future__ import annotations

from ..grid import OccupancyGrid
from ..tasks import PlanningTask
from .base import (
    GRAPH_KINDS,
    PLANNER_KINDS,
    Deadline,
    PlannerConfig,
    PlanResult,
    SearchOutcome,
    run_search,
)
from .graph import octile, plan_astar, plan_dijkstra, plan_thetastar
from .sampling import DynamicRRT, Tree, plan_dynamic_rrt, plan_rrt, plan_rrt_connect, steer

PLANNERS = {
    "dijkstra": plan_dijkstra,
    "astar": plan_astar,
    "thetastar": plan_thetastar,
    "rrt": plan_rrt,
    "rrt_connect": plan_rrt_connect,
    "dynamic_rrt": plan_dynamic_rrt,
}


def plan(
    grid: OccupancyGrid,
    task: PlanningTask,
    cfg: PlannerConfig,
    deadline: Deadline | None = None,
) -> PlanResult:
    return PLANNERS[cfg.planner_kind](grid, task, cfg, deadline)


__all__ = [
    "GRAPH_KINDS",
    "PLANNER_KINDS",
    "PLANNERS",
    "Deadline",
    "DynamicRRT",
    "PlanResult",
    "PlannerConfig",
    "SearchOutcome",
    "Tree",
    "octile",
    "plan",
    "plan_astar",
    "plan_dijkstra",
    "plan_dynamic_rrt",
    "plan_rrt",
    "plan_rrt_connect",
    "plan_thetastar",
    "run_search",
    "steer",
]
