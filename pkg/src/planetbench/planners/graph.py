"""Grid graph search: Dijkstra, A* (octile heuristic) and lazy Theta*.

Open lists are binary heaps keyed ``(priority, row_major_index)`` so pops are
deterministic across platforms.
"""

from __future__ import annotations

import math
from heapq import heappop, heappush

from ..grid import SQRT2, Cell, OccupancyGrid, iter_neighbor_indices, los_flat
from ..tasks import PlanningTask
from .base import Deadline, PlannerConfig, PlanResult, SearchOutcome, run_search

_OCTILE_DIAG = SQRT2 - 1.0
INF = math.inf


def octile(a: Cell, b: Cell) -> float:
    dr = abs(a[0] - b[0])
    dc = abs(a[1] - b[1])
    return max(dr, dc) + _OCTILE_DIAG * min(dr, dc)


def _trace(parent: list[int], node: int, width: int) -> list[Cell]:
    out = []
    while node != -1:
        out.append(divmod(node, width))
        p = parent[node]
        node = -1 if p == node else p
    out.reverse()
    return out


class _Nearest:
    """Tracks the expanded cell closest to the goal (ties: smaller index)."""

    def __init__(self, goal: Cell, width: int):
        self.goal = goal
        self.width = width
        self.best = -1
        self.best_d2 = INF

    def offer(self, idx: int) -> None:
        r, c = divmod(idx, self.width)
        d2 = (r - self.goal[0]) ** 2 + (c - self.goal[1]) ** 2
        if d2 < self.best_d2 or (d2 == self.best_d2 and idx < self.best):
            self.best_d2 = d2
            self.best = idx


def _best_first(
    grid: OccupancyGrid, task: PlanningTask, deadline: Deadline, use_heuristic: bool
) -> SearchOutcome:
    flat, w, h = grid.flat, grid.width, grid.height
    start, goal = task.start, task.goal
    s = start[0] * w + start[1]
    t = goal[0] * w + goal[1]
    if s == t:
        return SearchOutcome("success", [start])
    n = len(flat)
    # path cost is kept as an exact (orthogonal, diagonal) move count pair so
    # equal-cost paths compare and report identically
    n_orth = [0] * n
    n_diag = [0] * n
    g = [INF] * n
    parent = [-1] * n
    closed = bytearray(n)
    gr, gc = goal

    def heuristic(idx: int) -> float:
        if not use_heuristic:
            return 0.0
        r, c = divmod(idx, w)
        dr = abs(r - gr)
        dc = abs(c - gc)
        return dr + _OCTILE_DIAG * dc if dr > dc else dc + _OCTILE_DIAG * dr

    g[s] = 0.0
    parent[s] = s
    heap = [(heuristic(s), s)]
    nearest = _Nearest(goal, w)
    pops = expansions = 0
    while heap:
        if deadline.expired():
            return SearchOutcome("timeout", _trace(parent, nearest.best, w) if nearest.best >= 0 else [start], pops, expansions)
        _, u = heappop(heap)
        pops += 1
        if closed[u]:
            continue
        closed[u] = 1
        expansions += 1
        if u == t:
            return SearchOutcome("success", _trace(parent, u, w), pops, expansions)
        nearest.offer(u)
        ou, du = n_orth[u], n_diag[u]
        for v, cost in iter_neighbor_indices(flat, w, h, u):
            if closed[v]:
                continue
            if cost == 1.0:
                ov, dv = ou + 1, du
            else:
                ov, dv = ou, du + 1
            gv = ov + dv * SQRT2
            if gv < g[v]:
                g[v] = gv
                n_orth[v] = ov
                n_diag[v] = dv
                parent[v] = u
                heappush(heap, (gv + heuristic(v), v))
    return SearchOutcome("no_path", _trace(parent, nearest.best, w), pops, expansions)


def _dijkstra(grid, task, cfg, deadline) -> SearchOutcome:
    return _best_first(grid, task, deadline, use_heuristic=False)


def _astar(grid, task, cfg, deadline) -> SearchOutcome:
    return _best_first(grid, task, deadline, use_heuristic=True)


def _lazy_theta(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline) -> SearchOutcome:
    flat, w, h = grid.flat, grid.width, grid.height
    start, goal = task.start, task.goal
    s = start[0] * w + start[1]
    t = goal[0] * w + goal[1]
    if s == t:
        return SearchOutcome("success", [start])
    n = len(flat)
    g = [INF] * n
    parent = [-1] * n
    closed = bytearray(n)
    gr, gc = goal
    hypot = math.hypot

    def dist(a: int, b: int) -> float:
        ar, ac = divmod(a, w)
        br, bc = divmod(b, w)
        return hypot(ar - br, ac - bc)

    g[s] = 0.0
    parent[s] = s
    heap = [(hypot(start[0] - gr, start[1] - gc), s)]
    nearest = _Nearest(goal, w)
    pops = expansions = 0
    while heap:
        if deadline.expired():
            return SearchOutcome("timeout", _trace(parent, nearest.best, w) if nearest.best >= 0 else [start], pops, expansions)
        _, u = heappop(heap)
        pops += 1
        if closed[u]:
            continue
        p = parent[u]
        if p != u and not los_flat(flat, w, h, divmod(p, w), divmod(u, w)):
            # the optimistic parent was not visible: fall back to the best
            # expanded grid neighbour (one always exists, the generating cell)
            best, best_parent = INF, -1
            for v, cost in iter_neighbor_indices(flat, w, h, u):
                if closed[v] and g[v] + cost < best:
                    best, best_parent = g[v] + cost, v
            g[u] = best
            parent[u] = best_parent
        closed[u] = 1
        expansions += 1
        if u == t:
            return SearchOutcome("success", _trace(parent, u, w), pops, expansions)
        nearest.offer(u)
        pu = parent[u]
        gpu = g[pu]
        for v, _ in iter_neighbor_indices(flat, w, h, u):
            if closed[v]:
                continue
            gv = gpu + dist(pu, v)
            if gv < g[v]:
                g[v] = gv
                parent[v] = pu
                vr, vc = divmod(v, w)
                heappush(heap, (gv + hypot(vr - gr, vc - gc), v))
    return SearchOutcome("no_path", _trace(parent, nearest.best, w), pops, expansions)


def plan_dijkstra(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig | None = None, deadline: Deadline | None = None) -> PlanResult:
    """Minimum-cost 8-connected path by label-setting search."""
    return run_search(_dijkstra, grid, task, cfg or PlannerConfig("dijkstra"), deadline)


def plan_astar(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig | None = None, deadline: Deadline | None = None) -> PlanResult:
    """A* with the octile heuristic, which is consistent under unit/sqrt(2)
    moves, so costs match :func:`plan_dijkstra` exactly."""
    return run_search(_astar, grid, task, cfg or PlannerConfig("astar"), deadline)


def plan_thetastar(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig | None = None, deadline: Deadline | None = None) -> PlanResult:
    """Any-angle search, lazy variant: a neighbour optimistically inherits the
    expanding cell's parent, and line of sight is only verified when that
    neighbour is itself expanded."""
    return run_search(_lazy_theta, grid, task, cfg or PlannerConfig("thetastar"), deadline)
