"""Sampling-based planners: RRT, RRT-Connect and Dynamic RRT.

Samples are continuous points in the cell-centre frame (cell ``(r, c)`` is
centred on ``(r, c)``); every steered point is snapped to the cell containing
it, so tree nodes, and therefore returned paths, are cells. Edges are
accepted only when :func:`~planetbench.grid.line_of_sight` holds.
"""

from __future__ import annotations

import math

import numpy as np

from ..grid import Cell, OccupancyGrid, los_flat
from ..tasks import PlanningTask
from .base import Deadline, PlannerConfig, PlanResult, SearchOutcome, run_search


class Tree:
    """Rooted tree of cells with linear-scan nearest neighbour and subtree
    removal."""

    def __init__(self, root: Cell, capacity: int = 256):
        self._pts = np.full((capacity, 2), np.inf)
        self.cells: list[Cell] = []
        self.parent: list[int] = []
        self.children: list[list[int]] = []
        self.alive: list[bool] = []
        self.index: dict[Cell, int] = {}
        self.add(root, -1)

    def __len__(self) -> int:
        return len(self.index)

    @property
    def root(self) -> Cell:
        return self.cells[0]

    def add(self, cell: Cell, parent: int) -> int:
        k = len(self.cells)
        if k == len(self._pts):
            grown = np.full((2 * k, 2), np.inf)
            grown[:k] = self._pts
            self._pts = grown
        self._pts[k] = cell
        self.cells.append(cell)
        self.parent.append(parent)
        self.children.append([])
        self.alive.append(True)
        self.index[cell] = k
        if parent >= 0:
            self.children[parent].append(k)
        return k

    def nearest(self, point) -> int:
        """Closest live node to ``point`` (ties go to the older node)."""
        pts = self._pts[: len(self.cells)]
        d2 = (pts[:, 0] - point[0]) ** 2 + (pts[:, 1] - point[1]) ** 2
        return int(np.argmin(d2))

    def branch(self, k: int) -> list[Cell]:
        """Cells from the root down to node ``k``."""
        out = []
        while k != -1:
            out.append(self.cells[k])
            k = self.parent[k]
        out.reverse()
        return out

    def trim(self, k: int) -> list[int]:
        """Remove node ``k`` and all of its descendants; returns their ids."""
        if not self.alive[k]:
            return []
        if self.parent[k] >= 0:
            self.children[self.parent[k]].remove(k)
        removed = []
        stack = [k]
        while stack:
            j = stack.pop()
            removed.append(j)
            self.alive[j] = False
            self._pts[j] = np.inf
            del self.index[self.cells[j]]
            stack.extend(self.children[j])
            self.children[j] = []
        return removed

    def is_consistent(self) -> bool:
        for k, ok in enumerate(self.alive):
            if not ok:
                continue
            p = self.parent[k]
            if k == 0:
                if p != -1:
                    return False
            elif p < 0 or not self.alive[p] or k not in self.children[p]:
                return False
            if self.index.get(self.cells[k]) != k:
                return False
        return True


def steer(from_cell: Cell, target, epsilon: float, shape: tuple[int, int]) -> Cell:
    """Step at most ``epsilon`` from ``from_cell`` toward ``target`` and snap
    the result to a cell."""
    dr = target[0] - from_cell[0]
    dc = target[1] - from_cell[1]
    d = math.hypot(dr, dc)
    if d <= epsilon:
        r, c = target
    else:
        r = from_cell[0] + epsilon * dr / d
        c = from_cell[1] + epsilon * dc / d
    r = min(max(math.floor(r + 0.5), 0), shape[0] - 1)
    c = min(max(math.floor(c + 0.5), 0), shape[1] - 1)
    return (r, c)


class _Sampler:
    def __init__(self, shape: tuple[int, int], seed: int):
        self.rng = np.random.default_rng(seed)
        self.span = np.array(shape, dtype=np.float64)

    def uniform(self) -> tuple[float, float]:
        u = self.rng.random(2) * self.span - 0.5
        return (float(u[0]), float(u[1]))


class DynamicRRT:
    """RRT that keeps its tree and a waypoint cache between plans.

    :meth:`replan` prunes every subtree whose edge to its parent has become
    blocked and regrows, sampling previous-solution waypoints with
    probability ``waypoint_bias``. On a static map only the first
    :meth:`plan` happens, so the behaviour is RRT plus the bookkeeping.
    """

    def __init__(
        self,
        grid: OccupancyGrid,
        task: PlanningTask,
        cfg: PlannerConfig,
        waypoint_bias: float = 0.4,
    ):
        self.grid = grid
        self.task = task
        self.cfg = cfg
        self.waypoint_bias = waypoint_bias
        self.tree = Tree(task.start)
        self.sampler = _Sampler(grid.shape, cfg.seed)
        self.waypoints: list[Cell] = []
        self.iterations = 0

    def invalidate(self, node: int) -> list[int]:
        return self.tree.trim(node)

    def _sample(self):
        rng = self.sampler.rng
        u = rng.random()
        if u < self.cfg.goal_bias:
            return self.task.goal
        if self.waypoints and u < self.cfg.goal_bias + self.waypoint_bias:
            return self.waypoints[int(rng.integers(len(self.waypoints)))]
        return self.sampler.uniform()

    def plan(self, deadline: Deadline | None = None) -> SearchOutcome:
        if deadline is None:
            deadline = Deadline(self.task.budget_s)
        outcome = _grow(self.grid, self.tree, self.task.goal, self.cfg, deadline, self._sample, self.iterations)
        self.iterations = outcome.iterations
        if outcome.status == "success":
            self.waypoints = list(outcome.path)
        return outcome

    def replan(self, grid: OccupancyGrid, deadline: Deadline | None = None) -> SearchOutcome:
        """Re-validate the tree against ``grid`` and continue growing it."""
        self.grid = grid
        flat, w, h = grid.flat, grid.width, grid.height
        tree = self.tree
        if not los_flat(flat, w, h, tree.root, tree.root):
            return SearchOutcome("no_path", [tree.root], self.iterations, 0)
        for k in range(1, len(tree.cells)):
            if tree.alive[k] and not los_flat(flat, w, h, tree.cells[tree.parent[k]], tree.cells[k]):
                tree.trim(k)
        self.waypoints = [p for p in self.waypoints if los_flat(flat, w, h, p, p)]
        # iteration budget is per plan call
        self.iterations = 0
        return self.plan(deadline)


def _grow(grid, tree: Tree, goal: Cell, cfg: PlannerConfig, deadline: Deadline, sample, it: int = 0) -> SearchOutcome:
    flat, w, h = grid.flat, grid.width, grid.height
    shape = (h, w)
    eps = cfg.epsilon
    tol = cfg.effective_goal_tolerance
    start = tree.root
    if start == goal:
        return SearchOutcome("success", [start], it)
    if len(tree) > 1:
        # regrowing a surviving tree: it may still reach the goal as is
        k = tree.nearest(goal)
        c = tree.cells[k]
        if math.hypot(c[0] - goal[0], c[1] - goal[1]) <= tol and los_flat(flat, w, h, c, goal):
            path = tree.branch(k)
            if c != goal:
                path.append(goal)
            return SearchOutcome("success", path, it)
    status = "exhausted"
    while True:
        if deadline.expired():
            status = "timeout"
            break
        if it >= cfg.max_iterations:
            break
        it += 1
        q = sample()
        near = tree.nearest(q)
        near_cell = tree.cells[near]
        new = steer(near_cell, q, eps, shape)
        if new in tree.index or not los_flat(flat, w, h, near_cell, new):
            continue
        k = tree.add(new, near)
        if math.hypot(new[0] - goal[0], new[1] - goal[1]) <= tol and los_flat(flat, w, h, new, goal):
            path = tree.branch(k)
            if new != goal:
                path.append(goal)
            return SearchOutcome("success", path, it)
    return SearchOutcome(status, tree.branch(tree.nearest(goal)), it)


def _rrt(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline) -> SearchOutcome:
    sampler = _Sampler(grid.shape, cfg.seed)
    rng = sampler.rng
    goal = task.goal

    def sample():
        if rng.random() < cfg.goal_bias:
            return goal
        return sampler.uniform()

    return _grow(grid, Tree(task.start), goal, cfg, deadline, sample)


def _dynamic_rrt(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline) -> SearchOutcome:
    return DynamicRRT(grid, task, cfg).plan(deadline)


def _rrt_connect(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline) -> SearchOutcome:
    flat, w, h = grid.flat, grid.width, grid.height
    shape = (h, w)
    eps = cfg.epsilon
    start, goal = task.start, task.goal
    if start == goal:
        return SearchOutcome("success", [start])
    sampler = _Sampler(shape, cfg.seed)
    rng = sampler.rng
    start_tree, goal_tree = Tree(start), Tree(goal)
    ta, tb = start_tree, goal_tree
    it = 0
    status = "exhausted"
    while True:
        if deadline.expired():
            status = "timeout"
            break
        if it >= cfg.max_iterations:
            break
        it += 1
        q = tb.root if rng.random() < cfg.goal_bias else sampler.uniform()
        near = ta.nearest(q)
        new = steer(ta.cells[near], q, eps, shape)
        if new not in ta.index and los_flat(flat, w, h, ta.cells[near], new):
            ka = ta.add(new, near)
            kb = _connect(tb, new, eps, shape, flat, deadline)
            if kb is not None:
                path = ta.branch(ka) + tb.branch(kb)[::-1][1:]
                if ta is goal_tree:
                    path.reverse()
                return SearchOutcome("success", path, it)
            if deadline.expired():
                status = "timeout"
                break
        ta, tb = tb, ta
    return SearchOutcome(status, start_tree.branch(start_tree.nearest(goal)), it)


def _connect(tree: Tree, target: Cell, eps: float, shape, flat, deadline: Deadline) -> int | None:
    """Greedily extend ``tree`` toward ``target``; index of the node equal to
    ``target`` on success, else None."""
    h, w = shape
    if target in tree.index:
        return tree.index[target]
    k = tree.nearest(target)
    while not deadline.expired():
        cur = tree.cells[k]
        nxt = steer(cur, target, eps, shape)
        if nxt == cur or nxt in tree.index or not los_flat(flat, w, h, cur, nxt):
            return None
        k = tree.add(nxt, k)
        if nxt == target:
            return k
    return None


def plan_rrt(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig | None = None, deadline: Deadline | None = None) -> PlanResult:
    return run_search(_rrt, grid, task, cfg or PlannerConfig("rrt"), deadline)


def plan_rrt_connect(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig | None = None, deadline: Deadline | None = None) -> PlanResult:
    """Bidirectional RRT: trees alternate extending toward a sample, and the
    opposite tree greedily connects to each new node."""
    return run_search(_rrt_connect, grid, task, cfg or PlannerConfig("rrt_connect"), deadline)


def plan_dynamic_rrt(grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig | None = None, deadline: Deadline | None = None) -> PlanResult:
    return run_search(_dynamic_rrt, grid, task, cfg or PlannerConfig("dynamic_rrt"), deadline)
