"""Brute-force reference implementations, deliberately independent of the
package code paths they check."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

ROOT2 = math.sqrt(2.0)


def grid_edges(cells: np.ndarray) -> list[tuple[tuple[int, int], tuple[int, int], float]]:
    """Directed edges of the 8-connected free graph, no corner cutting,
    enumerated directly from the rule."""
    h, w = cells.shape

    def free(r, c):
        return 0 <= r < h and 0 <= c < w and cells[r, c] == 0

    out = []
    for r in range(h):
        for c in range(w):
            if not free(r, c):
                continue
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr == 0 and dc == 0:
                        continue
                    if not free(r + dr, c + dc):
                        continue
                    if dr and dc:
                        if not (free(r + dr, c) and free(r, c + dc)):
                            continue
                        out.append(((r, c), (r + dr, c + dc), ROOT2))
                    else:
                        out.append(((r, c), (r + dr, c + dc), 1.0))
    return out


def bellman_ford(cells: np.ndarray, start, goal) -> float:
    """Shortest-path cost by repeated edge relaxation; inf if unreachable."""
    edges = grid_edges(cells)
    dist = {start: 0.0}
    n = int((cells == 0).sum())
    for _ in range(max(n - 1, 1)):
        changed = False
        for u, v, w in edges:
            du = dist.get(u)
            if du is not None and du + w < dist.get(v, math.inf):
                dist[v] = du + w
                changed = True
        if not changed:
            break
    return dist.get(goal, math.inf)


def exhaustive_shortest(cells: np.ndarray, start, goal) -> float:
    """Minimum over all simple paths, by depth-first enumeration with
    cost-bound pruning."""
    adj: dict = {}
    for u, v, w in grid_edges(cells):
        adj.setdefault(u, []).append((v, w))
    best = [math.inf]
    on_path = {start}

    def dfs(u, cost):
        if cost >= best[0]:
            return
        if u == goal:
            best[0] = cost
            return
        for v, w in adj.get(u, ()):
            if v not in on_path:
                on_path.add(v)
                dfs(v, cost + w)
                on_path.remove(v)

    dfs(start, 0.0)
    return best[0]


def _segment_touches_square(a, b, r, c) -> bool:
    """Exact test: does the closed segment a-b (cell-centre frame, centres at
    integers) meet the closed square of cell (r, c)? Liang-Barsky clipping in
    rational arithmetic."""
    lo_r, hi_r = Fraction(2 * r - 1, 2), Fraction(2 * r + 1, 2)
    lo_c, hi_c = Fraction(2 * c - 1, 2), Fraction(2 * c + 1, 2)
    t0, t1 = Fraction(0), Fraction(1)
    for p0, d, lo, hi in ((a[0], b[0] - a[0], lo_r, hi_r), (a[1], b[1] - a[1], lo_c, hi_c)):
        if d == 0:
            if p0 < lo or p0 > hi:
                return False
            continue
        ta = (lo - p0) / Fraction(d)
        tb = (hi - p0) / Fraction(d)
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return False
    return True


def touched_cells(a, b) -> set:
    r_lo, r_hi = sorted((a[0], b[0]))
    c_lo, c_hi = sorted((a[1], b[1]))
    return {
        (r, c)
        for r in range(r_lo - 1, r_hi + 2)
        for c in range(c_lo - 1, c_hi + 2)
        if _segment_touches_square(a, b, r, c)
    }


def brute_los(cells: np.ndarray, a, b) -> bool:
    h, w = cells.shape
    return all(0 <= r < h and 0 <= c < w and cells[r, c] == 0 for r, c in touched_cells(a, b))


def brute_edt(cells: np.ndarray) -> np.ndarray:
    """Distance from each cell centre to the nearest occupied centre,
    including the ring just outside the grid."""
    h, w = cells.shape
    obstacles = [(r, c) for r in range(-1, h + 1) for c in range(-1, w + 1)
                 if not (0 <= r < h and 0 <= c < w) or cells[r, c]]
    out = np.zeros((h, w))
    for r in range(h):
        for c in range(w):
            out[r, c] = min(math.hypot(r - orow, c - ocol) for orow, ocol in obstacles)
    return out
