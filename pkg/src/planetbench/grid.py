"""Occupancy grid model and the geometry shared by every planner.

Conventions used throughout the package:

- cells are ``(row, col)`` tuples, origin at the top-left, row-major storage;
  a planar point ``(x, y)`` maps to ``(col, row)``;
- 0 is free space, 1 is occupied;
- anything out of bounds is treated as occupied;
- connectivity is 8-neighbour with unit orthogonal and sqrt(2) diagonal costs,
  and a diagonal step is forbidden when either flanking orthogonal cell is
  occupied (no corner cutting).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

Cell = tuple[int, int]
Path = list[Cell]

SQRT2 = math.sqrt(2.0)

# (drow, dcol, cost); diagonals last so the orthogonal flanks are known first
_MOVES: tuple[tuple[int, int, float], ...] = (
    (-1, 0, 1.0),
    (0, -1, 1.0),
    (0, 1, 1.0),
    (1, 0, 1.0),
    (-1, -1, SQRT2),
    (-1, 1, SQRT2),
    (1, -1, SQRT2),
    (1, 1, SQRT2),
)


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """Immutable binary traversability map.

    ``cells`` is an ``(height, width)`` uint8 array; the constructor copies and
    freezes it, so a grid can be shared between concurrent trials.
    """

    cells: np.ndarray
    resolution_m: float = 1.0
    name: str = "grid"
    _flat: list[int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.cells)
        if arr.ndim != 2:
            raise ValueError(f"occupancy cells must be 2D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("grid must be at least 1x1")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("occupancy values must be 0 or 1")
        if not (self.resolution_m > 0 and math.isfinite(self.resolution_m)):
            raise ValueError(f"resolution_m must be positive, got {self.resolution_m}")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "cells", arr)
        object.__setattr__(self, "_flat", arr.ravel().tolist())

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape  # type: ignore[return-value]

    @property
    def flat(self) -> list[int]:
        """Row-major occupancy as a plain list (fast scalar indexing)."""
        return self._flat

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width

    def index(self, cell: Cell) -> int:
        return cell[0] * self.width + cell[1]

    def cell_at(self, idx: int) -> Cell:
        return divmod(idx, self.width)

    def free_count(self) -> int:
        return int(self.cells.size - int(self.cells.sum()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return (
            self.name == other.name
            and self.resolution_m == other.resolution_m
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self) -> int:
        return hash((self.name, self.shape, self.cells.tobytes()))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], **kwargs) -> "OccupancyGrid":
        return cls(np.asarray(rows, dtype=np.uint8), **kwargs)


def is_free(grid: OccupancyGrid, cell: Cell) -> bool:
    r, c = cell
    if not (0 <= r < grid.height and 0 <= c < grid.width):
        return False
    return grid.flat[r * grid.width + c] == 0


def iter_neighbor_indices(
    flat: Sequence[int], width: int, height: int, idx: int
) -> Iterator[tuple[int, float]]:
    """Yield ``(neighbor_index, move_cost)`` for a free cell given by flat index.

    This is the hot-loop form of :func:`neighbors`; callers must pass a free,
    in-bounds index.
    """
    r, c = divmod(idx, width)
    up = r > 0 and flat[idx - width] == 0
    down = r < height - 1 and flat[idx + width] == 0
    left = c > 0 and flat[idx - 1] == 0
    right = c < width - 1 and flat[idx + 1] == 0
    if up:
        yield idx - width, 1.0
    if left:
        yield idx - 1, 1.0
    if right:
        yield idx + 1, 1.0
    if down:
        yield idx + width, 1.0
    if up and left and flat[idx - width - 1] == 0:
        yield idx - width - 1, SQRT2
    if up and right and flat[idx - width + 1] == 0:
        yield idx - width + 1, SQRT2
    if down and left and flat[idx + width - 1] == 0:
        yield idx + width - 1, SQRT2
    if down and right and flat[idx + width + 1] == 0:
        yield idx + width + 1, SQRT2


def neighbors(grid: OccupancyGrid, cell: Cell) -> list[tuple[Cell, float]]:
    """Free 8-connected neighbours of ``cell`` with their move costs.

    Returns an empty list for an occupied or out-of-bounds cell.
    """
    if not is_free(grid, cell):
        return []
    w = grid.width
    return [
        (divmod(n, w), cost)
        for n, cost in iter_neighbor_indices(grid.flat, w, grid.height, grid.index(cell))
    ]


def supercover(a: Cell, b: Cell) -> Iterator[Cell]:
    """Every cell touched by the closed segment between two cell centres.

    When the segment passes exactly through a lattice corner, all four cells
    sharing that corner are reported. Integer arithmetic only, so the result
    is exact and symmetric in ``a`` and ``b``.
    """
    r, c = a
    dr = b[0] - a[0]
    dc = b[1] - a[1]
    nr, nc = abs(dr), abs(dc)
    sr = 1 if dr > 0 else -1
    sc = 1 if dc > 0 else -1
    yield (r, c)
    ir = ic = 0
    while ir < nr or ic < nc:
        # compare the parametric positions of the next row and column crossings:
        # (0.5 + ic) / nc  vs  (0.5 + ir) / nr
        decision = (1 + 2 * ic) * nr - (1 + 2 * ir) * nc
        if decision == 0:
            yield (r + sr, c)
            yield (r, c + sc)
            r += sr
            c += sc
            ir += 1
            ic += 1
        elif decision < 0:
            c += sc
            ic += 1
        else:
            r += sr
            ir += 1
        yield (r, c)


def los_flat(flat: Sequence[int], width: int, height: int, a: Cell, b: Cell) -> bool:
    """:func:`line_of_sight` on a raw row-major occupancy list."""
    r, c = a
    if not (0 <= r < height and 0 <= c < width) or flat[r * width + c]:
        return False
    dr = b[0] - r
    dc = b[1] - c
    nr, nc = abs(dr), abs(dc)
    sr = 1 if dr > 0 else -1
    sc = 1 if dc > 0 else -1
    ir = ic = 0
    while ir < nr or ic < nc:
        decision = (1 + 2 * ic) * nr - (1 + 2 * ir) * nc
        if decision == 0:
            # corner graze: both side cells must be free (and in bounds)
            rr, cc = r + sr, c + sc
            if not (0 <= rr < height and 0 <= cc < width):
                return False
            if flat[rr * width + c] or flat[r * width + cc]:
                return False
            r, c = rr, cc
            ir += 1
            ic += 1
        elif decision < 0:
            c += sc
            ic += 1
        else:
            r += sr
            ir += 1
        if not (0 <= r < height and 0 <= c < width) or flat[r * width + c]:
            return False
    return True


def line_of_sight(grid: OccupancyGrid, a: Cell, b: Cell) -> bool:
    """True iff every cell the segment between the centres of ``a`` and ``b``
    touches is free."""
    return los_flat(grid.flat, grid.width, grid.height, a, b)


def path_length(path: Sequence[Cell]) -> float:
    """Sum of Euclidean distances between consecutive waypoints, in cells.

    ``math.fsum`` keeps the result independent of segment order, so two paths
    made of the same moves report bit-identical lengths.
    """
    if len(path) == 0:
        raise ValueError("path_length of an empty path")
    return math.fsum(
        math.hypot(q[0] - p[0], q[1] - p[1]) for p, q in zip(path, path[1:])
    )


def euclidean(a: Cell, b: Cell) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def is_feasible(grid: OccupancyGrid, path: Sequence[Cell], start: Cell, goal: Cell) -> bool:
    if not path:
        return False
    if tuple(path[0]) != tuple(start) or tuple(path[-1]) != tuple(goal):
        return False
    if not all(is_free(grid, tuple(p)) for p in path):
        return False
    flat, w, h = grid.flat, grid.width, grid.height
    return all(los_flat(flat, w, h, tuple(p), tuple(q)) for p, q in zip(path, path[1:]))
