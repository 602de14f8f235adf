"""SVG path overlays on occupancy grids."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .grid import Cell, OccupancyGrid
from .gridio import PathLike

OCCUPIED_FILL = "#2b2b2b"
FREE_FILL = "#f2f2f2"
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
DASHES = ("", "4 2", "1 1", "6 2 1 2", "3 3", "8 2")

# above this many cells, runs of equal cells in a row share one rect
PER_CELL_LIMIT = 256 * 256

LEGEND_ROW = 1.6
# rough advance of one legend character at font-size 1
LEGEND_CHAR_W = 0.6


def _grid_rects(grid: OccupancyGrid) -> list[str]:
    rows = grid.cells.tolist()
    merge = grid.width * grid.height > PER_CELL_LIMIT
    out = []
    for r, row in enumerate(rows):
        c = 0
        while c < grid.width:
            v = row[c]
            end = c + 1
            if merge:
                while end < grid.width and row[end] == v:
                    end += 1
            fill = OCCUPIED_FILL if v else FREE_FILL
            out.append(f'<rect x="{c}" y="{r}" width="{end - c}" height="1" fill="{fill}"/>')
            c = end
    return out


def _pt(cell: Cell) -> str:
    return f"{cell[1] + 0.5:g},{cell[0] + 0.5:g}"


def render_svg(
    grid: OccupancyGrid,
    paths: Sequence[tuple[str, Sequence[Cell]]] = (),
    *,
    start: Cell | None = None,
    goal: Cell | None = None,
    scale: float | None = None,
) -> str:
    """SVG text for ``grid`` with each ``(label, path)`` drawn as a polyline.

    Start/goal markers default to the first path's endpoints. Output depends
    only on the inputs, so it is byte-stable.
    """
    w, h = grid.width, grid.height
    if scale is None:
        scale = max(1.0, min(16.0, 800.0 / max(w, h)))
    legend_h = LEGEND_ROW * len(paths) + (0.5 if paths else 0.0)
    total_h = h + legend_h
    legend_w = max((3.5 + LEGEND_CHAR_W * len(label) + 0.5 for label, _ in paths), default=0.0)
    total_w = max(float(w), legend_w)
    stroke = max(0.15, min(w, h) / 200.0)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w * scale:g}" height="{total_h * scale:g}" '
        f'viewBox="0 0 {total_w:g} {total_h:g}">',
        f"<title>{escape(grid.name)}</title>",
        '<g id="grid" shape-rendering="crispEdges">',
        *_grid_rects(grid),
        "</g>",
    ]
    if paths:
        if start is None:
            start = tuple(paths[0][1][0]) if paths[0][1] else None
        if goal is None:
            goal = tuple(paths[0][1][-1]) if paths[0][1] else None
        parts.append('<g id="paths" fill="none" stroke-linejoin="round" stroke-linecap="round">')
        for i, (label, path) in enumerate(paths):
            color = PALETTE[i % len(PALETTE)]
            dash = DASHES[i % len(DASHES)]
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            pts = " ".join(_pt(p) for p in path)
            parts.append(
                f'<polyline data-label="{escape(label)}" points="{pts}" stroke="{color}" '
                f'stroke-width="{stroke:g}"{dash_attr}/>'
            )
        parts.append("</g>")
    marker_r = max(0.4, stroke * 2)
    if start is not None:
        parts.append(
            f'<circle class="start" cx="{start[1] + 0.5:g}" cy="{start[0] + 0.5:g}" r="{marker_r:g}" fill="#00a000"/>'
        )
    if goal is not None:
        parts.append(
            f'<circle class="goal" cx="{goal[1] + 0.5:g}" cy="{goal[0] + 0.5:g}" r="{marker_r:g}" fill="#d00000"/>'
        )
    if paths:
        parts.append('<g id="legend" font-size="1" font-family="sans-serif">')
        for i, (label, _) in enumerate(paths):
            y = h + 0.5 + LEGEND_ROW * i + LEGEND_ROW / 2
            color = PALETTE[i % len(PALETTE)]
            parts.append(
                f'<line x1="0.5" y1="{y:g}" x2="3" y2="{y:g}" stroke="{color}" stroke-width="0.3"/>'
                f'<text x="3.5" y="{y + 0.35:g}">{escape(label)}</text>'
            )
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_overlay(
    grid: OccupancyGrid,
    paths: Sequence[tuple[str, Sequence[Cell]]],
    destination: PathLike,
    **kwargs,
) -> Path:
    """Write :func:`render_svg` output to ``destination``."""
    dest = Path(destination)
    try:
        dest.write_text(render_svg(grid, paths, **kwargs))
    except OSError as exc:
        raise OSError(f"cannot write overlay to {dest}: {exc.strerror or exc}") from exc
    return dest
