"""Synthetic maps and terrain for tests and demos."""

from __future__ import annotations

import math

import numpy as np

from .grid import OccupancyGrid
from .terrain import ElevationRaster


def random_grid(height: int, width: int, density: float, seed: int, name: str | None = None) -> OccupancyGrid:
    """I.i.d. obstacles with probability ``density``."""
    rng = np.random.default_rng(seed)
    cells = (rng.random((height, width)) < density).astype(np.uint8)
    return OccupancyGrid(cells, name=name or f"random-{height}x{width}-{seed}")


def fractal_raster(
    height: int,
    width: int,
    seed: int,
    *,
    beta: float = 3.0,
    relief_m: float = 50.0,
    ground_res_m: float = 1.0,
    name: str | None = None,
) -> ElevationRaster:
    """Spectral-synthesis terrain: power spectrum ~ 1/f^beta, scaled so the
    elevation range is ``relief_m``."""
    rng = np.random.default_rng(seed)
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.rfftfreq(width)[None, :]
    f = np.hypot(fx, fy)
    f[0, 0] = 1.0
    amp = f ** (-beta / 2.0)
    amp[0, 0] = 0.0
    phase = rng.uniform(0, 2 * math.pi, amp.shape)
    spectrum = amp * np.exp(1j * phase) * rng.normal(1.0, 0.1, amp.shape)
    z = np.fft.irfft2(spectrum, s=(height, width))
    z -= z.min()
    span = z.max()
    if span > 0:
        z *= relief_m / span
    return ElevationRaster(z, ground_res_m=ground_res_m, name=name or f"fractal-{seed}")


def planar_raster(
    height: int, width: int, grad_x: float, grad_y: float, ground_res_m: float = 1.0, offset: float = 0.0
) -> ElevationRaster:
    """Plane with per-meter gradients ``grad_x`` (along columns) and
    ``grad_y`` (along rows)."""
    rows, cols = np.mgrid[0:height, 0:width].astype(np.float64)
    z = offset + (cols * grad_x + rows * grad_y) * ground_res_m
    return ElevationRaster(z, ground_res_m=ground_res_m, name="plane")


def maze_grid(cells_high: int, cells_wide: int, seed: int, corridor: int = 1, name: str | None = None) -> OccupancyGrid:
    """Perfect maze (randomised depth-first carving) with corridors and walls
    ``corridor`` cells thick. The grid is ``(2 * n + 1) * corridor`` per side."""
    rng = np.random.default_rng(seed)
    h, w = 2 * cells_high + 1, 2 * cells_wide + 1
    walls = np.ones((h, w), dtype=np.uint8)
    visited = np.zeros((cells_high, cells_wide), dtype=bool)
    stack = [(0, 0)]
    visited[0, 0] = True
    walls[1, 1] = 0
    steps = ((-1, 0), (1, 0), (0, -1), (0, 1))
    while stack:
        r, c = stack[-1]
        options = [
            (r + dr, c + dc)
            for dr, dc in steps
            if 0 <= r + dr < cells_high and 0 <= c + dc < cells_wide and not visited[r + dr, c + dc]
        ]
        if not options:
            stack.pop()
            continue
        nr, nc = options[int(rng.integers(len(options)))]
        visited[nr, nc] = True
        walls[2 * nr + 1, 2 * nc + 1] = 0
        walls[r + nr + 1, c + nc + 1] = 0
        stack.append((nr, nc))
    if corridor > 1:
        walls = np.kron(walls, np.ones((corridor, corridor), dtype=np.uint8))
    return OccupancyGrid(walls, name=name or f"maze-{seed}")
