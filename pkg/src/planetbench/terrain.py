"""Elevation rasters to occupancy grids.

Pipeline used by :func:`threshold_to_grid`: block-average the elevations by
``downsample_factor``, compute slope (and optionally roughness) on the
coarse raster, then mark a cell occupied when the slope is at or above the
threshold, the roughness is at or above its cap, or the cell has no data
under ``nodata_policy="occupied"``.

No-data samples are carried as NaN inside :class:`ElevationRaster`.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from .grid import OccupancyGrid
from .gridio import PathLike, sidecar_path

# Inclusive comparison slack for the slope threshold, in degrees. A plane
# built at exactly the threshold angle can land a few ulps below it.
SLOPE_TOLERANCE_DEG = 1e-9


class RasterFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ElevationRaster:
    values: np.ndarray
    ground_res_m: float = 1.0
    name: str = "raster"

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"elevation values must be 2D, got shape {arr.shape}")
        if np.isinf(arr).any():
            raise ValueError("elevation values must be finite or NaN (no-data)")
        if not (self.ground_res_m > 0 and math.isfinite(self.ground_res_m)):
            raise ValueError(f"ground_res_m must be positive, got {self.ground_res_m}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class IngestConfig:
    slope_threshold_deg: float = 10.0
    downsample_factor: int = 1
    roughness_threshold_m: float | None = None
    roughness_window: int = 3
    nodata_policy: Literal["occupied", "free"] = "occupied"

    def __post_init__(self) -> None:
        if not 0 < self.slope_threshold_deg < 90:
            raise ValueError("slope_threshold_deg must lie in (0, 90)")
        if int(self.downsample_factor) != self.downsample_factor or self.downsample_factor < 1:
            raise ValueError("downsample_factor must be a positive integer")
        if self.roughness_threshold_m is not None and not self.roughness_threshold_m > 0:
            raise ValueError("roughness_threshold_m must be positive")
        if self.roughness_window < 3 or self.roughness_window % 2 == 0:
            raise ValueError("roughness_window must be an odd integer >= 3")
        if self.nodata_policy not in ("occupied", "free"):
            raise ValueError("nodata_policy must be 'occupied' or 'free'")


def _axis_gradient(z: np.ndarray, spacing: float, axis: int) -> np.ndarray:
    """Central differences along ``axis``, falling back to one-sided ones at
    borders and next to NaN; NaN where neither neighbour is usable."""
    z = np.moveaxis(z, axis, -1)
    n = z.shape[-1]
    prev = np.full_like(z, np.nan)
    nxt = np.full_like(z, np.nan)
    prev[..., 1:] = z[..., :-1]
    nxt[..., :-1] = z[..., 1:]
    central = (nxt - prev) / (2.0 * spacing)
    forward = (nxt - z) / spacing
    backward = (z - prev) / spacing
    grad = np.where(np.isnan(central), forward, central)
    grad = np.where(np.isnan(grad), backward, grad)
    grad[np.isnan(z)] = np.nan
    if n < 2:
        grad[...] = np.nan
    return np.moveaxis(grad, -1, axis)


def compute_slope(raster: ElevationRaster) -> np.ndarray:
    """Slope angle in degrees, ``atan(|grad z|)``, per sample.

    NaN marks no-data samples and samples with no valid neighbour along
    some axis.
    """
    if raster.height < 2 or raster.width < 2:
        raise ValueError(
            f"slope needs at least a 2x2 raster, got {raster.height}x{raster.width}"
        )
    z = raster.values
    gx = _axis_gradient(z, raster.ground_res_m, axis=1)
    gy = _axis_gradient(z, raster.ground_res_m, axis=0)
    return np.degrees(np.arctan(np.hypot(gx, gy)))


def compute_roughness(raster: ElevationRaster, window: int = 3) -> np.ndarray:
    """Standard deviation of elevation residuals about each window's
    least-squares plane, in meters. Border windows are clipped."""
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be an odd integer >= 3")
    h, w = raster.values.shape
    if window > h or window > w:
        raise ValueError(f"window {window} larger than raster {h}x{w}")
    z = raster.values
    center_ok = ~np.isnan(z)
    # residual sums are accumulated relative to the centre sample, with local
    # offsets as plane coordinates, which keeps the moments well conditioned
    zc = np.where(center_ok, z, 0.0)
    half = window // 2
    offsets = [(dy, dx) for dy in range(-half, half + 1) for dx in range(-half, half + 1)]

    def shifted(dy: int, dx: int) -> tuple[np.ndarray, np.ndarray]:
        out = np.full((h, w), np.nan)
        out[max(0, -dy) : h - max(0, dy), max(0, -dx) : w - max(0, dx)] = z[
            max(0, dy) : h - max(0, -dy), max(0, dx) : w - max(0, -dx)
        ]
        ok = ~np.isnan(out)
        return np.where(ok, out - zc, 0.0), ok.astype(np.float64)

    sums = {k: np.zeros((h, w)) for k in ("n", "x", "y", "xx", "yy", "xy", "d", "xd", "yd")}
    for dy, dx in offsets:
        d, m = shifted(dy, dx)
        sums["n"] += m
        sums["x"] += m * dx
        sums["y"] += m * dy
        sums["xx"] += m * dx * dx
        sums["yy"] += m * dy * dy
        sums["xy"] += m * dx * dy
        sums["d"] += d
        sums["xd"] += d * dx
        sums["yd"] += d * dy
    s = sums
    normal = np.stack(
        [
            np.stack([s["n"], s["x"], s["y"]], axis=-1),
            np.stack([s["x"], s["xx"], s["xy"]], axis=-1),
            np.stack([s["y"], s["xy"], s["yy"]], axis=-1),
        ],
        axis=-2,
    )
    rhs = np.stack([s["d"], s["xd"], s["yd"]], axis=-1)
    coef = np.einsum("...ij,...j->...i", np.linalg.pinv(normal), rhs)
    # second pass: summing squared residuals directly avoids the cancellation
    # of the one-pass formula on near-planar windows
    ss = np.zeros((h, w))
    for dy, dx in offsets:
        d, m = shifted(dy, dx)
        ss += m * (d - coef[..., 0] - coef[..., 1] * dx - coef[..., 2] * dy) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        rough = np.sqrt(np.maximum(ss, 0.0) / s["n"])
    rough[~center_ok] = np.nan
    return rough


def downsample(raster: ElevationRaster, factor: int) -> ElevationRaster:
    """Block mean over ``factor x factor`` blocks.

    Trailing rows/columns that do not fill a whole block are dropped so that
    coarse samples stay evenly spaced. A block is no-data only when every
    sample in it is no-data.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if factor == 1:
        return raster
    h, w = raster.height // factor, raster.width // factor
    if h < 1 or w < 1:
        raise ValueError(
            f"downsample factor {factor} too large for {raster.height}x{raster.width} raster"
        )
    blocks = raster.values[: h * factor, : w * factor].reshape(h, factor, w, factor)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=RuntimeWarning)
        coarse = np.nanmean(blocks, axis=(1, 3))
    return ElevationRaster(coarse, ground_res_m=raster.ground_res_m * factor, name=raster.name)


def threshold_to_grid(raster: ElevationRaster, cfg: IngestConfig) -> OccupancyGrid:
    coarse = downsample(raster, cfg.downsample_factor)
    if coarse.height < 2 or coarse.width < 2:
        raise ValueError(
            f"downsampled raster is {coarse.height}x{coarse.width}; need at least 2x2"
        )
    slope = compute_slope(coarse)
    nodata = np.isnan(slope)
    with np.errstate(invalid="ignore"):
        occupied = slope >= cfg.slope_threshold_deg - SLOPE_TOLERANCE_DEG
        if cfg.roughness_threshold_m is not None:
            rough = compute_roughness(coarse, cfg.roughness_window)
            occupied |= rough >= cfg.roughness_threshold_m
            nodata |= np.isnan(rough)
    occupied &= ~nodata
    if cfg.nodata_policy == "occupied":
        occupied |= nodata
    return OccupancyGrid(occupied.astype(np.uint8), resolution_m=coarse.ground_res_m, name=raster.name)


# -- raster files ----------------------------------------------------------

_ASC_KEYS = {"ncols", "nrows", "xllcorner", "yllcorner", "xllcenter", "yllcenter", "cellsize", "nodata_value"}


def read_esri_ascii(path: PathLike, name: str | None = None) -> ElevationRaster:
    """Parse an ESRI ASCII grid (``.asc``). The first data row is the
    northern-most one, matching the (row, col) top-left convention."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise RasterFormatError(f"{path}: {exc.strerror or exc}") from None
    header: dict[str, float] = {}
    i = 0
    while i < len(lines):
        parts = lines[i].split()
        if not parts:
            i += 1
            continue
        key = parts[0].lower()
        if key not in _ASC_KEYS:
            break
        if len(parts) != 2:
            raise RasterFormatError(f"{path}:{i + 1}: malformed header line {lines[i]!r}")
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise RasterFormatError(f"{path}:{i + 1}: bad header value {parts[1]!r}") from None
        i += 1
    for required in ("ncols", "nrows", "cellsize"):
        if required not in header:
            raise RasterFormatError(f"{path}: missing header field {required}")
    ncols, nrows = int(header["ncols"]), int(header["nrows"])
    try:
        data = np.array(" ".join(lines[i:]).split(), dtype=np.float64)
    except ValueError as exc:
        raise RasterFormatError(f"{path}: bad elevation value ({exc})") from None
    if data.size != ncols * nrows:
        raise RasterFormatError(
            f"{path}: expected {ncols * nrows} values for {nrows}x{ncols}, found {data.size}"
        )
    values = data.reshape(nrows, ncols)
    if "nodata_value" in header:
        values[values == header["nodata_value"]] = np.nan
    return ElevationRaster(values, ground_res_m=header["cellsize"], name=name or path.stem)


def write_esri_ascii(raster: ElevationRaster, path: PathLike, nodata: float = -9999.0) -> Path:
    path = Path(path)
    vals = np.where(np.isnan(raster.values), nodata, raster.values)
    lines = [
        f"ncols {raster.width}",
        f"nrows {raster.height}",
        "xllcorner 0.0",
        "yllcorner 0.0",
        f"cellsize {raster.ground_res_m!r}",
        f"NODATA_value {nodata!r}",
    ]
    lines += [" ".join(repr(float(v)) for v in row) for row in vals]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_raster_csv(path: PathLike) -> ElevationRaster:
    """CSV of floats plus a JSON sidecar with ``ground_res_m`` and optionally
    ``nodata`` and ``name``."""
    path = Path(path)
    meta: dict = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
    try:
        values = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except (OSError, ValueError) as exc:
        raise RasterFormatError(f"{path}: {exc}") from None
    if "nodata" in meta and meta["nodata"] is not None:
        values[values == float(meta["nodata"])] = np.nan
    return ElevationRaster(
        values,
        ground_res_m=float(meta.get("ground_res_m", 1.0)),
        name=str(meta.get("name", path.stem)),
    )


def read_raster(path: PathLike) -> ElevationRaster:
    suffix = Path(path).suffix.lower()
    if suffix == ".asc":
        return read_esri_ascii(path)
    if suffix == ".csv":
        return read_raster_csv(path)
    raise RasterFormatError(
        f"{path}: unsupported raster format {suffix!r}; convert GeoTIFF/IMG products to .asc first"
    )
