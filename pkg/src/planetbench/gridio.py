"""Reading and writing occupancy grids.

Two on-disk forms are supported, each with an optional JSON sidecar
(``<stem>.json``) holding ``name`` and ``resolution_m``:

- PGM, P2 (ASCII) or P5 (binary): 0 is occupied, 255 is free; on read any
  value below 128 is taken as occupied;
- CSV of 0/1 integers, one line per grid row.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Union

import numpy as np

from .grid import OccupancyGrid

PathLike = Union[str, "os.PathLike[str]"]

GRID_SUFFIXES = (".pgm", ".csv")


class GridFormatError(ValueError):
    """Raised when a grid file cannot be parsed."""


def sidecar_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".json")


def _format_for(path: Path, fmt: str | None) -> str:
    if fmt is None:
        fmt = path.suffix.lower().lstrip(".")
    fmt = fmt.lower()
    if fmt not in ("pgm", "csv"):
        raise GridFormatError(f"{path}: unsupported grid format {fmt!r} (expected pgm or csv)")
    return fmt


def _pgm_tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace separated header tokens, skipping # comments."""
    tokens: list[bytes] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise GridFormatError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode P2/P5 bytes into an ``(H, W)`` array of gray levels."""
    tokens, pos = _pgm_tokens(data, 4, 0)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise GridFormatError(f"not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise GridFormatError(f"bad PGM header: {exc}") from None
    if width < 1 or height < 1 or not (0 < maxval < 65536):
        raise GridFormatError(f"bad PGM header values {width}x{height} max {maxval}")
    if magic == b"P2":
        values = data[pos:].split()
        if len(values) < width * height:
            raise GridFormatError(
                f"PGM body has {len(values)} values, expected {width * height}"
            )
        arr = np.array([int(v) for v in values[: width * height]], dtype=np.int64)
    else:
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        need = width * height * dtype.itemsize
        body = data[pos : pos + need]
        if len(body) < need:
            raise GridFormatError(f"PGM body has {len(body)} bytes, expected {need}")
        arr = np.frombuffer(body, dtype=dtype).astype(np.int64)
    levels = arr.reshape(height, width)
    if maxval != 255:
        levels = levels * 255 // maxval
    return levels


def encode_pgm(grid: OccupancyGrid, binary: bool = False) -> bytes:
    levels = np.where(grid.cells == 1, 0, 255).astype(np.uint8)
    header = f"{'P5' if binary else 'P2'}\n{grid.width} {grid.height}\n255\n".encode()
    if binary:
        return header + levels.tobytes()
    body = "\n".join(" ".join(str(v) for v in row) for row in levels.tolist())
    return header + body.encode() + b"\n"


def read_sidecar(path: PathLike) -> dict:
    side = sidecar_path(path)
    if not side.exists():
        return {}
    try:
        meta = json.loads(side.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GridFormatError(f"{side}: cannot read sidecar: {exc}") from None
    if not isinstance(meta, dict):
        raise GridFormatError(f"{side}: sidecar must be a JSON object")
    return meta


def read_grid(path: PathLike, fmt: str | None = None) -> OccupancyGrid:
    path = Path(path)
    kind = _format_for(path, fmt)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise GridFormatError(f"{path}: {exc.strerror or exc}") from None
    try:
        if kind == "pgm":
            cells = (parse_pgm(data) < 128).astype(np.uint8)
        else:
            rows = [r for r in csv.reader(data.decode().splitlines()) if r]
            if not rows:
                raise GridFormatError("empty CSV grid")
            if len({len(r) for r in rows}) != 1:
                raise GridFormatError("ragged CSV grid")
            cells = np.array([[int(v) for v in r] for r in rows], dtype=np.int64)
            if not np.isin(cells, (0, 1)).all():
                raise GridFormatError("CSV grid values must be 0 or 1")
    except (GridFormatError, ValueError, UnicodeDecodeError) as exc:
        raise GridFormatError(f"{path}: {exc}") from None
    meta = read_sidecar(path)
    return OccupancyGrid(
        cells,
        resolution_m=float(meta.get("resolution_m", 1.0)),
        name=str(meta.get("name", path.stem)),
    )


def write_grid(
    grid: OccupancyGrid,
    destination: PathLike,
    fmt: str | None = None,
    *,
    binary: bool = False,
    sidecar: bool = True,
) -> Path:
    """Write ``grid`` as PGM or CSV (inferred from the suffix unless given).

    ``binary=True`` selects P5 for PGM output. Returns the written path.
    """
    path = Path(destination)
    kind = _format_for(path, fmt)
    if kind == "pgm":
        payload = encode_pgm(grid, binary=binary)
    else:
        payload = (
            "\n".join(",".join(str(v) for v in row) for row in grid.cells.tolist()) + "\n"
        ).encode()
    try:
        path.write_bytes(payload)
        if sidecar:
            sidecar_path(path).write_text(
                json.dumps({"name": grid.name, "resolution_m": grid.resolution_m}, indent=2)
                + "\n"
            )
    except OSError as exc:
        raise OSError(f"cannot write grid to {path}: {exc.strerror or exc}") from exc
    return path


def list_grid_files(directory: PathLike) -> list[Path]:
    """Grid files in ``directory`` sorted by name."""
    d = Path(directory)
    return sorted(p for p in d.iterdir() if p.suffix.lower() in GRID_SUFFIXES and p.is_file())
