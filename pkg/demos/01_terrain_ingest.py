"""Turn a synthetic elevation model into occupancy grids.

A fractal height field stands in for a real DTM. Steeper slope thresholds
free more of the map; the grid at each threshold is written as PGM with a
JSON sidecar in the output directory.

    python3 demos/01_terrain_ingest.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from planetbench.gridio import write_grid
from planetbench.synthetic import fractal_raster
from planetbench.terrain import IngestConfig, compute_slope, threshold_to_grid, write_esri_ascii

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/ingest")
out.mkdir(parents=True, exist_ok=True)

raster = fractal_raster(128, 128, seed=7, relief_m=6.0, ground_res_m=1.0, name="crater_field")
write_esri_ascii(raster, out / "crater_field.asc")

slope = compute_slope(raster)
print(f"slope: median {np.nanmedian(slope):.1f} deg, max {np.nanmax(slope):.1f} deg")

for threshold in (10, 15, 20):
    grid = threshold_to_grid(raster, IngestConfig(slope_threshold_deg=threshold))
    path = write_grid(grid, out / f"crater_field_{threshold}deg.pgm")
    print(f"{threshold:>2} deg: {grid.cells.mean():6.1%} occupied -> {path}")
