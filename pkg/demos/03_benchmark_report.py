"""Benchmark all planners over a small dataset and print the summary table.

Maps mix random fields, mazes and thresholded terrain. Results go to
records.jsonl, aggregates.csv, report.json and report.md; the Markdown table
bolds the shortest mean paths and underlines the fastest planners among
those that always succeed.

    python3 demos/03_benchmark_report.py [out_dir]
"""

import json
import sys
from pathlib import Path

from planetbench.bench import load_manifest, run_benchmark
from planetbench.grid import OccupancyGrid
from planetbench.gridio import write_grid
from planetbench.planners import PLANNER_KINDS, PlannerConfig
from planetbench.report import markdown_table, write_outputs
from planetbench.synthetic import fractal_raster, maze_grid, random_grid
from planetbench.terrain import IngestConfig, threshold_to_grid

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/bench")
maps_dir = out / "maps"
maps_dir.mkdir(parents=True, exist_ok=True)

grids = [random_grid(40, 40, 0.1 + 0.05 * i, seed=i, name=f"field{i}") for i in range(3)]
grids += [maze_grid(10, 10, seed=i, corridor=2, name=f"maze{i}") for i in range(2)]
for i in range(3):
    dem = threshold_to_grid(fractal_raster(48, 48, seed=i, relief_m=12.0), IngestConfig(slope_threshold_deg=15))
    grids.append(OccupancyGrid(dem.cells, name=f"dem{i}"))

entries = []
for g in grids:
    write_grid(g, maps_dir / f"{g.name}.pgm")
    entries.append({"name": g.name, "path": f"{g.name}.pgm"})
(maps_dir / "manifest.json").write_text(json.dumps({"dataset_name": "demo", "maps": entries}, indent=1))

manifest = load_manifest(maps_dir / "manifest.json")
configs = [PlannerConfig(kind, seed=0, max_iterations=20000) for kind in PLANNER_KINDS]
report = run_benchmark(manifest, configs, seed=0, budget_s=10.0)
written = write_outputs(report, out)

print(markdown_table(report.aggregates))
for name, path in written.items():
    print(f"{name}: {path}")
