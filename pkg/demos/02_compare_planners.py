"""Run all six planners on one task and draw their paths.

The map is a random grid with a task picked by the far-apart sampler.
Graph planners are deterministic; the sampling planners depend on the seed.

    python3 demos/02_compare_planners.py [out_dir]
"""

import sys
from pathlib import Path

from planetbench.grid import is_feasible, path_length
from planetbench.overlay import render_overlay
from planetbench.planners import PLANNER_KINDS, PlannerConfig, plan
from planetbench.synthetic import random_grid
from planetbench.tasks import sample_task

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/compare")
out.mkdir(parents=True, exist_ok=True)

grid = random_grid(60, 80, 0.2, seed=3, name="boulders")
task = sample_task(grid, seed=0, budget_s=10.0)
print(f"task {task.start} -> {task.goal}")

paths = []
for kind in PLANNER_KINDS:
    result = plan(grid, task, PlannerConfig(kind, seed=1))
    ok = result.status == "success" and is_feasible(grid, result.path, task.start, task.goal)
    print(
        f"{kind:<12} {result.status:<9} length {path_length(result.path):7.2f} "
        f"time {result.planning_time_s * 1000:7.1f} ms  feasible={ok}"
    )
    paths.append((kind, result.path))

print("overlay:", render_overlay(grid, paths, out / "boulders.svg"))
