"""Path-planning benchmark toolkit for planetary terrain.

Elevation rasters become occupancy grids by slope thresholding
(:mod:`.terrain`), each map gets a far-apart start/goal task (:mod:`.tasks`),
six classical planners run under a time budget (:mod:`.planners`), and the
results are scored and aggregated (:mod:`.metrics`, :mod:`.bench`,
:mod:`.report`).
"""

__version__ = "0.1.0"

from .grid import (  # noqa: E402
    Cell,
    OccupancyGrid,
    Path,
    is_feasible,
    is_free,
    line_of_sight,
    neighbors,
    path_length,
    supercover,
)
from .planners import PlanResult, PlannerConfig, plan  # noqa: E402
from .tasks import PlanningTask, largest_free_component, sample_task  # noqa: E402
from .terrain import ElevationRaster, IngestConfig, compute_slope, threshold_to_grid  # noqa: E402

__all__ = [
    "Cell",
    "ElevationRaster",
    "IngestConfig",
    "OccupancyGrid",
    "Path",
    "PlanResult",
    "PlannerConfig",
    "PlanningTask",
    "compute_slope",
    "is_feasible",
    "is_free",
    "largest_free_component",
    "line_of_sight",
    "neighbors",
    "path_length",
    "plan",
    "sample_task",
    "supercover",
    "threshold_to_grid",
]
