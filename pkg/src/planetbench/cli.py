"""Command-line entry point: ``planetbench <subcommand> ...``.

Exit status: 0 on success, 1 on usage errors (with help text), 2 on runtime
failures. Every subcommand accepts ``--config FILE`` (TOML or JSON); a
``[<subcommand>]`` table, or top-level keys, supply option values using
their underscored names. Explicit flags win over the file, which wins over
built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__

log = logging.getLogger("planetbench")

OUT_DIR_ENV = "PLANETBENCH_OUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    def __init__(self, message: str, parser: argparse.ArgumentParser | None = None):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401 - argparse hook
        raise UsageError(message, self)


# name -> (built-in default, required)
_SPECS: dict[str, dict[str, tuple[object, bool]]] = {
    "ingest": {
        "input": (None, True),
        "slope_deg": (10.0, False),
        "downsample": (1, False),
        "roughness_m": (None, False),
        "roughness_window": (3, False),
        "nodata_policy": ("occupied", False),
        "name": (None, False),
        "out": (None, True),
    },
    "sample-tasks": {
        "maps": (None, True),
        "seed": (0, False),
        "budget_s": (60.0, False),
        "out": (None, True),
    },
    "plan": {
        "map": (None, True),
        "planner": ("dijkstra", False),
        "start": (None, True),
        "goal": (None, True),
        "budget_s": (60.0, False),
        "seed": (0, False),
        "epsilon": (5.0, False),
        "goal_bias": (0.05, False),
        "max_iters": (100_000, False),
        "goal_tolerance": (None, False),
        "no_memory": (False, False),
        "out": (None, True),
        "overlay": (None, False),
    },
    "bench": {
        "manifest": (None, True),
        "tasks": (None, False),
        "planners": ("dijkstra,astar,thetastar,rrt,rrt_connect,dynamic_rrt", False),
        "budget_s": (60.0, False),
        "seed": (0, False),
        "epsilon": (5.0, False),
        "goal_bias": (0.05, False),
        "max_iters": (100_000, False),
        "workers": (1, False),
        "watchdog_slack_s": (5.0, False),
        "no_overlays": (False, False),
        "no_memory": (False, False),
        "out_dir": (None, True),
    },
    "report": {
        "report": (None, True),
        "format": ("markdown", False),
        "out": (None, True),
    },
}


def _flag(dest: str) -> str:
    return "--" + dest.replace("_", "-")


def _cell_arg(text: str) -> tuple[int, int]:
    try:
        r, c = (int(v) for v in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROW,COL, got {text!r}") from None
    return r, c


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="TOML or JSON file with option values")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")

    parser = _Parser(
        prog="planetbench",
        description="Planetary terrain path-planning benchmark: terrain ingestion, task sampling, planning and reporting.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("ingest", parents=[common], help="convert an elevation raster to an occupancy grid")
    p.add_argument("--input", metavar="RASTER", help=".asc or .csv elevation raster")
    p.add_argument("--slope-deg", type=float, metavar="DEG", help="slope threshold, inclusive (default 10)")
    p.add_argument("--downsample", type=int, metavar="N", help="block-mean factor (default 1)")
    p.add_argument("--roughness-m", type=float, metavar="M", help="roughness cap in meters (off by default)")
    p.add_argument("--roughness-window", type=int, metavar="N", help="odd roughness window (default 3)")
    p.add_argument("--nodata-policy", choices=("occupied", "free"))
    p.add_argument("--name", help="grid name (default: raster name)")
    p.add_argument("--out", metavar="GRID", help="output .pgm or .csv; a .json sidecar is written next to it")

    p = sub.add_parser("sample-tasks", parents=[common], help="sample one start/goal task per map")
    p.add_argument("--maps", metavar="DIR", help="directory of grids, or a manifest file")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget-s", type=float)
    p.add_argument("--out", metavar="CSV")

    p = sub.add_parser("plan", parents=[common], help="run one planner on one map")
    p.add_argument("--map", metavar="GRID")
    p.add_argument("--planner")
    p.add_argument("--start", type=_cell_arg, metavar="R,C")
    p.add_argument("--goal", type=_cell_arg, metavar="R,C")
    p.add_argument("--budget-s", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--goal-bias", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--goal-tolerance", type=float)
    p.add_argument("--no-memory", action="store_const", const=True, help="skip allocation tracking")
    p.add_argument("--out", metavar="JSON")
    p.add_argument("--overlay", metavar="SVG")

    p = sub.add_parser("bench", parents=[common], help="run planners over a dataset")
    p.add_argument("--manifest", metavar="FILE", help="manifest JSON, or a directory of grids")
    p.add_argument("--tasks", metavar="CSV", help="task CSV (maps without a task are sampled)")
    p.add_argument("--planners", metavar="LIST", help="comma separated planner kinds")
    p.add_argument("--budget-s", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--goal-bias", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--watchdog-slack-s", type=float)
    p.add_argument("--no-overlays", action="store_const", const=True)
    p.add_argument("--no-memory", action="store_const", const=True)
    p.add_argument("--out-dir", metavar="DIR", help=f"output directory (default ${OUT_DIR_ENV})")

    p = sub.add_parser("report", parents=[common], help="re-emit a saved report.json")
    p.add_argument("--report", metavar="JSON")
    p.add_argument("--format", choices=("csv", "json", "markdown"))
    p.add_argument("--out", metavar="FILE")
    parser.set_defaults(_subparsers=sub.choices)
    return parser


def _load_config(path: str, command: str) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        if p.suffix.lower() == ".toml":
            if sys.version_info >= (3, 11):
                import tomllib
            else:
                import tomli as tomllib
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
    except Exception as exc:
        raise UsageError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a table/object")
    section = data.get(command, {})
    top = {k: v for k, v in data.items() if not isinstance(v, dict)}
    merged = {**top, **section}
    return {k.replace("-", "_"): v for k, v in merged.items()}


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge flags, config file and defaults; reject missing or unknown keys."""
    spec = _SPECS[args.command]
    config = _load_config(args.config, args.command) if args.config else {}
    unknown = sorted(set(config) - set(spec) - {"verbose"})
    if unknown:
        raise UsageError(f"unknown option(s) in config for {args.command}: {', '.join(unknown)}")
    opts = {}
    for dest, (default, required) in spec.items():
        value = getattr(args, dest, None)
        if value is None:
            value = config.get(dest)
        if value is None and dest == "out_dir":
            value = os.environ.get(OUT_DIR_ENV)
        if value is None:
            value = default
        if value is None and required:
            raise UsageError(f"{args.command}: missing required option {_flag(dest)}")
        opts[dest] = value
    for cell in ("start", "goal"):
        if isinstance(opts.get(cell), (str, list)):
            v = opts[cell]
            opts[cell] = _cell_arg(v if isinstance(v, str) else ",".join(map(str, v)))
    return opts


def _planner_config(kind: str, o: dict):
    from .planners import PlannerConfig

    return PlannerConfig(
        planner_kind=kind,
        epsilon=float(o["epsilon"]),
        max_iterations=int(o["max_iters"]),
        goal_tolerance=None if o.get("goal_tolerance") is None else float(o["goal_tolerance"]),
        goal_bias=float(o["goal_bias"]),
        seed=int(o["seed"]),
        track_memory=not o.get("no_memory"),
    )


def cmd_ingest(o: dict) -> None:
    from .gridio import write_grid
    from .terrain import IngestConfig, read_raster, threshold_to_grid

    raster = read_raster(o["input"])
    cfg = IngestConfig(
        slope_threshold_deg=float(o["slope_deg"]),
        downsample_factor=int(o["downsample"]),
        roughness_threshold_m=None if o["roughness_m"] is None else float(o["roughness_m"]),
        roughness_window=int(o["roughness_window"]),
        nodata_policy=o["nodata_policy"],
    )
    grid = threshold_to_grid(raster, cfg)
    if o["name"]:
        from .grid import OccupancyGrid

        grid = OccupancyGrid(grid.cells, resolution_m=grid.resolution_m, name=o["name"])
    write_grid(grid, o["out"])
    log.info("wrote %s (%dx%d, %d occupied)", o["out"], grid.height, grid.width, int(grid.cells.sum()))


def cmd_sample_tasks(o: dict) -> None:
    from .bench import load_manifest
    from .gridio import read_grid
    from .tasks import PlanningTask, sample_task, save_tasks

    manifest = load_manifest(o["maps"])
    tasks = []
    for entry in manifest.entries:
        t = sample_task(read_grid(entry.path), seed=int(o["seed"]), budget_s=float(o["budget_s"]))
        tasks.append(PlanningTask(entry.name, t.start, t.goal, t.budget_s, t.seed))
    save_tasks(tasks, o["out"])
    log.info("wrote %d tasks to %s", len(tasks), o["out"])


def cmd_plan(o: dict) -> None:
    from .gridio import read_grid
    from .overlay import render_overlay
    from .planners import plan
    from .tasks import PlanningTask

    grid = read_grid(o["map"])
    cfg = _planner_config(o["planner"], o)
    task = PlanningTask(grid.name, o["start"], o["goal"], float(o["budget_s"]), int(o["seed"]))
    for label, cell in (("start", task.start), ("goal", task.goal)):
        if not grid.in_bounds(cell):
            raise ValueError(f"{label} {cell} outside the {grid.height}x{grid.width} grid")
    result = plan(grid, task, cfg)
    payload = {**result.to_dict(), "config": cfg.to_dict(), "task": task.to_dict()}
    Path(o["out"]).write_text(json.dumps(payload, indent=1) + "\n")
    if o["overlay"]:
        render_overlay(grid, [(cfg.planner_kind, result.path)], o["overlay"], start=task.start, goal=task.goal)
    log.info("%s: %s, %d waypoints", cfg.planner_kind, result.status, len(result.path))


def cmd_bench(o: dict) -> None:
    from .bench import load_manifest, run_benchmark
    from .report import write_outputs
    from .tasks import load_tasks

    kinds = [k.strip() for k in str(o["planners"]).split(",") if k.strip()]
    configs = [_planner_config(k, o) for k in kinds]
    manifest = load_manifest(o["manifest"])
    tasks = load_tasks(o["tasks"]) if o["tasks"] else None
    out_dir = Path(o["out_dir"])
    report = run_benchmark(
        manifest,
        configs,
        tasks,
        budget_s=float(o["budget_s"]),
        seed=int(o["seed"]),
        workers=int(o["workers"]),
        watchdog_slack_s=float(o["watchdog_slack_s"]),
        overlay_dir=None if o["no_overlays"] else out_dir / "overlays",
    )
    write_outputs(report, out_dir)
    for row in report.aggregates:
        log.info("%s %s: SR %.1f%%", row.dataset_name, row.planner_kind, row.success_rate_pct)


def cmd_report(o: dict) -> None:
    from .report import emit_report, load_report

    emit_report(load_report(o["report"]), o["format"], o["out"])


COMMANDS = {
    "ingest": cmd_ingest,
    "sample-tasks": cmd_sample_tasks,
    "plan": cmd_plan,
    "bench": cmd_bench,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required", parser)
        opts = resolve_options(args)
        # flag-level validation happens before any work starts
        if args.command in ("plan", "bench"):
            from .planners import PLANNER_KINDS

            kinds = [opts["planner"]] if args.command == "plan" else str(opts["planners"]).split(",")
            bad = [k for k in kinds if k.strip() not in PLANNER_KINDS]
            if bad:
                raise UsageError(f"unknown planner(s) {', '.join(bad)}; choose from {', '.join(PLANNER_KINDS)}")
    except UsageError as exc:
        p = exc.parser
        if p is None and args is not None:
            p = args._subparsers.get(args.command)
        (p or parser).print_help(sys.stderr)
        print(f"\nerror: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        COMMANDS[args.command](opts)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


dispatch = main

if __name__ == "__main__":
    sys.exit(main())
