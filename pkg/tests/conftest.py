import json
from pathlib import Path

import pytest

from planetbench.gridio import write_grid
from planetbench.synthetic import maze_grid, random_grid

_ACCEPTANCE: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


def write_manifest(directory: Path, grids, dataset="synthetic") -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    maps = []
    for g in grids:
        write_grid(g, directory / f"{g.name}.pgm")
        maps.append({"name": g.name, "path": f"{g.name}.pgm"})
    path = directory / "manifest.json"
    path.write_text(json.dumps({"dataset_name": dataset, "maps": maps}, indent=1))
    return path


def synthetic_grids(n, size=24, seed=0):
    out = []
    for i in range(n):
        if i % 3 == 2:
            g = maze_grid(size // 4, size // 4, seed + i, name=f"map{i:02d}")
        else:
            g = random_grid(size, size, 0.1 + 0.05 * (i % 3), seed + i, name=f"map{i:02d}")
        out.append(g)
    return out


@pytest.fixture
def manifest_factory(tmp_path):
    def make(n=5, size=24, seed=0, subdir="maps", dataset="synthetic"):
        return write_manifest(tmp_path / subdir, synthetic_grids(n, size, seed), dataset)

    return make


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call":
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _ACCEPTANCE.append((str(number), title, status))
    elif report.when == "setup" and not report.passed:
        _ACCEPTANCE.append((str(number), title, "SKIP" if report.skipped else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status in sorted(_ACCEPTANCE, key=lambda x: int(x[0])):
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
