import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import meshes  # noqa: E402

CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, text): acceptance criterion exercised by the test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, text = marker.args
    prev = CRITERIA.get(number, (True, text))
    CRITERIA[number] = (prev[0] and report.passed, text)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        ok, text = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def hexagon():
    return meshes.hexagon_mesh()


@pytest.fixture
def rhombus():
    return meshes.rhombus_mesh()


@pytest.fixture
def unit_right():
    return meshes.single_triangle((0, 0), (1, 0), (0, 1))
