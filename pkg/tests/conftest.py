import sys

import pytest

from latticetodd.polytope import from_halfspaces, from_vertices

SHAPES = {
    "square": [(0, 0), (1, 0), (0, 1), (1, 1)],
    "box": [(0, 0), (3, 0), (0, 2), (3, 2)],
    "big_square": [(0, 0), (2, 0), (0, 2), (2, 2)],
    "simplex2": [(0, 0), (1, 0), (0, 1)],
    "triangle": [(0, 0), (1, 0), (0, 2)],
    "hexagon": [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)],
    "simplex3": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
    "cube": [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)],
    "nondelzant3d": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 2)],
}


@pytest.fixture(scope="session")
def shapes():
    return {k: from_vertices(v) for k, v in SHAPES.items()}


@pytest.fixture(scope="session")
def segment():
    return from_halfspaces([((1,), 0), ((-1,), 1)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
