import numpy as np
import pytest

from cosmobounds.initial_data import Cell, InitialDataSet


@pytest.fixture
def single_cell():
    """w=1, H=3, |K|=1 in n=3: the model geometry with beta=3 on unit area."""
    return InitialDataSet(n=3, cells=[Cell("c0", 1.0, 3.0, 1.0)], label="single")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_data(rng, n=None, ncells=None, with_k=True, allow_negative=True):
    n = n or int(rng.integers(2, 5))
    ncells = ncells or int(rng.integers(1, 30))
    cells = []
    for i in range(ncells):
        lo = -2.0 if allow_negative else 0.0
        h = float(rng.uniform(lo, 5.0))
        k = abs(h) / n * (1 + float(rng.uniform(0, 2))) if with_k else None
        cells.append(Cell(f"c{i}", float(rng.uniform(0.01, 2.0)), h, k))
    return InitialDataSet(n=n, cells=cells)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
