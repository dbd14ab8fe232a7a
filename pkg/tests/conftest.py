import numpy as np
import pytest

from airy_evolve.grid import Grid


@pytest.fixture
def gaussian_grid():
    grid = Grid.linspace(-30.0, 30.0, 2048)
    return grid, grid.sample(lambda x: np.exp(-x * x))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
