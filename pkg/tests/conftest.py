import math

import pytest

from qpo.construct import build_qpo
from qpo.growth import GridSpec, build_counterexample


@pytest.fixture(scope="session")
def counterexample_run():
    A = build_counterexample(1.0, 2.0, 0.01, T_max=1e8)
    grid = GridSpec.log_uniform(math.e, 1e8, 200)
    sigma, A_star, led = build_qpo(A, 2.0, 1.0, 0.5, grid=grid, T_max=1e8)
    return A, grid, sigma, A_star, led


ACCEPTANCE_LINES = {}


def record_criterion(number, passed, text):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {text}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
