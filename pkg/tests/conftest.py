import numpy as np
import pytest

from gasstar import ModelSpec, Polytrope, build_grid, solve
from gasstar.model import LinearEntropy, PowerLawRotation


@pytest.fixture(scope="session")
def lane_emden_spec():
    return ModelSpec(Polytrope(1.0, 2.0), M=1.0, b=1.0)


@pytest.fixture(scope="session")
def lane_emden_solve(lane_emden_spec):
    grid = build_grid(1.0, 3.0, 400, 16)
    return solve(lane_emden_spec, grid)


@pytest.fixture(scope="session")
def rotating_spec():
    return ModelSpec(
        Polytrope(1.0, 2.0),
        LinearEntropy(1.0 / 3.0),
        PowerLawRotation(0.05, 4.0 / 3.0),
        M=1.0,
        b=1.0,
    )


@pytest.fixture(scope="session")
def rotating_solves(rotating_spec):
    return {N: solve(rotating_spec, build_grid(1.0, 3.0, N, 16)) for N in (200, 400, 800)}


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


_CRITERIA = {}


@pytest.fixture
def record_criterion():
    """Print and keep one PASS/FAIL line per acceptance criterion."""

    def record(number, title, passed, detail):
        line = f"CRITERION {number} {'PASS' if passed else 'FAIL'}: {title} | {detail}"
        _CRITERIA[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
