from pathlib import Path

import numpy as np
import pytest

from sma_collision.mesh import build_structured_mesh
from sma_collision.params import MaterialParams

REPO = Path(__file__).resolve().parents[1]
FIG1 = REPO / "configs" / "fig1.toml"


@pytest.fixture
def niti():
    return MaterialParams.niti()


@pytest.fixture
def unit_mesh():
    return build_structured_mesh(4, 4, 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fig1_path():
    return FIG1


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
