import numpy as np
import pytest

from nehari_takagi.realization import Realization

ACCEPTANCE_LINES = []


@pytest.fixture
def scalar():
    """f0(z) = 1/(z - 0.5): P = Q = 4/3, kappa1 = 1."""
    return Realization([[0.5]], [[1.0]], [[1.0]])


@pytest.fixture
def scalar_half():
    """f0(z) = 0.5/(z - 0.5): P = 4/3, Q = 1/3, kappa1 = 0."""
    return Realization([[0.5]], [[1.0]], [[0.5]])


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
