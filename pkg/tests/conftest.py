import numpy as np
import pytest

from itersig.processes import IIDModel, MarkovModel, RotationModel

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def bernoulli():
    return IIDModel([[0.0], [1.0]], [0.5, 0.5])


@pytest.fixture
def plus_minus():
    return IIDModel([[-1.0], [1.0]], [0.5, 0.5])


@pytest.fixture
def chain2():
    return MarkovModel([[0.9, 0.1], [0.5, 0.5]], [[0.0], [1.0]])


@pytest.fixture
def chain3():
    P = [[0.5, 0.3, 0.2], [0.2, 0.6, 0.2], [0.3, 0.3, 0.4]]
    f = [[1.0, 0.5], [2.0, -0.5], [0.5, 1.0]]
    return MarkovModel(P, f)


@pytest.fixture
def rotation2():
    return RotationModel(((1.0, [1.0], []), (0.5, [0.3], [1.0])), x0=0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
