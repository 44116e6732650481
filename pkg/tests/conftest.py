import numpy as np
import pytest

from setwise_cd.objectives import DualConsensusObjective
from setwise_cd.problems import make_quadratic
from setwise_cd.topology import Topology, path_graph, star_graph


@pytest.fixture
def pair_objective():
    """f_1 = (t - 1)^2 / 2, f_2 = (t + 1)^2 / 2 on a single edge."""
    oracles = [make_quadratic([1.0], [[1.0]]), make_quadratic([-1.0], [[1.0]])]
    return DualConsensusObjective(path_graph(2), oracles)


@pytest.fixture
def star_objective():
    """Centre 0 with b = 0, leaves with b = 3, 1, -1."""
    bs = [0.0, 3.0, 1.0, -1.0]
    return DualConsensusObjective(star_graph(3), [make_quadratic([b], [[1.0]]) for b in bs])


@pytest.fixture
def triangle():
    return Topology(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
