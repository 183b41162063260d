import sys

import pytest

from jdhedge.model import Constant, ModelParams, RebalanceGrid


@pytest.fixture
def neg_params():
    return ModelParams(mu=0.15, sigma=0.25, lam=0.3, jump=Constant(-0.5), s0=100.0)


@pytest.fixture
def pos_params():
    return ModelParams(mu=0.15, sigma=0.25, lam=0.3, jump=Constant(0.5), s0=100.0)


@pytest.fixture
def grid6():
    return RebalanceGrid.uniform(12.0, 6)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for res in module.RESULTS:
            terminalreporter.write_line(res.line())
