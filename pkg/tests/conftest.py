import sys
from pathlib import Path

import pytest

from partlogic import corpus
from partlogic.states import enumerate_states

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(corpus.path("pentagon.gd")).parent


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def pentagon():
    return corpus.load("pentagon")


@pytest.fixture(scope="session")
def pentagon_states(pentagon):
    return enumerate_states(pentagon)


@pytest.fixture(scope="session")
def l12():
    return corpus.load("l12")


@pytest.fixture(scope="session")
def l12_states(l12):
    return enumerate_states(l12)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
