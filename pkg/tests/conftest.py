import numpy as np
import pytest

from adamffe.cli import resolve_config
from adamffe.pipeline import run_experiment

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def desk_config():
    return resolve_config("builtin:desk_pam8")


@pytest.fixture(scope="session")
def desk_report(desk_config):
    return run_experiment(desk_config)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
