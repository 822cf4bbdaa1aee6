import pytest
from hypothesis import settings

from hybridplan.scenario_io import bundled_path, load_scenario

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def bundled():
    return load_scenario(bundled_path("microgrid.yaml"))


@pytest.fixture(scope="session")
def mini():
    return load_scenario(bundled_path("mini.yaml"))


def pytest_configure(config):
    config.acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, config):
    lines = config.acceptance_lines
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
