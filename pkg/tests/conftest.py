import pytest

from phaseless import presets

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def k():
    return presets.K


@pytest.fixture(scope="session")
def sphere():
    return presets.acceptance_scatterer()


@pytest.fixture(scope="session")
def geometry():
    return presets.acceptance_geometry()


@pytest.fixture(scope="session")
def grid():
    return presets.acceptance_grid()


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
