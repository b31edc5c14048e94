import pytest

from pnglab.painleve2 import default_table

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def wide_table():
    # right end pushed out so that H(.; w, -w) with |w| >= 1 has its mass on the grid
    return default_table(-10.0, 20.0, 0.005)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
