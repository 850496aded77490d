import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cobaycpd.hawkes import default_basis  # noqa: E402


@pytest.fixture(scope="session")
def basis():
    return default_basis()


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
