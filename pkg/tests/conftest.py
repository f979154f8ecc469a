from pathlib import Path

import pytest

from pmadm.io import read_matrix

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixture_matrix():
    return lambda name: read_matrix(FIXTURES / name)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
