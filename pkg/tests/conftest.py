import pytest

from pi_forge.pi_models import fixture

from .helpers import ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=["table1", "table2", "table3", "table4"])
def any_fixture(request):
    return fixture(request.param)
