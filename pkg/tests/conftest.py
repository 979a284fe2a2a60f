import pytest

from toricquot.fan import Fan
from toricquot.verify import P112_BLOWUP_FAN, p112_blowup_sections


@pytest.fixture
def blowup_fan():
    return P112_BLOWUP_FAN


@pytest.fixture
def blowup_sections():
    return p112_blowup_sections()


@pytest.fixture
def p2():
    return Fan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def p112():
    return Fan(2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def p1xp1():
    return Fan(2, [(1, 0), (0, 1), (-1, 0), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
