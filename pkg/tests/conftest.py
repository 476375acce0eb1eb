import sys

import mpmath as mp
import pytest

from heqed import PrecisionContext, helium_constants


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(50)


@pytest.fixture(scope="session")
def dc():
    return helium_constants(50)


@pytest.fixture(scope="session")
def lam_lit(ctx):
    with ctx.activate():
        return mp.mpf("8.7819702650081e-16")


def rel(a, b):
    return abs((a - b) / b)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
