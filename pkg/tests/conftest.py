import sys

import pytest

from mpfkit import use_backend
from mpfkit._backend import HAVE_NUMBA

AVAILABLE = ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


@pytest.fixture(params=AVAILABLE)
def backend(request):
    with use_backend(request.param):
        yield request.param


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = module.RESULTS.lines() if module else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
