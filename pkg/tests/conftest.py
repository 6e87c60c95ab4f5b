import sys

import pytest

from multibase.model import BaseSystem


@pytest.fixture(scope="session")
def s23():
    return BaseSystem((2, 3), 2)


@pytest.fixture(scope="session")
def s235():
    return BaseSystem((2, 3, 5), 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
