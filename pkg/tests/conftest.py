import sys

import pytest

from freetwist.pipeline import default_theta, reference_pair


@pytest.fixture(scope="session")
def ref_pair():
    T1, T2, _ = reference_pair(3)
    return T1, T2


@pytest.fixture(scope="session")
def theta3():
    return default_theta(3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
