import sys

import pytest
from hypothesis import settings

from secext.amap import ATable
from secext.resolution import resolve

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def res35():
    # filtration 14 is exactly what the bundled delta table covers
    return resolve(14, 35)


@pytest.fixture(scope="session")
def res_small():
    return resolve(6, 12)


@pytest.fixture(scope="session")
def zero_A():
    return ATable.zero()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
