import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "vlift",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("vlift")

from vlift.quantale import make_quantale  # noqa: E402


@pytest.fixture
def two():
    return make_quantale("two")


@pytest.fixture
def godel2():
    return make_quantale({"kind": "godel_chain", "n": 2})


@pytest.fixture
def godel3():
    return make_quantale({"kind": "godel_chain", "n": 3})


@pytest.fixture
def luk():
    return make_quantale("unit_lukasiewicz")


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:  # pragma: no cover
        return
    lines = test_acceptance.LINES
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
