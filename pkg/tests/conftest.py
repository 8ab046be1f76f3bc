import numpy as np
import pytest
from hypothesis import settings

from coanalytic.symbols import CircleZeroPolynomial

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def czp(*zeros):
    return CircleZeroPolynomial(tuple(zeros))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
