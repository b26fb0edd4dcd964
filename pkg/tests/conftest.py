from __future__ import annotations

import numpy as np
import pytest

from support import CODES, cached_code


@pytest.fixture(scope="session")
def rep3():
    return cached_code("rep3")


@pytest.fixture(scope="session")
def five():
    return cached_code("five-qubit")


@pytest.fixture(params=sorted(CODES))
def code(request):
    return cached_code(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from support import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
