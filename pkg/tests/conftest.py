import numpy as np
import pytest
from hypothesis import settings

from badapprox.symbols import LaurentMatrix

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

SQ = 1 / np.sqrt(2)


def worked_phi():
    """[[conj(z)/sqrt2, conj(z)^2/sqrt2], [0, 0]]."""
    return LaurentMatrix(2, 2, {-1: [[SQ, 0], [0, 0]], -2: [[0, SQ], [0, 0]]})


def worked_psi():
    return LaurentMatrix(2, 2, {1: [[SQ, 0], [0, 0]], 2: [[0, 0], [SQ, 0]]})


@pytest.fixture
def phi_fixture():
    return worked_phi()


@pytest.fixture
def psi_fixture():
    return worked_psi()


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
