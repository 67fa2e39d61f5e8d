import numpy as np
import pytest

from zrp.channels import from_scattering_length_matrix
from zrp.config import HARTREE_EV
from zrp.molecule import MorseState

A_PARAM = 1 / 0.35
C_PARAM = 0.63
THRESHOLD_EV = 11.87


def h2_model(b=1.40, c=C_PARAM, parity=1, threshold_eV=THRESHOLD_EV):
    return from_scattering_length_matrix([[A_PARAM, c], [c, b]], [1, parity], [0.0, threshold_eV / HARTREE_EV])


def ev(x):
    return x / HARTREE_EV


@pytest.fixture(scope="session")
def model():
    return h2_model()


@pytest.fixture(scope="session")
def ground():
    return MorseState.ground(0.02, 5.74e-4, 0.7005)


@pytest.fixture(scope="session")
def excited():
    """Synthetic upper state: shallower, displaced well with v'=0 at 6 eV."""
    return MorseState.with_origin(0.015, 4.5e-4, 0.78, ev(6.0))


@pytest.fixture(scope="session")
def synthetic_model():
    """Two channels with a low threshold so vibrational channels open easily."""
    return from_scattering_length_matrix([[A_PARAM, 0.5], [0.5, 1.2]], [1, 1], [0.0, ev(6.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
