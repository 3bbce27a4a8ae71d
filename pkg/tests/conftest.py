import pytest

from srploc.geometry import builtin_array, make_grid
from srploc.srp import SteeringTable
from srploc.stft import StftConfig


@pytest.fixture(scope="session")
def stft_cfg():
    return StftConfig()


@pytest.fixture(scope="session")
def omegas(stft_cfg):
    return stft_cfg.omega_axis()


@pytest.fixture(scope="session")
def head():
    return builtin_array()


@pytest.fixture(scope="session")
def full_grid():
    return make_grid()


@pytest.fixture(scope="session")
def head_table(head, full_grid, omegas):
    """Full-sphere steering table for the built-in array (built once)."""
    return SteeringTable(head, full_grid, omegas)
