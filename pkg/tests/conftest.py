import numpy as np
import pytest

from fracsol import DispersionSymbol, ModelSpec, make_grid, petviashvili
from fracsol.ground_state import FKDV


@pytest.fixture(scope="session")
def grid_desk():
    return make_grid(4096, 200.0)


@pytest.fixture(scope="session")
def bo_wave(grid_desk):
    """Benjamin-Ono ground state: alpha = 1, c = 1."""
    model = ModelSpec(family=FKDV, symbol=DispersionSymbol.power(1.0))
    return petviashvili(model, 1.0, grid_desk)


@pytest.fixture(scope="session")
def q075_wave(grid_desk):
    """Reference solve at alpha = 0.75, c = 1."""
    model = ModelSpec(family=FKDV, symbol=DispersionSymbol.power(0.75))
    return petviashvili(model, 1.0, grid_desk)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
