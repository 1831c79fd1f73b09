import numpy as np
import pytest

from dnlslab.config import ComparisonPolicy
from dnlslab.multipliers import IParams
from dnlslab.spectral import Grid, make_test_data


@pytest.fixture(scope="session")
def grid_small():
    return Grid(L=2 * np.pi, K=64)


@pytest.fixture(scope="session")
def grid_box():
    return Grid(L=64.0, K=256)


@pytest.fixture(scope="session")
def policy():
    return ComparisonPolicy()


@pytest.fixture(scope="session")
def iparams():
    return IParams(N=16.0, s=0.5)


@pytest.fixture()
def gaussian_box(grid_box):
    return make_test_data(grid_box, "gaussian", width=2.0, mass=1.5)


def random_field(grid, seed, k_max=None, mass=None):
    return make_test_data(
        grid, "random_hs", seed=seed, k_max=k_max or grid.K // 4, mass=mass
    )
