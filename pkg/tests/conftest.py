import numpy as np
import pytest

from pipeflow import FlowConfig, grids_from_config, hagen_poiseuille


@pytest.fixture(scope="session")
def config():
    return FlowConfig()


@pytest.fixture(scope="session")
def grid(config):
    return grids_from_config(config)[0]


@pytest.fixture(scope="session")
def modes(config):
    return grids_from_config(config)[1]


@pytest.fixture(scope="session")
def base(grid):
    return hagen_poiseuille(100.0, grid)


@pytest.fixture(scope="session")
def small_config():
    return FlowConfig(n_r=24, n_z=32, half_period=8.0)


@pytest.fixture(scope="session")
def small_grid(small_config):
    return grids_from_config(small_config)[0]


@pytest.fixture(scope="session")
def small_modes(small_config):
    return grids_from_config(small_config)[1]


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
