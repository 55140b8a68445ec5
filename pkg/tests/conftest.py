import numpy as np
import pytest

from qcomb.config import default_config, make_config


@pytest.fixture(scope="session")
def default_cfg():
    return default_config()


@pytest.fixture(scope="session")
def default_jsa(default_cfg):
    """The figure-reproduction JSA on the full 1024^2 grid (shared)."""
    return default_cfg.jsa()


@pytest.fixture(scope="session")
def small_cfg():
    """Same physics on a 256^2 grid for cheap unit tests."""
    return make_config({"grid": {"n": 256}, "spectrometer": {"n_pairs": 50_000}})


@pytest.fixture(scope="session")
def small_jsa(small_cfg):
    return small_cfg.jsa()


@pytest.fixture()
def rng():
    return np.random.default_rng(20160809)
