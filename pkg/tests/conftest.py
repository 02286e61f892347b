import numpy as np
import pytest

from hyperpw import frames, transform as tr


@pytest.fixture(scope="session")
def ref_grids():
    return tr.reference_grids()


@pytest.fixture(scope="session")
def small_grids():
    s = tr.build_spatial_grid(4.0, 96, 128)
    f = tr.build_spectral_grid(12.0, 64, 128)
    return s, f


@pytest.fixture(scope="session")
def frame4():
    return frames.build_frame(4.0, frames.DEFAULT_C)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
