import numpy as np
import pytest

from cascadim import AffineIfs, Subshift, SymbolicMeasure


@pytest.fixture
def golden_mean():
    return Subshift.golden_mean()


@pytest.fixture
def tiling2():
    return AffineIfs.tiling(2)


@pytest.fixture
def uniform2():
    return SymbolicMeasure.uniform(2)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240817)
