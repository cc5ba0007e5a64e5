import numpy as np
import pytest

from fracscrew.potential import quartic


@pytest.fixture
def F():
    return quartic()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
