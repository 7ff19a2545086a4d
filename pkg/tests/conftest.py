import numpy as np
import pytest

from heavenly.grid import Grid


@pytest.fixture
def line64():
    return Grid.line(64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
