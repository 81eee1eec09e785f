import numpy as np
import pytest

from lowred.polyspace import Polynomial


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_poly(rng, d, unit=False):
    c = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    if unit:
        c /= np.linalg.norm(c)
    return Polynomial(c)
