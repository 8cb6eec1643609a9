import numpy as np
import pytest

from helpers import half_pair, two_angle_pair


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def half():
    return half_pair()


@pytest.fixture
def two_angle():
    return two_angle_pair()


from hypothesis import settings  # noqa: E402

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")
