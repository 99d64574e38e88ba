import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spherframe import build_frame, make_rng

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def unit_points(rng, n, d=3):
    X = rng.standard_normal((n, d))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture(scope="session")
def frame5():
    return build_frame(3, 5)


@pytest.fixture(scope="session")
def frame6():
    return build_frame(3, 6)


@pytest.fixture(scope="session")
def frame6_s1():
    return build_frame(3, 6, oversampling=1)
