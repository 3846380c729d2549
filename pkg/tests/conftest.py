import numpy as np
import pytest

from activegear import AircraftParams, State


@pytest.fixture
def a320():
    return AircraftParams.a320()


def sink_state(v=3.0, pitch=0.0, roll=0.0):
    return State([0.0, pitch, roll, 0.0, 0.0, 0.0], [v, 0.0, 0.0, v, v, v])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
