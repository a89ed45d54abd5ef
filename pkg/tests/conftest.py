import numpy as np
import pytest

from state_transport.suites import random_state, random_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


@pytest.fixture
def make_state():
    return random_state


@pytest.fixture
def make_unitary():
    return random_unitary
