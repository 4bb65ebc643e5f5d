import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from semicanon.backend import FloatBackend

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture
def fb():
    return FloatBackend()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
