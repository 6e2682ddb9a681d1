import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def derived():
    return json.loads(resources.files("loopforms").joinpath("fixtures/derived.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
