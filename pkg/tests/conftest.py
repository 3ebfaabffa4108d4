"""Shared fixtures and hypothesis settings for the microtwin test suite."""
import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Allow running the suite from a plain checkout without an installed package.
sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def lj():
    from microtwin import LennardJones

    return LennardJones(1.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260819)
