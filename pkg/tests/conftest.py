import warnings
import sys

import numpy as np
import pytest
from hypothesis import settings

from geotraj.manifold import Sphere

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def unit_sphere():
    return Sphere(np.zeros(3), 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_atlas_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*cell.*")
        yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
