import numpy as np
import pytest

from accellab.golden import load_golden
from accellab.problems import built_in_catalog, default_start, get_catalog_entry


@pytest.fixture(scope="session")
def catalog():
    return built_in_catalog()


@pytest.fixture(scope="session")
def golden():
    return load_golden()


@pytest.fixture(scope="session")
def segment2d():
    return get_catalog_entry("segment2d").oracle


@pytest.fixture(scope="session")
def segment2d_start():
    return default_start("segment2d")


@pytest.fixture(scope="session")
def counterexample_run_default():
    """Default-tolerance divergent-regime run shared across tests."""
    from accellab.ode import run_counterexample

    return run_counterexample(1.0, 1.0, 200.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
