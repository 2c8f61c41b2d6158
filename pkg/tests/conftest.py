import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lindchaos import tensor as ta
from lindchaos.config import load_config
from lindchaos.dynamics import ModelParams

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

M0 = np.diag([0.7, 0.3]).astype(complex)


@pytest.fixture
def qubit_params():
    return ModelParams(d=2, h_tilde=ta.Z, a_int=np.kron(ta.X, ta.X), l_jump=0.5 * ta.LOWER)


@pytest.fixture
def qubit_config():
    return load_config("qubit")


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))
