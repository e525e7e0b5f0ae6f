import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from blaschke_circle import KappaVector, ParameterPoint, four_modal_model

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# fixed point of the four-modal model, published to five digits
PUBLISHED_X = np.array([0.0, 0.03427, 0.13811, 0.39748, 0.53431])
PUBLISHED_MU = np.array([0.69690, 1.31911, 1.33310, 0.60207])


@pytest.fixture
def model():
    return four_modal_model()


@pytest.fixture
def kappa733():
    return KappaVector(7, (3, 3))


@pytest.fixture
def published_mu():
    return ParameterPoint(0.69690, 1.31911, ((1.33310, 0.60207),))


@pytest.fixture
def unimodal():
    return ParameterPoint(0.0, 2.0), KappaVector(2, (1,))


@pytest.fixture
def three_pole_params():
    return ParameterPoint(0.0, 1.2, ((1.2, 1.0 / 3.0), (1.1, 0.75))), KappaVector(8, (3, 2, 2))
