import math

import pytest

from meanfield.config import Settings, get_settings
from meanfield.radial_solver import shoot
from meanfield.reductions import ProfileBank

LN8 = math.log(8.0)


@pytest.fixture(scope="session")
def settings() -> Settings:
    return get_settings()


@pytest.fixture(scope="session")
def oracle_profile(settings):
    """Single-exponential profile; η = ln 8 − 2 ln(1 + r²) exactly."""
    return shoot(LN8, 0.5, a=1.0, b=0.0, settings=settings)


@pytest.fixture(scope="session")
def profile_half(settings):
    return shoot(0.0, 0.5, settings=settings)


@pytest.fixture(scope="session")
def profile_half_5(settings):
    return shoot(5.0, 0.5, settings=settings)


@pytest.fixture(scope="session")
def bank_quarter(settings):
    return ProfileBank(0.25, settings=settings)


@pytest.fixture(scope="session")
def bank_eight(settings):
    return ProfileBank(0.8, settings=settings)
