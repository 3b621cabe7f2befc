import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "suite",
    max_examples=100,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")


def finite_complex(max_mag=2.0, min_mag=0.0):
    """Strategy for a finite complex number in an annulus."""
    base = st.builds(
        complex,
        st.floats(-max_mag, max_mag, allow_nan=False, allow_infinity=False),
        st.floats(-max_mag, max_mag, allow_nan=False, allow_infinity=False),
    )
    if min_mag > 0:
        return base.filter(lambda z: abs(z) >= min_mag)
    return base


def coeff_or_zero(max_mag=1.5, min_mag=0.1):
    """A coefficient that is exactly zero or bounded away from zero.

    Keeps randomly drawn polynomials numerically honest about their
    degree: a leading coefficient of 1e-12 makes the degree (and every
    quantity downstream of it) ill-posed at double precision.
    """
    return st.one_of(st.just(0j), finite_complex(max_mag, min_mag=min_mag))


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
