import pytest
from hypothesis import HealthCheck, settings

import ghostsim as gs

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

# parameters of the built-in ding-fig3 preset; most tests run against these
FIG3 = dict(
    lambda1=1530e-9,
    lambda2=780e-9,
    L1=1.15,
    L2=0.325,
    d=0.5e-3,
    slit_width=0.1e-3,
    gamma=0.11e-3,
)


def make_scenario(**overrides):
    return gs.Scenario.from_gamma(**{**FIG3, **overrides})


@pytest.fixture(scope="session")
def fig3():
    return make_scenario()


@pytest.fixture(scope="session")
def fig3_jd(fig3):
    return gs.joint_density(fig3)


@pytest.fixture(scope="session")
def fig3_slice(fig3_jd):
    return gs.coincidence_slice(fig3_jd, 0.0)
