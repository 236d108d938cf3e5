import numpy as np
import pytest

from analog_horizon.domains import AnnulusDomain, BoxDomain
from analog_horizon.metric import MetricField
from analog_horizon.media import acoustic_metric, vortex_flow


def make_minkowski(dim=2, domain=None):
    if domain is None:
        domain = BoxDomain(lo=-2 * np.ones(dim), hi=2 * np.ones(dim))
    eta = np.diag(np.concatenate([[1.0], -np.ones(dim)]))

    return MetricField(
        dim=dim,
        eval=lambda x: eta.copy(),
        grad=lambda x: np.zeros((dim, dim + 1, dim + 1)),
        domain=domain,
        name="minkowski",
    )


@pytest.fixture
def minkowski2():
    return make_minkowski(2)


@pytest.fixture
def minkowski3():
    return make_minkowski(3)


def make_vortex(A=0.6, B=0.8, r_inner=0.3, r_outer=None):
    if r_outer is None:
        r_outer = np.hypot(A, B)
    domain = AnnulusDomain(r_inner=r_inner, r_outer=r_outer)
    flow = vortex_flow(A, B, domain)
    return flow, acoustic_metric(flow)


@pytest.fixture
def vortex():
    """Example vortex A=0.6, B=0.8 on the annulus [0.3, 1]."""
    return make_vortex()
