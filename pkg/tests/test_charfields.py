import math

import numpy as np
import pytest

from analog_horizon.charfields import (A_NEG, A_POS, ALL_INWARD, ALL_OUTWARD,
                                       MINUS, MIXED, PLUS, CharFieldPair,
                                       build_char_fields, kernel_direction,
                                       locate_ergo_region, polar_vortex_fields,
                                       radial_profile_fields,
                                       reduce_axisymmetric, s1_flux_test)
from analog_horizon.domains import AnnulusDomain, BoxDomain
from analog_horizon.errors import (HypothesisViolation, NotAxisymmetric,
                                   NotOnErgosphere)
from analog_horizon.media import (MediumFlow, ScalarField, VectorField,
                                  gordon_metric)
from analog_horizon.metric import MetricField, characteristic_residual

import oracles
from conftest import make_minkowski, make_vortex


@pytest.fixture(scope="module")
def vortex_setup():
    flow, m = make_vortex()
    region = locate_ergo_region(m, n_samples=128)
    pair = build_char_fields(m, region)
    return flow, m, region, pair


# ---------------------------------------------------------------------------
# locate_ergo_region

def test_locate_ergo_region_vortex(vortex_setup):
    _, m, region, _ = vortex_setup
    radii = np.linalg.norm(region.s_points, axis=1)
    assert np.max(np.abs(radii - 1.0)) < 1e-9
    for y in region.s_points[::16]:
        assert abs(region.delta(y)) < 1e-13
    assert region.annulus and region.r_inner == pytest.approx(0.3)


def test_locate_ergo_region_rejects_no_ergoregion():
    m = make_minkowski(2, AnnulusDomain(r_inner=0.3, r_outer=1.0))
    with pytest.raises(NotOnErgosphere):
        locate_ergo_region(m, n_samples=16)


# ---------------------------------------------------------------------------
# build_char_fields

def test_fields_match_polar_forms_pointwise(vortex_setup):
    _, m, region, pair = vortex_setup
    polar = polar_vortex_fields(0.6, 0.8, A_POS)
    x = np.array([0.8, 0.0])
    for which in (PLUS, MINUS):
        f, _ = pair.direction(which, x)
        p = polar.cartesian_direction(which, x)
        assert abs(oracles.cross2(f, p)) < 1e-10


def test_fields_coincide_on_ergosphere(vortex_setup):
    _, m, region, pair = vortex_setup
    for y in region.s_points[::8]:
        fp, _ = pair.direction(PLUS, y)
        fm, _ = pair.direction(MINUS, y)
        if float(fp @ fm) < 0:
            fm = -fm
        assert np.max(np.abs(fp - fm)) <= 1e-8


def test_fields_split_off_ergosphere(vortex_setup):
    _, m, region, pair = vortex_setup
    rng = np.random.default_rng(1)
    for _ in range(100):
        r = rng.uniform(0.32, 0.97)
        ang = rng.uniform(0, 2 * math.pi)
        x = np.array([r * math.cos(ang), r * math.sin(ang)])
        fp, _ = pair.direction(PLUS, x)
        fm, _ = pair.direction(MINUS, x)
        assert abs(oracles.cross2(fp, fm)) > 1e-6


def test_characteristic_normal_residual(vortex_setup):
    # the rotated field is a characteristic covector: algebraic identity
    _, m, region, pair = vortex_setup
    rng = np.random.default_rng(2)
    for _ in range(500):
        r = rng.uniform(0.31, 0.999)
        ang = rng.uniform(0, 2 * math.pi)
        x = np.array([r * math.cos(ang), r * math.sin(ang)])
        for which in (PLUS, MINUS):
            f, _ = pair.direction(which, x)
            nu = np.array([-f[1], f[0]])
            assert abs(characteristic_residual(m, x, nu)) <= 1e-8


def test_transversality_on_ergosphere(vortex_setup):
    _, m, region, pair = vortex_setup
    for y in region.s_points[::8]:
        nu = region.s_outward_normal(y)
        f, _ = pair.direction(PLUS, y)
        assert abs(float(f @ nu)) >= 0.01


def test_kernel_orthogonality_on_s(vortex_setup):
    _, m, region, pair = vortex_setup
    for y in region.s_points[::8]:
        b = kernel_direction(m, y)
        for which in (PLUS, MINUS):
            f, _ = pair.direction(which, y)
            assert abs(float(f @ b)) <= 1e-8


def test_polar_cartesian_grid_agreement(vortex_setup):
    _, m, region, pair = vortex_setup
    polar = polar_vortex_fields(0.6, 0.8, A_POS)
    radii = np.linspace(0.32, 0.99, 16)
    angles = np.linspace(0, 2 * math.pi, 16, endpoint=False)
    for r in radii:
        for ang in angles:
            x = np.array([r * math.cos(ang), r * math.sin(ang)])
            for which in (PLUS, MINUS):
                f, _ = pair.direction(which, x)
                p = polar.cartesian_direction(which, x)
                assert abs(oracles.cross2(f, p)) <= 1e-8


# ---------------------------------------------------------------------------
# kernel_direction

def test_kernel_direction_vortex(vortex_setup):
    _, m, _, _ = vortex_setup
    b = kernel_direction(m, [1.0, 0.0])
    assert b == pytest.approx([0.6, 0.8], abs=1e-10)


def test_kernel_collinear_with_flow(vortex_setup):
    flow, m, region, _ = vortex_setup
    for y in region.s_points[::16]:
        b = kernel_direction(m, y)
        w = np.asarray(flow.w.value(y))
        assert abs(oracles.cross2(b, w / np.linalg.norm(w))) < 1e-8
        assert float(b @ w) > 0.0  # same direction, not just collinear


def test_kernel_direction_off_ergosphere(minkowski2):
    with pytest.raises(NotOnErgosphere):
        kernel_direction(minkowski2, [0.0, 0.0])


# ---------------------------------------------------------------------------
# s1_flux_test

def test_s1_flux_outward():
    _, m = make_vortex(A=0.6, B=0.8, r_inner=0.3)
    region = locate_ergo_region(m, n_samples=64)
    rep = s1_flux_test(m, region, n_samples=64)
    assert rep.verdict == ALL_OUTWARD


def test_s1_flux_inward():
    _, m = make_vortex(A=-0.6, B=0.8, r_inner=0.3)
    region = locate_ergo_region(m, n_samples=64)
    rep = s1_flux_test(m, region, n_samples=64)
    assert rep.verdict == ALL_INWARD


def test_s1_flux_mixed():
    _, m = make_vortex(A=0.2, B=0.8, r_inner=0.3)
    region = locate_ergo_region(m, n_samples=64)
    rep = s1_flux_test(m, region, n_samples=64)
    assert rep.verdict == MIXED


# ---------------------------------------------------------------------------
# polar_vortex_fields

def test_polar_vortex_invariant_circle():
    polar = polar_vortex_fields(0.6, 0.8, A_POS)
    dr, _ = polar.rhs(PLUS, 0.6)
    assert dr == pytest.approx(0.0, abs=1e-15)
    dr8, _ = polar.rhs(PLUS, 0.8)
    assert dr8 == pytest.approx(0.36 - 0.64, abs=1e-15)


def test_polar_vortex_removable_singularity():
    # at r = B the minus-family angular rate vanishes smoothly
    polar = polar_vortex_fields(0.6, 0.8, A_POS)
    _, dth = polar.rhs(MINUS, 0.8)
    assert dth == pytest.approx(0.0, abs=1e-14)


def test_polar_vortex_negative_a():
    polar = polar_vortex_fields(-0.6, 0.8, A_NEG)
    dr, dth = polar.rhs(MINUS, 0.6)
    assert dr == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        polar_vortex_fields(-0.6, 0.8, A_POS)
    with pytest.raises(ValueError):
        polar_vortex_fields(0.6, 0.0, A_POS)


# ---------------------------------------------------------------------------
# radial_profile_fields

def test_radial_profile_valid_example():
    # A(r) = 2 - 2r, B = 1 on [0.25, 1]
    fields = radial_profile_fields([2.0, -2.0], [1.0], 0.25, 1.0)
    assert fields.plus_zeros == pytest.approx([0.5], abs=1e-9)
    assert fields.minus_zeros.size == 0
    a, b = fields.profile(0.25)
    assert a == pytest.approx(1.5) and b == pytest.approx(1.0)
    a0, b0 = fields.profile(1.0)
    assert a0 * a0 + b0 * b0 == pytest.approx(1.0, abs=1e-12)
    dr, _ = fields.rhs(PLUS, 0.5)
    assert dr == pytest.approx(0.0, abs=1e-12)


def test_radial_profile_removable_pole():
    # A crosses -1 at r = 1.5 which lies outside the domain, but the plus
    # angular rate is still evaluated near A ~ -1 without blowup when the
    # profile dips: use A(r) = 2 - 2r on a domain that approaches A = -1
    fields = radial_profile_fields([2.0, -2.0], [1.0], 0.25, 1.0)
    vals = [fields.rhs(PLUS, r) for r in np.linspace(0.3, 0.99, 40)]
    assert np.all(np.isfinite(np.asarray(vals)))


def test_radial_profile_hypothesis_violations():
    with pytest.raises(HypothesisViolation) as err:
        radial_profile_fields([1.2, -0.2], [1.0], 0.25, 1.0)
    assert "A(r0)^2 + B(r0)^2" in err.value.clause
    with pytest.raises(HypothesisViolation) as err:
        radial_profile_fields([2.0, -2.0], [-1.0], 0.25, 1.0)
    assert "B > 0" in err.value.clause
    # |A(r1)| <= 1: use r1 = 0.5 where A = 1
    with pytest.raises(HypothesisViolation) as err:
        radial_profile_fields([2.0, -2.0], [1.0], 0.5, 1.0)
    assert "|A(r1)| > 1" in err.value.clause


# ---------------------------------------------------------------------------
# reduce_axisymmetric

def _minkowski3():
    return make_minkowski(3, BoxDomain(lo=-3 * np.ones(3), hi=3 * np.ones(3)))


def test_reduce_axisymmetric_minkowski():
    m2 = reduce_axisymmetric(_minkowski3(), (0.5, 2.0), (0.4, math.pi - 0.4))
    for r, th in [(0.7, 1.0), (1.5, 0.6), (1.9, 2.2)]:
        a = m2.eval(np.array([r, th]))
        assert a[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert a[1, 1] == pytest.approx(-1.0, abs=1e-12)
        assert a[2, 2] == pytest.approx(-1.0 / r ** 2, abs=1e-12)
        assert abs(a[1, 2]) < 1e-12


def test_reduce_axisymmetric_radial_gordon():
    domain = BoxDomain(lo=-3 * np.ones(3), hi=3 * np.ones(3))

    def w(x):
        r = float(np.linalg.norm(x))
        return 0.2 * np.asarray(x, dtype=float) / (r * r)

    flow = MediumFlow(kind="gordon", dim=3,
                      w=VectorField.from_callable(w, 3), c=1.0, domain=domain,
                      n_refr=ScalarField.constant(2.0, 3))
    m3 = gordon_metric(flow)
    m2 = reduce_axisymmetric(m3, (0.5, 2.0), (0.4, math.pi - 0.4))
    for r, th in [(0.8, 1.2), (1.4, 0.7)]:
        a = m2.eval(np.array([r, th]))
        assert abs(a[1, 2]) < 1e-10  # no r-theta coupling for radial flow


def test_reduce_axisymmetric_rejects_phi_dependent():
    domain = BoxDomain(lo=-3 * np.ones(3), hi=3 * np.ones(3))

    def eval_fn(x):
        g = np.diag([1.0, -1.0, -1.0, -1.0])
        g[0, 0] += 0.1 * float(x[0])  # depends on x1: not axisymmetric
        return g

    m3 = MetricField(dim=3, eval=eval_fn,
                     grad=lambda x: np.zeros((3, 4, 4)), domain=domain)
    with pytest.raises(NotAxisymmetric):
        reduce_axisymmetric(m3, (0.5, 2.0), (0.4, math.pi - 0.4))


def test_reduced_metric_feeds_field_evaluators():
    # the axisymmetric reduction is consumable by the 2D field machinery:
    # pointwise directions exist inside its ergoregion and their normals
    # are characteristic for the reduced coefficients
    domain = BoxDomain(lo=-3 * np.ones(3), hi=3 * np.ones(3))

    def w(x):
        r = float(np.linalg.norm(x))
        return 0.45 * np.asarray(x, dtype=float) / (r * r)

    flow = MediumFlow(kind="gordon", dim=3,
                      w=VectorField.from_callable(w, 3), c=1.0, domain=domain,
                      n_refr=ScalarField.constant(2.0, 3))
    m3 = gordon_metric(flow)
    # 3D ergoregion: |w| > c/n, i.e. r < 0.9; reduced block must factor there
    m2 = reduce_axisymmetric(m3, (0.5, 2.0), (0.6, math.pi - 0.6))
    pair = CharFieldPair(metric=m2, region=None)
    for u in ([0.7, 1.2], [0.8, 0.9], [0.6, 1.8]):
        u = np.array(u)
        block = m2.eval(u)[1:, 1:]
        delta = block[0, 0] * block[1, 1] - block[0, 1] ** 2
        assert delta < 0.0  # inside the reduced ergoregion
        for which in (PLUS, MINUS):
            f, _ = pair.direction(which, u)
            nu = np.array([-f[1], f[0]])
            assert abs(float(nu @ block @ nu)) <= 1e-10
