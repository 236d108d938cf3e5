import math

import numpy as np
import pytest

from analog_horizon.domains import AnnulusDomain
from analog_horizon.errors import NotNull
from analog_horizon.media import acoustic_metric, vortex_flow
from analog_horizon.metric import full_symbol
from analog_horizon.rays import (BACKWARD, DRIFT_EXCEEDED, FORWARD,
                                 LEFT_DOMAIN, MAX_PARAM, ROOT1, ROOT2,
                                 STALLED, ZERO_XI0, BicharState, TraceOptions,
                                 make_null_initial, null_geodesic_residual,
                                 time_orientation, trace_ray)

import oracles
from conftest import make_minkowski, make_vortex


# ---------------------------------------------------------------------------
# make_null_initial

def test_make_null_initial_minkowski_root1(minkowski2):
    st = make_null_initial(minkowski2, [0.0, 0.0], [1.0, 0.0], ROOT1)
    assert st.xi0 == pytest.approx(1.0)
    assert abs(full_symbol(minkowski2, st.x, st.xi0, st.xi)) < 1e-12


def test_make_null_initial_kernel_zero_xi0(vortex):
    _, m = vortex
    y = np.array([1.0, 0.0])
    b = oracles.vortex_velocity(0.6, 0.8, y)
    st = make_null_initial(m, y, b, ZERO_XI0)
    assert st.xi0 == 0.0
    assert abs(full_symbol(m, st.x, 0.0, st.xi)) < 1e-10


def test_make_null_initial_rejects_zero_and_non_characteristic(minkowski2, vortex):
    with pytest.raises(NotNull):
        make_null_initial(minkowski2, [0.0, 0.0], [0.0, 0.0], ROOT1)
    _, m = vortex
    with pytest.raises(NotNull):
        make_null_initial(m, [0.5, 0.0], [1.0, 0.0], ZERO_XI0)


# ---------------------------------------------------------------------------
# trace_ray

def test_trace_ray_minkowski_straight_line(minkowski2):
    st = BicharState(s=0.0, x0=0.0, x=np.zeros(2), xi0=1.0,
                     xi=np.array([-1.0, 0.0]))
    ray = trace_ray(minkowski2, st, TraceOptions(s_max=0.5))
    # constant-coefficient Hamilton equations: x0 = 2s, x1 = 2s
    for smp in ray.samples:
        assert smp.x0 == pytest.approx(2.0 * smp.s, abs=1e-10)
        assert smp.x[0] == pytest.approx(2.0 * smp.s, abs=1e-10)
        assert smp.x[1] == pytest.approx(0.0, abs=1e-12)
    assert ray.h_drift_max < 1e-14
    assert ray.termination in (MAX_PARAM, LEFT_DOMAIN)


def test_trace_ray_xi0_exactly_constant(vortex):
    _, m = vortex
    st = make_null_initial(m, [0.8, 0.0], [0.3, 1.0], ROOT1)
    ray = trace_ray(m, st, TraceOptions(s_max=5.0))
    assert all(smp.xi0 == st.xi0 for smp in ray.samples)


def test_trace_ray_vortex_spiral_toward_cycle(vortex):
    # surface-tangent launch from the ergosphere rides the characteristic
    # curve and spirals toward the horizon radius r = A = 0.6
    _, m = vortex
    y = np.array([1.0, 0.0])
    b = oracles.vortex_velocity(0.6, 0.8, y)
    st = make_null_initial(m, y, b, ZERO_XI0)
    assert time_orientation(m, st) == FORWARD
    ray = trace_ray(m, st, TraceOptions(s_max=50.0, drift_tol=1e-4))
    r_end = float(np.linalg.norm(ray.final.x))
    assert 0.6 - 1e-6 <= r_end <= 0.61
    assert ray.final.x0 > 0.0  # spirals forward in time
    radii = np.linalg.norm(ray.positions(), axis=1)
    assert np.all(np.diff(radii) < 1e-9)  # monotone spiral inward
    assert ray.h_drift_max <= 1e-4


def test_trace_ray_radial_flow_rides_ergosphere():
    # radial sonic flow: the ergosphere r=1 is characteristic and the
    # surface-tangent ray hovers there: x frozen, x0 growing, |xi| blowing
    # up at the finite affine parameter s* = 1/(2 |xi(0)|) (the usual
    # horizon-generator degeneracy), so the trace ends by step failure
    flow, m = make_vortex(A=1.0, B=0.0, r_inner=0.5, r_outer=1.5)
    y = np.array([1.0, 0.0])
    b = np.array([1.0, 0.0])  # kernel direction: radial
    st = make_null_initial(m, y, b, ZERO_XI0)
    ray = trace_ray(m, st, TraceOptions(s_max=20.0))
    radii = np.linalg.norm(ray.positions(), axis=1)
    assert np.max(np.abs(radii - 1.0)) < 1e-8
    assert ray.final.s == pytest.approx(0.5, abs=1e-6)
    assert ray.final.x0 > 10.0  # hovers forward in coordinate time
    assert ray.h_drift_max < 1e-10


def test_trace_ray_drift_budget_terminates_doomed_rays(vortex):
    # a ray close to the cycle's stable set steepens without bound; the
    # conservation budget must stop it with the recorded drift still small
    _, m = vortex
    st = make_null_initial(m, [0.9, 0.0], [-0.1, 1.0], ROOT1)
    ray = trace_ray(m, st, TraceOptions(s_max=200.0))
    assert ray.termination in (DRIFT_EXCEEDED, LEFT_DOMAIN, MAX_PARAM)
    assert ray.h_drift_max <= 1e-6


def test_trace_ray_conservation_ensemble(vortex):
    _, m = vortex
    rng = np.random.default_rng(42)
    for _ in range(20):
        r = rng.uniform(0.35, 0.95)
        ang = rng.uniform(0, 2 * math.pi)
        x = np.array([r * math.cos(ang), r * math.sin(ang)])
        phi = rng.uniform(0, 2 * math.pi)
        xi = np.array([math.cos(phi), math.sin(phi)])
        branch = ROOT1 if rng.integers(2) else ROOT2
        ray = trace_ray(m, make_null_initial(m, x, xi, branch),
                        TraceOptions(s_max=50.0))
        assert ray.h_drift_max <= 1e-6
        assert null_geodesic_residual(m, ray) <= 1e-6


def test_trace_ray_time_reversal(vortex):
    # retracing from the endpoint with negated spatial covector returns to
    # the launch point (the reversed state solves the same system)
    _, m = vortex
    st = make_null_initial(m, [0.8, 0.1], [0.4, 1.0], ROOT2)
    opts = TraceOptions(s_max=0.15)
    ray = trace_ray(m, st, opts)
    assert ray.termination == MAX_PARAM
    end = ray.final
    back = BicharState(s=0.0, x0=end.x0, x=end.x.copy(), xi0=-end.xi0,
                       xi=-end.xi.copy())
    ray_back = trace_ray(m, back, opts)
    assert ray_back.termination == MAX_PARAM
    assert np.max(np.abs(ray_back.final.x - st.x)) < 1e-6
    assert np.max(np.abs(-ray_back.final.xi - st.xi)) < 1e-6
    assert ray_back.final.x0 == pytest.approx(st.x0, abs=1e-6)


# ---------------------------------------------------------------------------
# time_orientation

def test_time_orientation_minkowski(minkowski2):
    st = BicharState(s=0.0, x0=0.0, x=np.zeros(2), xi0=1.0,
                     xi=np.array([-1.0, 0.0]))
    assert time_orientation(minkowski2, st) == FORWARD
    st2 = BicharState(s=0.0, x0=0.0, x=np.zeros(2), xi0=0.0,
                      xi=np.array([1.0, 0.0]))
    assert time_orientation(minkowski2, st2) == STALLED


def test_time_orientation_vortex_kernel(vortex):
    _, m = vortex
    y = np.array([1.0, 0.0])
    b = oracles.vortex_velocity(0.6, 0.8, y)
    fwd = BicharState(s=0.0, x0=0.0, x=y, xi0=0.0, xi=b)
    bwd = BicharState(s=0.0, x0=0.0, x=y, xi0=0.0, xi=-b)
    assert time_orientation(m, fwd) == FORWARD
    assert time_orientation(m, bwd) == BACKWARD


# ---------------------------------------------------------------------------
# null_geodesic_residual

def test_null_geodesic_residual_minkowski(minkowski2):
    st = BicharState(s=0.0, x0=0.0, x=np.zeros(2), xi0=1.0,
                     xi=np.array([-1.0, 0.0]))
    ray = trace_ray(minkowski2, st, TraceOptions(s_max=0.5))
    assert null_geodesic_residual(minkowski2, ray) < 1e-14


def test_null_geodesic_residual_nonnull_ray(minkowski2):
    # deliberately non-null covector: residual equals the (nonzero)
    # normalized symbol value
    st = BicharState(s=0.0, x0=0.0, x=np.zeros(2), xi0=1.0,
                     xi=np.array([-0.5, 0.0]))
    ray = trace_ray(minkowski2, st, TraceOptions(s_max=0.3, drift_tol=10.0))
    res = null_geodesic_residual(minkowski2, ray)
    h_val = full_symbol(minkowski2, [0, 0], 1.0, [-0.5, 0.0])
    xdot = 2.0 * np.array([1.0, 0.5, 0.0])
    expected = abs(4.0 * h_val) / float(xdot @ xdot)
    assert res == pytest.approx(expected, rel=1e-9)


def test_trace_ray_null_projection_option(vortex):
    # optional projection step keeps the state on the cone without changing
    # the path beyond tolerance
    _, m = vortex
    st = make_null_initial(m, [0.8, 0.1], [0.4, 1.0], ROOT1)
    opts = TraceOptions(s_max=0.15)
    plain = trace_ray(m, st, opts)
    projected = trace_ray(m, st, TraceOptions(s_max=0.15, project_to_null=True))
    assert projected.h_drift_max <= plain.h_drift_max + 1e-12
    assert np.max(np.abs(projected.final.x - plain.final.x)) < 1e-7


def test_surface_riding_keeps_characteristic_residual(vortex):
    # the covector of a surface-tangent launch stays characteristic along
    # the ray (it remains the eikonal gradient of its characteristic curve)
    _, m = vortex
    y = np.array([1.0, 0.0])
    b = oracles.vortex_velocity(0.6, 0.8, y)
    ray = trace_ray(m, make_null_initial(m, y, b, ZERO_XI0),
                    TraceOptions(s_max=50.0, drift_tol=1e-4))
    worst = 0.0
    for st in ray.samples:
        block = m.eval(st.x)[1:, 1:]
        norm2 = float(st.xi @ st.xi)
        worst = max(worst, abs(float(st.xi @ block @ st.xi)) / norm2)
    assert worst <= 1e-7
