"""Null bicharacteristic tracing.

Integrates the Hamiltonian system

    dx_j/ds  =  2 sum_k g^{jk}(x) xi_k
    dxi_p/ds = -sum_{jk} dg^{jk}/dx_p xi_j xi_k

for the quadratic symbol H = sum g^{jk} xi_j xi_k, holding xi_0 exactly
constant (the metric is independent of the time coordinate). Conservation of
H is monitored, not enforced: each ray carries its worst normalized |H|.

Rays attracted to a closed characteristic curve steepen without bound
(|xi| blows up at finite parameter while the projection winds onto the
cycle); such rays are terminated the moment the conservation budget is
exceeded rather than ground down to the minimum step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _rk
from .errors import ComplexRoots, NotNull, StepFailure
from .metric import MetricField, characteristic_residual, full_metric, full_symbol, solve_xi0

ROOT1 = "Root1"
ROOT2 = "Root2"
ZERO_XI0 = "ZeroXi0"

LEFT_DOMAIN = "LeftDomain"
MAX_PARAM = "MaxParam"
STEP_FAILURE = "StepFailure"
DRIFT_EXCEEDED = "DriftExceeded"

FORWARD = "Forward"
BACKWARD = "Backward"
STALLED = "Stalled"

EXIT_BISECT_TOL = 1e-10
STALL_SPEED = 1e-9
NUDGE_STEP = 1e-6


@dataclass(frozen=True)
class BicharState:
    s: float
    x0: float
    x: np.ndarray
    xi0: float
    xi: np.ndarray


@dataclass(frozen=True)
class TraceOptions:
    s_max: float = 50.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-10
    max_steps: int = 20000
    drift_tol: float = 1e-6
    project_to_null: bool = False


@dataclass
class RayResult:
    samples: list
    h_drift_max: float
    termination: str
    orientation: str
    reason: str = ""

    @property
    def final(self) -> BicharState:
        return self.samples[-1]

    def positions(self) -> np.ndarray:
        return np.asarray([st.x for st in self.samples])


def make_null_initial(m: MetricField, x, xi_spatial, branch: str,
                      x0: float = 0.0) -> BicharState:
    """Null phase-space state at x with spatial covector xi_spatial.

    Root1/Root2 pick the larger/smaller xi0 root of the dispersion
    quadratic; ZeroXi0 requires xi_spatial itself to be characteristic
    (surface-tangent launch) and sets xi0 = 0.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi_spatial, dtype=float)
    norm2 = float(xi @ xi)
    if norm2 == 0.0:
        raise NotNull("zero spatial covector")
    if branch == ZERO_XI0:
        res = characteristic_residual(m, x, xi)
        if abs(res) > 1e-8 * norm2:
            raise NotNull(f"residual {res:.3e} off characteristic for ZeroXi0 launch")
        return BicharState(s=0.0, x0=x0, x=x, xi0=0.0, xi=xi)
    roots = solve_xi0(m, x, xi)
    xi0 = roots[0] if branch == ROOT1 else roots[1]
    return BicharState(s=0.0, x0=x0, x=x, xi0=xi0, xi=xi)


def _pack(st: BicharState) -> np.ndarray:
    return np.concatenate([[st.x0], st.x, st.xi])


def _unpack(s: float, y: np.ndarray, xi0: float, dim: int) -> BicharState:
    return BicharState(s=s, x0=float(y[0]), x=y[1:1 + dim].copy(),
                       xi0=xi0, xi=y[1 + dim:].copy())


def _make_rhs(m: MetricField, xi0: float):
    dim = m.dim

    def rhs(s, y):
        x = y[1:1 + dim]
        xi_full = np.concatenate([[xi0], y[1 + dim:]])
        g = m.eval(x)
        dg = m.grad(x)
        xdot = 2.0 * (g @ xi_full)
        xidot = -np.einsum("pjk,j,k->p", dg, xi_full, xi_full)
        return np.concatenate([xdot, xidot])

    return rhs


def _symbol_at(m: MetricField, y: np.ndarray, xi0: float, dim: int) -> float:
    xi_full = np.concatenate([[xi0], y[1 + dim:]])
    return float(xi_full @ m.eval(y[1:1 + dim]) @ xi_full)


def _project_null(m: MetricField, y: np.ndarray, xi0: float, dim: int) -> np.ndarray:
    # One Newton step of xi toward the null cone along grad_xi H.
    x = y[1:1 + dim]
    xi_full = np.concatenate([[xi0], y[1 + dim:]])
    g = m.eval(x)
    h = float(xi_full @ g @ xi_full)
    grad = 2.0 * (g @ xi_full)[1:]
    n2 = float(grad @ grad)
    if n2 > 0.0:
        y = y.copy()
        y[1 + dim:] -= h * grad / n2
    return y


def trace_ray(m: MetricField, init: BicharState,
              opts: TraceOptions = TraceOptions()) -> RayResult:
    """Adaptive DP45 integration of a null bicharacteristic.

    xi0 is held exactly constant; domain exit is located by bisecting the
    final step to 1e-10 in s; drift above opts.drift_tol rolls the step back
    and terminates the ray.
    """
    dim = m.dim
    xi0 = init.xi0
    rhs = _make_rhs(m, xi0)
    y = _pack(init)
    s = float(init.s)
    norm0 = xi0 * xi0 + float(init.xi @ init.xi)
    if norm0 == 0.0:
        raise NotNull("zero covector")

    orientation = time_orientation(m, init)
    samples = [init]
    drift_max = abs(_symbol_at(m, y, xi0, dim)) / norm0

    # launch from the ergosphere has zero spatial velocity; one second-order
    # micro-step moves off the degenerate start before adaptivity begins
    f0 = rhs(s, y)
    if float(np.linalg.norm(f0[1:1 + dim])) < STALL_SPEED * (1.0 + math.sqrt(norm0)):
        y_mid = y + NUDGE_STEP * f0
        y = y + 0.5 * NUDGE_STEP * (f0 + rhs(s + NUDGE_STEP, y_mid))
        s += NUDGE_STEP
        samples.append(_unpack(s, y, xi0, dim))

    h = _rk.initial_step_size(rhs, s, y, opts.rel_tol, opts.abs_tol)
    k1 = None
    termination = MAX_PARAM
    reason = ""
    attempts = 0
    while s < opts.s_max:
        attempts += 1
        if attempts > opts.max_steps:
            termination = STEP_FAILURE
            reason = f"step budget {opts.max_steps} exhausted at s = {s:.6g}"
            break
        if h < _rk.MIN_STEP:
            termination = STEP_FAILURE
            reason = f"step underflow at s = {s:.6g}"
            break
        h = min(h, opts.s_max - s)
        y_new, err, k1, k7 = _rk.dp_step(rhs, s, y, h, k1)
        if not np.all(np.isfinite(y_new)):
            h *= _rk.MAX_SHRINK
            k1 = None
            continue
        errn = _rk.error_norm(err, y, y_new, opts.rel_tol, opts.abs_tol)
        if errn <= 1.0:
            drift = abs(_symbol_at(m, y_new, xi0, dim)) / norm0
            if drift > opts.drift_tol:
                termination = DRIFT_EXCEEDED
                reason = (f"conservation budget {opts.drift_tol:g} exceeded "
                          f"at s = {s + h:.6g}; step rolled back")
                break
            if not m.domain.contains(y_new[1:1 + dim]):
                h_exit, y_exit = _rk.bisect_event(
                    rhs, s, y, h, k1,
                    test=lambda yy: -m.domain.inside(yy[1:1 + dim]),
                    tol_s=EXIT_BISECT_TOL)
                s += h_exit
                y = y_exit
                if opts.project_to_null:
                    y = _project_null(m, y, xi0, dim)
                drift_max = max(drift_max, abs(_symbol_at(m, y, xi0, dim)) / norm0)
                samples.append(_unpack(s, y, xi0, dim))
                termination = LEFT_DOMAIN
                break
            s += h
            y = y_new
            if opts.project_to_null:
                y = _project_null(m, y, xi0, dim)
                k7 = rhs(s, y)
            drift_max = max(drift_max, drift)
            samples.append(_unpack(s, y, xi0, dim))
            k1 = k7
        else:
            k1 = None
        h = _rk.next_step_size(h, errn)
    return RayResult(samples=samples, h_drift_max=drift_max,
                     termination=termination, orientation=orientation,
                     reason=reason)


def time_orientation(m: MetricField, st: BicharState) -> str:
    """Sign of dx0/ds = 2 sum_{k>=0} g^{0k} xi_k at the state."""
    g = m.eval(st.x)
    xi_full = np.concatenate([[st.xi0], st.xi])
    rate = 2.0 * float(g[0] @ xi_full)
    if abs(rate) < 1e-12:
        return STALLED
    return FORWARD if rate > 0.0 else BACKWARD


def null_geodesic_residual(m: MetricField, ray: RayResult) -> float:
    """Max over samples of |g_jk xdot^j xdot^k| / |xdot|^2 with xdot = 2 G xi."""
    if len(ray.samples) < 2:
        raise ValueError("ray needs at least 2 samples")
    worst = 0.0
    for st in ray.samples:
        g = m.eval(st.x)
        xi_full = np.concatenate([[st.xi0], st.xi])
        xdot = 2.0 * (g @ xi_full)
        n2 = float(xdot @ xdot)
        if n2 == 0.0:
            continue
        g_low = full_metric(m, st.x)
        worst = max(worst, abs(float(xdot @ g_low @ xdot)) / n2)
    return worst
