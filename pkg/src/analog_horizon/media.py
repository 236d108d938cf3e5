"""Flow media and their effective metrics.

Builds the optical (Gordon) metric of a moving dielectric and the acoustic
metric of a moving fluid from flow data, provides the ergosphere function,
and traces flow trajectories for the density/incoming-flow hypotheses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from . import _rk
from .domains import AnnulusDomain
from .errors import StagnationPoint, StepFailure, SuperluminalFlow
from .metric import MetricField

GORDON = "gordon"
ACOUSTIC = "acoustic"

EXITS_DOMAIN = "ExitsDomain"
CLOSES_UP = "ClosesUp"
UNDECIDED = "Undecided"

STAGNATION_SPEED = 1e-12


@dataclass(frozen=True)
class ScalarField:
    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]

    @staticmethod
    def constant(c: float, dim: int) -> "ScalarField":
        return ScalarField(value=lambda x: c, grad=lambda x: np.zeros(dim))


@dataclass(frozen=True)
class VectorField:
    value: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]  # J[i, j] = d w_i / d x_j

    @staticmethod
    def from_callable(fn, dim: int, h: float = 1e-6) -> "VectorField":
        def jac(x):
            x = np.asarray(x, dtype=float)
            cols = []
            for j in range(dim):
                e = np.zeros(dim)
                e[j] = h
                cols.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * h))
            return np.stack(cols, axis=1)

        return VectorField(value=fn, jacobian=jac)


@dataclass(frozen=True)
class MediumFlow:
    """Flow data from which an effective metric is built.

    kind 'gordon': w is the medium velocity, c the vacuum light speed,
    n_refr the refraction index field (needs |w| < c).
    kind 'acoustic': w is the fluid velocity, c the sound speed, rho the
    density field.
    """
    kind: str
    dim: int
    w: VectorField
    c: float
    domain: object
    n_refr: Optional[ScalarField] = None
    rho: Optional[ScalarField] = None
    name: str = "flow"


def four_velocity(f: MediumFlow, x) -> tuple[float, np.ndarray]:
    """Lorentz four-velocity (v0, v) of the flow; v0^2 - |v|^2 = 1."""
    w = np.asarray(f.w.value(np.asarray(x, dtype=float)), dtype=float)
    beta2 = float(w @ w) / (f.c * f.c)
    if beta2 >= 1.0:
        raise SuperluminalFlow(f"|w| = {math.sqrt(beta2) * f.c:.6g} >= c = {f.c:.6g}")
    v0 = 1.0 / math.sqrt(1.0 - beta2)
    return v0, v0 * w / f.c


def gordon_metric(f: MediumFlow) -> MetricField:
    """Contravariant Gordon metric eta^{jk} + (n^2 - 1) v^j v^k."""
    if f.kind != GORDON:
        raise ValueError("gordon_metric requires a gordon-kind flow")
    n = f.dim
    c = f.c
    nf = f.n_refr

    def eval_fn(x):
        x = np.asarray(x, dtype=float)
        v0, v = four_velocity(f, x)
        nval = nf.value(x)
        k = nval * nval - 1.0
        g = np.empty((n + 1, n + 1))
        g[0, 0] = 1.0 + k * v0 * v0
        for i in range(n):
            vi = v[i]
            g[0, i + 1] = g[i + 1, 0] = k * v0 * vi
            for j in range(i, n):
                val = k * vi * v[j] - (1.0 if i == j else 0.0)
                g[i + 1, j + 1] = g[j + 1, i + 1] = val
        return g

    def grad_fn(x):
        x = np.asarray(x, dtype=float)
        w = np.asarray(f.w.value(x), dtype=float)
        jw = np.asarray(f.w.jacobian(x), dtype=float)
        beta2 = float(w @ w) / (c * c)
        if beta2 >= 1.0:
            raise SuperluminalFlow(f"|w| >= c at {x}")
        gam = 1.0 / math.sqrt(1.0 - beta2)
        v = gam * w / c
        vfull = np.concatenate([[gam], v])
        nval = nf.value(x)
        ngrad = np.asarray(nf.grad(x), dtype=float)
        out = np.empty((n, n + 1, n + 1))
        for p in range(n):
            dgam = gam ** 3 * float(w @ jw[:, p]) / (c * c)
            dv = (dgam * w + gam * jw[:, p]) / c
            dvfull = np.concatenate([[dgam], dv])
            out[p] = (2.0 * nval * ngrad[p]) * np.outer(vfull, vfull)
            out[p] += (nval * nval - 1.0) * (
                np.outer(dvfull, vfull) + np.outer(vfull, dvfull))
        return out

    return MetricField(dim=n, eval=eval_fn, grad=grad_fn, domain=f.domain,
                       name=f"gordon:{f.name}")


def acoustic_metric(f: MediumFlow) -> MetricField:
    """Contravariant acoustic metric: g^{00} = 1/(rho c), g^{0j} = v^j/(rho c),
    g^{jk} = (-c^2 delta_{jk} + v^j v^k)/(rho c)."""
    if f.kind != ACOUSTIC:
        raise ValueError("acoustic_metric requires an acoustic-kind flow")
    n = f.dim
    c = f.c
    rho = f.rho

    c2 = c * c

    def eval_fn(x):
        x = np.asarray(x, dtype=float)
        v = f.w.value(x)
        s = 1.0 / (rho.value(x) * c)
        g = np.empty((n + 1, n + 1))
        g[0, 0] = s
        for i in range(n):
            vi = v[i]
            g[0, i + 1] = g[i + 1, 0] = s * vi
            for j in range(i, n):
                val = s * (vi * v[j] - (c2 if i == j else 0.0))
                g[i + 1, j + 1] = g[j + 1, i + 1] = val
        return g

    def grad_fn(x):
        x = np.asarray(x, dtype=float)
        v = np.asarray(f.w.value(x), dtype=float)
        jv = np.asarray(f.w.jacobian(x), dtype=float)
        rval = rho.value(x)
        rgrad = np.asarray(rho.grad(x), dtype=float)
        g = np.empty((n + 1, n + 1))
        g[0, 0] = 1.0
        g[0, 1:] = v
        g[1:, 0] = v
        g[1:, 1:] = -c * c * np.eye(n) + np.outer(v, v)
        out = np.empty((n, n + 1, n + 1))
        for p in range(n):
            dg = np.zeros((n + 1, n + 1))
            dg[0, 1:] = jv[:, p]
            dg[1:, 0] = jv[:, p]
            dg[1:, 1:] = np.outer(jv[:, p], v) + np.outer(v, jv[:, p])
            out[p] = (dg - (rgrad[p] / rval) * g) / (rval * c)
        return out

    return MetricField(dim=n, eval=eval_fn, grad=grad_fn, domain=f.domain,
                       name=f"acoustic:{f.name}")


def build_metric(f: MediumFlow) -> MetricField:
    return gordon_metric(f) if f.kind == GORDON else acoustic_metric(f)


def ergo_function(f: MediumFlow, x) -> float:
    """|w|^2 - c^2/n^2 (gordon) or |v|^2 - c^2 (acoustic); positive inside
    the ergoregion, zero on the ergosphere."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(f.w.value(x), dtype=float)
    speed2 = float(w @ w)
    if f.kind == GORDON:
        nval = f.n_refr.value(x)
        return speed2 - (f.c * f.c) / (nval * nval)
    return speed2 - f.c * f.c


@dataclass
class FlowTrace:
    s: np.ndarray
    points: np.ndarray
    outcome: str


# Closure: Poincare-style test at the start point. Once the trajectory has
# moved ARM_DIST away, every same-direction crossing of the hyperplane
# through the start (normal = start velocity) is bisected; the orbit closes
# when the crossing lands within CLOSURE_DIST of the start with velocity
# cosine above CLOSURE_COS.
CLOSURE_DIST = 1e-6
CLOSURE_COS = 0.999
ARM_DIST = 1e-3


def trace_flow(f: MediumFlow, start, s_max: float,
               rel_tol: float = 1e-9, abs_tol: float = 1e-10,
               max_steps: int = 100000) -> FlowTrace:
    """Integrate dx/ds = w(x) until domain exit, closure, or s_max."""

    def rhs(s, y):
        return np.asarray(f.w.value(y), dtype=float)

    y = np.asarray(start, dtype=float).copy()
    v0 = rhs(0.0, y)
    speed0 = float(np.linalg.norm(v0))
    if speed0 < STAGNATION_SPEED:
        raise StagnationPoint(f"|w| < {STAGNATION_SPEED:g} at start {y}")
    start_pt = y.copy()
    n_hat = v0 / speed0

    s = 0.0
    ss = [0.0]
    pts = [y.copy()]
    h = _rk.initial_step_size(rhs, s, y, rel_tol, abs_tol)
    k1 = None
    outcome = UNDECIDED
    armed = False
    c_prev = 0.0
    for _ in range(max_steps):
        if s >= s_max:
            break
        if h < _rk.MIN_STEP:
            raise StepFailure(f"flow step underflow at s = {s:.6g}")
        h = min(h, s_max - s)
        y_new, err, k1, k7 = _rk.dp_step(rhs, s, y, h, k1)
        errn = _rk.error_norm(err, y, y_new, rel_tol, abs_tol)
        if errn <= 1.0:
            speed = float(np.linalg.norm(k7))
            if speed < STAGNATION_SPEED:
                raise StagnationPoint(f"|w| < {STAGNATION_SPEED:g} at s = {s + h:.6g}")
            c_new = float((y_new - start_pt) @ n_hat)
            if armed and c_prev < 0.0 <= c_new:
                h_cross, y_cross = _rk.bisect_event(
                    rhs, s, y, h, k1,
                    test=lambda yy: float((yy - start_pt) @ n_hat),
                    tol_s=1e-12)
                vel = rhs(s + h_cross, y_cross)
                cosang = float(vel @ n_hat) / max(np.linalg.norm(vel), 1e-300)
                if (float(np.linalg.norm(y_cross - start_pt)) < CLOSURE_DIST
                        and cosang > CLOSURE_COS):
                    ss.append(s + h_cross)
                    pts.append(y_cross.copy())
                    outcome = CLOSES_UP
                    break
            s += h
            y = y_new
            c_prev = c_new
            if not armed and float(np.linalg.norm(y - start_pt)) > ARM_DIST:
                armed = True
            ss.append(s)
            pts.append(y.copy())
            k1 = k7
            if not f.domain.contains(y):
                outcome = EXITS_DOMAIN
                break
        else:
            k1 = None
        h = _rk.next_step_size(h, errn)
    return FlowTrace(s=np.asarray(ss), points=np.asarray(pts), outcome=outcome)


@dataclass(frozen=True)
class DensityConditionReport:
    """Sampled check of the dense-trajectory hypothesis: fraction of seed
    points whose trajectory (traced both directions) exits the domain or
    closes up. Never a proof, only coverage."""
    seeds: int
    good: int
    undecided: int
    stagnant: int

    @property
    def coverage(self) -> float:
        return self.good / self.seeds if self.seeds else 0.0


def density_condition_report(f: MediumFlow, seeds_per_axis: int = 32,
                             s_max: float = 100.0) -> DensityConditionReport:
    pts = f.domain.sample_grid(seeds_per_axis)
    good = undecided = stagnant = 0
    reverse = MediumFlow(kind=f.kind, dim=f.dim,
                         w=VectorField(value=lambda x: -np.asarray(f.w.value(x)),
                                       jacobian=lambda x: -np.asarray(f.w.jacobian(x))),
                         c=f.c, domain=f.domain, n_refr=f.n_refr, rho=f.rho)
    for p in pts:
        try:
            fwd = trace_flow(f, p, s_max)
            if fwd.outcome == CLOSES_UP:
                good += 1
                continue
            bwd = trace_flow(reverse, p, s_max)
            if fwd.outcome == EXITS_DOMAIN and bwd.outcome == EXITS_DOMAIN:
                good += 1
            else:
                undecided += 1
        except StagnationPoint:
            stagnant += 1
    return DensityConditionReport(seeds=len(pts), good=good,
                                  undecided=undecided, stagnant=stagnant)


# ---------------------------------------------------------------------------
# Preset flows

def vortex_flow(A: float, B: float, domain, c: float = 1.0, rho: float = 1.0,
                kind: str = ACOUSTIC, n_refr: float = 1.0) -> MediumFlow:
    """Vortex velocity field (A/r) rhat + (B/r) thetahat about the origin."""

    def value(x):
        x1, x2 = float(x[0]), float(x[1])
        rr = x1 * x1 + x2 * x2
        out = np.empty(2)
        out[0] = (A * x1 - B * x2) / rr
        out[1] = (A * x2 + B * x1) / rr
        return out

    def jacobian(x):
        x1, x2 = float(x[0]), float(x[1])
        rr = x1 * x1 + x2 * x2
        rr2 = rr * rr
        w1 = A * x1 - B * x2
        w2 = A * x2 + B * x1
        out = np.empty((2, 2))
        out[0, 0] = (A * rr - 2 * x1 * w1) / rr2
        out[0, 1] = (-B * rr - 2 * x2 * w1) / rr2
        out[1, 0] = (B * rr - 2 * x1 * w2) / rr2
        out[1, 1] = (A * rr - 2 * x2 * w2) / rr2
        return out

    w = VectorField(value=value, jacobian=jacobian)
    if kind == ACOUSTIC:
        return MediumFlow(kind=ACOUSTIC, dim=2, w=w, c=c, domain=domain,
                          rho=ScalarField.constant(rho, 2),
                          name=f"vortex(A={A:g},B={B:g})")
    return MediumFlow(kind=GORDON, dim=2, w=w, c=c, domain=domain,
                      n_refr=ScalarField.constant(n_refr, 2),
                      name=f"vortex(A={A:g},B={B:g})")


def radial_profile_flow(a_coeffs, b_coeffs, domain, c: float = 1.0,
                        rho: float = 1.0) -> MediumFlow:
    """Acoustic flow A(r) rhat + B(r) thetahat with polynomial profiles
    (coefficients in ascending degree)."""
    a_coeffs = np.asarray(a_coeffs, dtype=float)
    b_coeffs = np.asarray(b_coeffs, dtype=float)
    da = P.polyder(a_coeffs)
    db = P.polyder(b_coeffs)

    def value(x):
        x1, x2 = float(x[0]), float(x[1])
        r = math.hypot(x1, x2)
        av = P.polyval(r, a_coeffs)
        bv = P.polyval(r, b_coeffs)
        return np.array([(av * x1 - bv * x2) / r, (av * x2 + bv * x1) / r])

    def jacobian(x):
        x1, x2 = float(x[0]), float(x[1])
        r = math.hypot(x1, x2)
        av = P.polyval(r, a_coeffs)
        bv = P.polyval(r, b_coeffs)
        dav = P.polyval(r, da)
        dbv = P.polyval(r, db)
        rh = np.array([x1 / r, x2 / r])
        th = np.array([-x2 / r, x1 / r])
        # d rhat_i / d x_j = delta_ij / r - x_i x_j / r^3 ; similarly thetahat
        drh = np.eye(2) / r - np.outer(rh, rh) / r
        dth = np.array([[x2 * x1, x2 * x2], [-x1 * x1, -x1 * x2]]) / r ** 3
        dth += np.array([[0.0, -1.0], [1.0, 0.0]]) / r
        jac = np.outer(rh, rh) * dav + av * drh
        jac += np.outer(th, rh) * dbv + bv * dth
        return jac

    return MediumFlow(kind=ACOUSTIC, dim=2,
                      w=VectorField(value=value, jacobian=jacobian),
                      c=c, domain=domain, rho=ScalarField.constant(rho, 2),
                      name="radial_profile")


def uniform_flow(w_vec, domain, c: float = 1.0, n_refr: float = 1.0,
                 kind: str = GORDON, rho: float = 1.0) -> MediumFlow:
    w_vec = np.asarray(w_vec, dtype=float)
    dim = w_vec.size
    w = VectorField(value=lambda x: w_vec.copy(),
                    jacobian=lambda x: np.zeros((dim, dim)))
    if kind == GORDON:
        return MediumFlow(kind=GORDON, dim=dim, w=w, c=c, domain=domain,
                          n_refr=ScalarField.constant(n_refr, dim), name="uniform")
    return MediumFlow(kind=ACOUSTIC, dim=dim, w=w, c=c, domain=domain,
                      rho=ScalarField.constant(rho, dim), name="uniform")


def radial_gordon_flow(A: float, domain, c: float = 2.0,
                       n_refr: float = 2.0) -> MediumFlow:
    """Purely radial optical flow (A/r) rhat; ergosphere at r = |A| n / c."""
    return vortex_flow(A, 0.0, domain, c=c, kind=GORDON, n_refr=n_refr)
