"""Characteristic direction fields on a 2D ergoregion.

Inside the ergoregion the spatial quadratic form has signature (1,-1), so the
eikonal equation factors into two families of characteristic curves. This
module builds the two continuous direction fields f+, f- on the closed
ergoregion, the kernel direction b on the ergosphere where the spatial block
drops to rank 1, the inner-boundary flux test, the closed-form vortex and
radial-profile fields, and the axisymmetric 3D -> 2D reduction.

Patch representations at a point (D = det of the spatial block):

    f+ in {(g12 - sqrt(-D), g22), (g11, g12 + sqrt(-D))}
    f- in {(g12 + sqrt(-D), g22), (g11, g12 - sqrt(-D))}

Family labels follow the polar worked examples of the vortex flow (the plus
family carries the limit cycle when the radial coefficient is positive); in
Cartesian components that pairs each family with the opposite sqrt sign than
in polar ones, because the change of basis swaps the root order. Each family
uses whichever of its two representations has the larger norm at the point
(the rejected one can degenerate to zero there). Both representations of one
family are parallel; their relative sign can flip across patch switches, so
per trajectory a small context object keeps the direction coherent by
flipping against the previously returned vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (CharacteristicS1, HypothesisViolation, NotAxisymmetric,
                     NotOnErgosphere, RankCollapse, ZeroTimeCoupling)
from .metric import MetricField, make_fd_grad

PLUS = "Plus"
MINUS = "Minus"

ALL_OUTWARD = "AllOutward"
ALL_INWARD = "AllInward"
MIXED = "Mixed"

# sqrt(-Delta) is clamped to zero in a band of width 1e-14 around Delta = 0
# so the two families coincide exactly at float-representable ergosphere
# points (rounding leaves |Delta| ~ 1e-16 there, which a sqrt would amplify
# to ~1e-8 of spurious field splitting).
DELTA_CLAMP = 1e-14
ON_S_TOL = 1e-8


def sqrt_neg_delta(delta: float) -> float:
    if delta > -DELTA_CLAMP:
        return 0.0
    return math.sqrt(-delta)


@dataclass(frozen=True)
class ErgoRegion:
    """Annular ergoregion: outer boundary S on Delta = 0, inner boundary S1.

    S samples are angle-ordered and Newton-polished to |Delta| <~ 1e-13; the
    region is assumed star-shaped about `center` (true for the scenarios this
    toolkit targets; validated by the Delta < 0 interior check).
    """
    metric: MetricField
    center: np.ndarray
    s_points: np.ndarray
    s1_points: np.ndarray
    r_inner: float
    annulus: bool = True

    @property
    def diameter(self) -> float:
        return 2.0 * float(np.max(np.linalg.norm(self.s_points - self.center, axis=1)))

    def spatial_block(self, x) -> np.ndarray:
        return self.metric.eval(np.asarray(x, dtype=float))[1:, 1:]

    def delta(self, x) -> float:
        b = self.spatial_block(x)
        return b[0, 0] * b[1, 1] - b[0, 1] * b[0, 1]

    def delta_grad(self, x) -> np.ndarray:
        g = self.metric.eval(np.asarray(x, dtype=float))
        dg = self.metric.grad(np.asarray(x, dtype=float))
        b = g[1:, 1:]
        out = np.empty(2)
        for p in range(2):
            db = dg[p][1:, 1:]
            out[p] = db[0, 0] * b[1, 1] + b[0, 0] * db[1, 1] - 2.0 * b[0, 1] * db[0, 1]
        return out

    def s_outward_normal(self, y) -> np.ndarray:
        grad = self.delta_grad(y)
        n = np.linalg.norm(grad)
        if n == 0.0:
            raise NotOnErgosphere(f"grad Delta vanishes at {y}")
        return grad / n

    def s1_normal_away_from_hole(self, y) -> np.ndarray:
        d = np.asarray(y, dtype=float) - self.center
        return d / np.linalg.norm(d)

    def escape_check(self, x) -> Optional[str]:
        """None while x is in the closed ergoregion, else the boundary name."""
        x = np.asarray(x, dtype=float)
        if self.annulus and np.linalg.norm(x - self.center) < self.r_inner:
            return "inner"
        if self.delta(x) > ON_S_TOL:
            return "ergosphere"
        if not self.metric.domain.contains(x, slack=1e-9):
            return "domain"
        return None


def _polish_on_delta(metric: MetricField, center, direction, r_est,
                     max_iter: int = 60) -> float:
    """Newton-polish the radius where Delta = 0 along center + r*direction."""

    def delta_at(r):
        b = metric.eval(center + r * direction)[1:, 1:]
        return b[0, 0] * b[1, 1] - b[0, 1] * b[0, 1]

    r = r_est
    h = max(1e-7, 1e-9 * abs(r_est))
    for _ in range(max_iter):
        d = delta_at(r)
        if abs(d) < 1e-13:
            break
        slope = (delta_at(r + h) - delta_at(r - h)) / (2 * h)
        if slope == 0.0:
            break
        step = d / slope
        if abs(step) < 1e-16 * max(1.0, abs(r)):
            break
        r -= step
    return r


def locate_ergo_region(metric: MetricField, n_samples: int = 256,
                       center=None, bisect_tol: float = 1e-9,
                       r_min: Optional[float] = None) -> ErgoRegion:
    """Find the Delta = 0 curve by bisection along radial lines, then Newton
    polish; the inner boundary is the domain's inner edge.

    For annulus domains the inner radius must lie inside the ergoregion.
    For hole-less domains (or with r_min = None on a box) each ray is scanned
    outward for the outermost Delta < 0 stretch before bisecting.
    """
    domain = metric.domain
    if center is None:
        center = getattr(domain, "center", np.zeros(metric.dim))
    center = np.asarray(center, dtype=float)
    r_lo = getattr(domain, "r_inner", 0.0)
    if r_min is not None:
        r_lo = max(r_lo, r_min)
    r_hi = getattr(domain, "r_outer", None)
    if r_hi is None:
        r_hi = 0.5 * domain.diameter

    def delta_at(r, direction):
        b = metric.eval(center + r * direction)[1:, 1:]
        return b[0, 0] * b[1, 1] - b[0, 1] * b[0, 1]

    angles = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
    s_pts = []
    for ang in angles:
        direction = np.array([math.cos(ang), math.sin(ang)])
        a, b = r_lo, r_hi
        fa = delta_at(a, direction) if a > 0.0 else 1.0
        if fa >= 0.0:
            # no bracket anchored at the inner edge: scan for the outermost
            # negative stretch along this ray
            scan = np.linspace(max(r_lo, 1e-3 * r_hi), r_hi, 64)
            vals = [delta_at(r, direction) for r in scan]
            bracket = None
            for i in range(len(scan) - 1, 0, -1):
                if vals[i - 1] < 0.0 <= vals[i]:
                    bracket = (scan[i - 1], scan[i])
                    break
            if bracket is None:
                raise NotOnErgosphere(
                    f"no Delta sign change along angle {ang:.3f}; no ergoregion")
            a, b = bracket
        else:
            if delta_at(b, direction) < -1e-10:
                raise NotOnErgosphere(
                    f"Delta < 0 at outer radius along angle {ang:.3f}; "
                    "S not in domain")
        while b - a > bisect_tol:
            mid = 0.5 * (a + b)
            if delta_at(mid, direction) < 0.0:
                a = mid
            else:
                b = mid
        r_s = _polish_on_delta(metric, center, direction, 0.5 * (a + b))
        s_pts.append(center + r_s * direction)
    s_pts = np.asarray(s_pts)

    s1_pts = np.asarray([center + r_lo * np.array([math.cos(a), math.sin(a)])
                         for a in angles]) if r_lo > 0 else np.empty((0, 2))

    region = ErgoRegion(metric=metric, center=center, s_points=s_pts,
                        s1_points=s1_pts, r_inner=r_lo, annulus=r_lo > 0)
    # interior audit: Delta strictly negative between the boundaries (for a
    # hole-less domain only a band inside S is claimed)
    fractions = (0.25, 0.5, 0.75) if r_lo > 0 else (0.7, 0.85, 0.95)
    for ang, s_pt in zip(angles[::8], s_pts[::8]):
        direction = np.array([math.cos(ang), math.sin(ang)])
        r_s = float(np.linalg.norm(s_pt - center))
        for t in fractions:
            r = r_lo + t * (r_s - r_lo)
            if r > 1e-12 and delta_at(r, direction) >= 0.0:
                raise NotOnErgosphere(
                    f"Delta >= 0 inside the ergoregion at r = {r:.6g}, angle {ang:.3f}")
    return region


@dataclass(frozen=True)
class CharFieldPair:
    """Evaluators for the two characteristic direction fields on the closed
    ergoregion. `direction` is stateless with a deterministic local sign;
    use `context` for sign-coherent evaluation along a trajectory."""
    metric: MetricField
    region: ErgoRegion

    def raw(self, which: str, x) -> tuple[np.ndarray, str]:
        """Unnormalized field and the patch tag used at x."""
        b = self.metric.eval(np.asarray(x, dtype=float))[1:, 1:]
        g11, g12, g22 = b[0, 0], b[0, 1], b[1, 1]
        if max(abs(g11), abs(g12), abs(g22)) < 1e-14:
            raise RankCollapse(f"spatial block vanishes at {x}")
        sq = sqrt_neg_delta(g11 * g22 - g12 * g12)
        sign = -1.0 if which == PLUS else 1.0
        rep_a = np.array([g12 + sign * sq, g22])
        rep_b = np.array([g11, g12 - sign * sq])
        if float(rep_a @ rep_a) >= float(rep_b @ rep_b):
            return rep_a, "g22"
        return rep_b, "g11"

    def direction(self, which: str, x) -> tuple[np.ndarray, str]:
        """Unit direction with a fixed (possibly discontinuous) sign: the
        representative with non-negative second component (ties broken by
        the first)."""
        f, tag = self.raw(which, x)
        f = f / math.sqrt(f[0] * f[0] + f[1] * f[1])
        if f[1] < 0.0 or (f[1] == 0.0 and f[0] < 0.0):
            f = -f
        return f, tag

    def f_plus(self, x) -> np.ndarray:
        return self.direction(PLUS, x)[0]

    def f_minus(self, x) -> np.ndarray:
        return self.direction(MINUS, x)[0]

    def context(self, which: str, seed_sign: Optional[np.ndarray] = None) -> "FieldContext":
        return FieldContext(self, which, seed_sign)

    def inward_at_s(self, which: str, y) -> np.ndarray:
        """Field at an ergosphere point oriented into the ergoregion."""
        f, _ = self.direction(which, y)
        if float(f @ self.region.delta_grad(y)) > 0.0:
            f = -f
        return f


class FieldContext:
    """Per-trajectory sign-coherent field evaluation (not thread-shared)."""

    def __init__(self, pair: CharFieldPair, which: str,
                 seed_direction: Optional[np.ndarray] = None):
        self.pair = pair
        self.which = which
        self.prev = None if seed_direction is None else np.asarray(seed_direction, float)

    def direction(self, x) -> np.ndarray:
        d, _ = self.pair.direction(self.which, x)
        if self.prev is not None and float(d @ self.prev) < 0.0:
            d = -d
        self.prev = d
        return d


def build_char_fields(metric: MetricField, region: ErgoRegion) -> CharFieldPair:
    """Construct the field pair and audit its defining properties on samples."""
    if metric.dim != 2:
        raise ValueError("characteristic fields are a 2D construction")
    pair = CharFieldPair(metric=metric, region=region)
    # boundary coincidence + transversality audit on a light subsample
    for y in region.s_points[:: max(1, len(region.s_points) // 16)]:
        fp, _ = pair.direction(PLUS, y)
        fm, _ = pair.direction(MINUS, y)
        if abs(fp[0] * fm[1] - fp[1] * fm[0]) > 1e-10:
            raise RankCollapse(f"f+ and f- split on S at {y}")
    return pair


def kernel_direction(metric: MetricField, y) -> np.ndarray:
    """Unit kernel direction b(y) of the rank-1 spatial block on S, oriented
    so the time coupling sum g^{0j} b_j is positive."""
    y = np.asarray(y, dtype=float)
    g = metric.eval(y)
    b = g[1:, 1:]
    delta = b[0, 0] * b[1, 1] - b[0, 1] * b[0, 1]
    if abs(delta) > ON_S_TOL:
        raise NotOnErgosphere(f"Delta = {delta:.3e} at {y}")
    cand1 = np.array([-b[0, 1], b[0, 0]])
    cand2 = np.array([b[1, 1], -b[0, 1]])
    vec = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
    n = np.linalg.norm(vec)
    if n < 1e-14:
        raise RankCollapse(f"spatial block vanishes at {y}")
    vec = vec / n
    coupling = float(g[0, 1:] @ vec)
    if abs(coupling) < 1e-12:
        raise ZeroTimeCoupling(
            f"sum g^0j b_j = {coupling:.3e} at {y}; inconsistent metric")
    return vec if coupling > 0.0 else -vec


@dataclass(frozen=True)
class FluxTestReport:
    verdict: str
    dots: np.ndarray          # (n_samples, 2) N . xdot for the two families
    offending: np.ndarray     # sample indices with mixed sign, empty otherwise


def s1_flux_test(metric: MetricField, region: ErgoRegion,
                 n_samples: int = 256) -> FluxTestReport:
    """Crossing direction of forward null rays at the inner boundary.

    At each S1 sample the two characteristic branches give null covectors
    (0, nu) with nu = perp(f); the sign of each is fixed by dx0/ds > 0 and
    the projected velocity xdot = 2 G nu is tested against the unit normal N
    pointing away from the region S1 encloses. AllOutward: every branch at
    every sample crosses away from the hole; AllInward: every branch crosses
    toward it.
    """
    if region.s1_points.shape[0] == 0:
        raise CharacteristicS1("region has no inner boundary")
    pair = CharFieldPair(metric=metric, region=region)
    idx = np.linspace(0, len(region.s1_points) - 1, n_samples).astype(int)
    idx = np.unique(idx)
    samples = region.s1_points[idx]
    dots = np.empty((len(samples), 2))
    for i, y in enumerate(samples):
        g = metric.eval(y)
        block = g[1:, 1:]
        n_vec = region.s1_normal_away_from_hole(y)
        if abs(float(n_vec @ block @ n_vec)) <= 1e-10 * np.abs(block).max():
            raise CharacteristicS1(f"S1 characteristic at {y}")
        for j, which in enumerate((PLUS, MINUS)):
            f, _ = pair.direction(which, y)
            nu = np.array([-f[1], f[0]])
            x0dot = 2.0 * float(g[0, 1:] @ nu)
            if x0dot < 0.0:
                nu = -nu
            xdot = 2.0 * (block @ nu)
            dots[i, j] = float(n_vec @ xdot)
    tol = 1e-12 * max(1.0, float(np.abs(dots).max()))
    if np.all(dots > tol):
        verdict = ALL_OUTWARD
    elif np.all(dots < -tol):
        verdict = ALL_INWARD
    else:
        verdict = MIXED
    offending = (np.flatnonzero(~np.all(np.sign(dots) == np.sign(dots[0, 0]), axis=1))
                 if verdict == MIXED else np.empty(0, dtype=int))
    return FluxTestReport(verdict=verdict, dots=dots, offending=offending)


# ---------------------------------------------------------------------------
# Closed forms for the vortex flow (A/r) rhat + (B/r) thetahat, c = rho = 1

A_POS = "APos"
A_NEG = "ANeg"


@dataclass(frozen=True)
class PolarFieldPair:
    """Desingularized characteristic fields in polar components.

    rhs(which, r) returns (dr/ds, dtheta/ds); the cartesian tangent of the
    curve at x is (dr/ds) rhat + r (dtheta/ds) thetahat.
    """
    rhs: Callable[[str, float], tuple[float, float]]
    r_ergo: float

    def cartesian_direction(self, which: str, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        dr, dth = self.rhs(which, r)
        rhat = x / r
        that = np.array([-x[1], x[0]]) / r
        v = dr * rhat + r * dth * that
        return v / np.linalg.norm(v)


def polar_vortex_fields(A: float, B: float, sign_case: str) -> PolarFieldPair:
    """Closed-form field pair for the vortex; APos assumes A > 0, ANeg A < 0.

    The non-degenerate family keeps (A^2 - r^2, AB/r +/- sqrt(A^2+B^2-r^2));
    the other is divided through by r^2 - A^2 so its zero at r = |A| is
    removable.
    """
    if B == 0.0:
        raise ValueError("polar closed forms require B != 0")
    if sign_case == A_POS and A <= 0 or sign_case == A_NEG and A >= 0:
        raise ValueError(f"sign_case {sign_case} inconsistent with A = {A:g}")
    r2 = A * A + B * B

    def sq(r):
        val = r2 - r * r
        return math.sqrt(val) if val > 0.0 else 0.0

    if sign_case == A_POS:
        def rhs(which, r):
            if which == PLUS:
                return (A * A - r * r, A * B / r + sq(r))
            return (-1.0, (1.0 - B * B / (r * r)) / (A * B / r + sq(r)))
    else:
        def rhs(which, r):
            if which == PLUS:
                return (-1.0, (1.0 - B * B / (r * r)) / (A * B / r - sq(r)))
            return (A * A - r * r, A * B / r - sq(r))

    return PolarFieldPair(rhs=rhs, r_ergo=math.sqrt(r2))


# ---------------------------------------------------------------------------
# Radial-profile fields A(r) rhat + B(r) thetahat (ascending coefficients)

NEAR_POLE = 1e-6


@dataclass(frozen=True)
class RadialProfileFields:
    a_coeffs: np.ndarray
    b_coeffs: np.ndarray
    r1: float
    r0: float
    plus_zeros: np.ndarray    # zeros of A - 1 (invariant circles of the + family)
    minus_zeros: np.ndarray   # zeros of A + 1

    def profile(self, r: float) -> tuple[float, float]:
        return (float(P.polyval(r, self.a_coeffs)), float(P.polyval(r, self.b_coeffs)))

    def rhs(self, which: str, r: float) -> tuple[float, float]:
        a, b = self.profile(r)
        x = a * a + b * b - 1.0
        sq = math.sqrt(x) if x > 0.0 else 0.0
        if which == PLUS:
            if abs(a + 1.0) > NEAR_POLE:
                return (a - 1.0, (a * b + sq) / (a + 1.0))
            # conjugate form: (ab + sq)/(a+1) = (a-1)(b^2-1)/(ab - sq)
            return (a - 1.0, (a - 1.0) * (b * b - 1.0) / (a * b - sq))
        if abs(a - 1.0) > NEAR_POLE:
            return (a + 1.0, (a * b - sq) / (a - 1.0))
        return (a + 1.0, (a + 1.0) * (b * b - 1.0) / (a * b + sq))

    def cartesian_direction(self, which: str, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        dr, dth = self.rhs(which, r)
        rhat = x / r
        that = np.array([-x[1], x[0]]) / r
        v = dr * rhat + r * dth * that
        return v / np.linalg.norm(v)


def _simple_zeros(coeffs, r1, r0, n_scan=2048):
    rs = np.linspace(r1, r0, n_scan)
    vals = P.polyval(rs, coeffs)
    zeros = []
    for i in range(n_scan - 1):
        if vals[i] == 0.0:
            zeros.append(rs[i])
        elif vals[i] * vals[i + 1] < 0.0:
            a, b = rs[i], rs[i + 1]
            for _ in range(80):
                mid = 0.5 * (a + b)
                if P.polyval(a, coeffs) * P.polyval(mid, coeffs) <= 0.0:
                    b = mid
                else:
                    a = mid
            zeros.append(0.5 * (a + b))
    return np.asarray(zeros)


def radial_profile_fields(a_coeffs, b_coeffs, r1: float, r0: float,
                          slack: float = 1e-8) -> RadialProfileFields:
    """Validated desingularized field pair for polynomial radial profiles.

    Hypotheses checked (HypothesisViolation names the failing clause):
    A(r0)^2 + B(r0)^2 = 1; A^2 + B^2 > 1 on [r1, r0); B > 0 on [r1, r0];
    |A(r1)| > 1; zeros of A -/+ 1 in (r1, r0) simple and pairwise distinct.
    """
    a_coeffs = np.asarray(a_coeffs, dtype=float)
    b_coeffs = np.asarray(b_coeffs, dtype=float)
    a0, b0 = P.polyval(r0, a_coeffs), P.polyval(r0, b_coeffs)
    if abs(a0 * a0 + b0 * b0 - 1.0) > slack:
        raise HypothesisViolation(
            "A(r0)^2 + B(r0)^2 = 1",
            f"A(r0)^2 + B(r0)^2 = {a0 * a0 + b0 * b0:.9g} != 1")
    rs = np.linspace(r1, r0, 1024, endpoint=False)
    av, bv = P.polyval(rs, a_coeffs), P.polyval(rs, b_coeffs)
    if np.any(av * av + bv * bv <= 1.0 + slack * 0.0):
        bad = rs[np.argmin(av * av + bv * bv)]
        raise HypothesisViolation(
            "A^2 + B^2 > 1 on [r1, r0)",
            f"A^2 + B^2 <= 1 at r = {bad:.6g}")
    if np.any(bv <= 0.0) or P.polyval(r0, b_coeffs) <= 0.0:
        raise HypothesisViolation("B > 0 on [r1, r0]")
    a_r1 = P.polyval(r1, a_coeffs)
    if abs(a_r1) <= 1.0 + slack * 0.0:
        raise HypothesisViolation(
            "|A(r1)| > 1", f"|A(r1)| = {abs(a_r1):.9g} <= 1")
    da = P.polyder(a_coeffs)
    plus_zeros = _simple_zeros(P.polysub(a_coeffs, [1.0]), r1, r0)
    minus_zeros = _simple_zeros(P.polyadd(a_coeffs, [1.0]), r1, r0)
    for z in plus_zeros:
        if abs(P.polyval(z, da)) < 1e-10:
            raise HypothesisViolation("A - 1 has simple zeros",
                                      f"A'({z:.6g}) ~ 0")
    for z in minus_zeros:
        if abs(P.polyval(z, da)) < 1e-10:
            raise HypothesisViolation("A + 1 has simple zeros",
                                      f"A'({z:.6g}) ~ 0")
    both = np.concatenate([plus_zeros, minus_zeros])
    if both.size > 1 and np.min(np.diff(np.sort(both))) < 1e-8:
        raise HypothesisViolation("zeros of A - 1 and A + 1 distinct")
    return RadialProfileFields(a_coeffs=a_coeffs, b_coeffs=b_coeffs,
                               r1=r1, r0=r0, plus_zeros=plus_zeros,
                               minus_zeros=minus_zeros)


# ---------------------------------------------------------------------------
# Axisymmetric 3D -> 2D reduction

def reduce_axisymmetric(m3: MetricField, r_bounds, theta_bounds,
                        check_points: int = 8, tol: float = 1e-10) -> MetricField:
    """Reduce a phi-independent 3D metric to effective 2D coefficients on the
    (r, theta) strip.

    Axisymmetry is checked as rotation equivariance of the Cartesian
    components: G(R x) = R~ G(x) R~^T for rotations R about the x3 axis with
    R~ = diag(1, R). The reduced contravariant components are
    a^{ab} = sum g^{jk} du_a/dx_j du_b/dx_k with u = (x0, r, theta),
    evaluated on the phi = 0 half-plane.
    """
    if m3.dim != 3:
        raise ValueError("reduce_axisymmetric expects a 3D metric")
    from .domains import BoxDomain

    rng = np.random.default_rng(0)
    for _ in range(check_points):
        r = rng.uniform(*r_bounds)
        th = rng.uniform(*theta_bounds)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        x = np.array([r * math.sin(th), 0.0, r * math.cos(th)])
        c, s = math.cos(phi), math.sin(phi)
        rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        rot4 = np.zeros((4, 4))
        rot4[0, 0] = 1.0
        rot4[1:, 1:] = rot
        lhs = m3.eval(rot @ x)
        rhs = rot4 @ m3.eval(x) @ rot4.T
        if np.max(np.abs(lhs - rhs)) > tol:
            raise NotAxisymmetric(
                f"components differ by {np.max(np.abs(lhs - rhs)):.3e} under rotation")

    def eval2(u):
        r, th = float(u[0]), float(u[1])
        x = np.array([r * math.sin(th), 0.0, r * math.cos(th)])
        st, ct = math.sin(th), math.cos(th)
        jac = np.zeros((3, 4))
        jac[0, 0] = 1.0
        jac[1, 1:] = [st, 0.0, ct]
        jac[2, 1:] = [ct / r, 0.0, -st / r]
        return jac @ m3.eval(x) @ jac.T

    domain = BoxDomain(lo=[r_bounds[0], theta_bounds[0]],
                       hi=[r_bounds[1], theta_bounds[1]])
    h = 1e-5 * domain.diameter
    return MetricField(dim=2, eval=eval2, grad=make_fd_grad(eval2, 2, h),
                       domain=domain, name=f"{m3.name}:axisym")
