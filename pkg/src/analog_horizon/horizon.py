"""Horizon location and classification.

A horizon inside the ergoregion is a closed characteristic curve: a limit
cycle of one of the two direction fields. Cycles are found by integrating
the unit field, recording crossings of a radial Poincare section, iterating
the return map on crossing radii, and refining its fixed point by secant
iteration. Each closed orbit (and the ergosphere itself when it is
characteristic) is classified black or white by the sign of
beta(y) = sum_j g^{0j}(y) nu_j(y) over the curve, with nu the outward unit
normal: positive beta tilts the forward cones outward (white), negative
tilts them inward (black).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _rk
from .charfields import MINUS, PLUS, CharFieldPair, ErgoRegion, FieldContext
from .errors import EscapedRegion, NoConvergence, NotCharacteristic
from .media import MediumFlow
from .metric import MetricField

BLACK = "Black"
WHITE = "White"
UNDETERMINED = "Undetermined"

ERGOSPHERE_CHARACTERISTIC = "ErgosphereCharacteristic"
LIMIT_CYCLE = "LimitCycle"

INCOMING = "Incoming"
OUTGOING = "Outgoing"
MIXED_FLOW = "Mixed"

BETA_TOL = 1e-10
CHAR_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class CycleOptions:
    section_angle: float = 0.0
    tol_fixed: float = 1e-10
    max_windings: int = 200
    rel_tol: float = 1e-9
    abs_tol: float = 1e-10
    reverse: bool = False
    n_resample: int = 512
    max_sigma: float = 2000.0


@dataclass
class ClosedOrbit:
    points: np.ndarray            # (M, 2), closed polyline, endpoint not repeated
    normals: np.ndarray           # (M, 2) outward unit characteristic normals
    period: float                 # sigma length of one loop (unit field: arclength)
    closure_residual: float
    mean_radius: float
    radius_deviation: float
    field_used: str
    winding: int
    reversed_flow: bool
    center: np.ndarray


@dataclass
class HoleReport:
    classification: str
    method: str
    beta_samples: np.ndarray
    residual_max: float
    orbit: Optional[ClosedOrbit] = None
    tangential_degenerate: bool = False
    deferred: bool = False
    flow_check: Optional[str] = None


class _SectionTracer:
    """Integrates d x / d sigma = f(x) for a sign-coherent field context and
    yields section crossings localized by bisecting the final step."""

    def __init__(self, pair: CharFieldPair, which: str, opts: CycleOptions,
                 seed_direction: Optional[np.ndarray] = None):
        self.pair = pair
        self.region = pair.region
        self.which = which
        self.opts = opts
        self.ctx = FieldContext(pair, which, seed_direction)
        flip = -1.0 if opts.reverse else 1.0
        self.flip = flip

    def rhs(self, s, y):
        return self.flip * self.ctx.direction(y)

    def angle(self, y) -> float:
        d = y - self.region.center
        return math.atan2(d[1], d[0])

    def run(self, start, n_crossings: int, collect=None):
        """Integrate until n_crossings section crossings; returns list of
        (sigma, point) crossings. Raises EscapedRegion on leaving the region.
        `collect` gathers every accepted state when provided."""
        opts = self.opts
        y = np.asarray(start, dtype=float).copy()
        # prime the context at the seed
        self.ctx.direction(y)
        sigma = 0.0
        theta = self.angle(y)
        target_angle = opts.section_angle
        # next multiple of 2*pi + section angle in the direction of travel
        crossings = []
        h = 0.01
        k1 = None
        if collect is not None:
            collect.append((sigma, y.copy()))
        # establish rotation sense from the first step direction
        sense = 0.0
        attempts = 0
        while len(crossings) < n_crossings:
            attempts += 1
            if attempts > 200000 or sigma > opts.max_sigma:
                raise NoConvergence(
                    f"no section crossing after sigma = {sigma:.3g}")
            if h < _rk.MIN_STEP:
                raise NoConvergence(f"step underflow at sigma = {sigma:.6g}")
            y_new, err, k1, k7 = _rk.dp_step(self.rhs, sigma, y, h, k1)
            errn = _rk.error_norm(err, y, y_new, opts.rel_tol, opts.abs_tol)
            if errn > 1.0:
                k1 = None
                h = _rk.next_step_size(h, errn)
                continue
            boundary = self.region.escape_check(y_new)
            if boundary is not None:
                raise EscapedRegion(boundary)
            dtheta = self._wrap(self.angle(y_new) - self.angle(y))
            theta_new = theta + dtheta
            if sense == 0.0 and dtheta != 0.0:
                sense = math.copysign(1.0, dtheta)
                # first section target strictly ahead of the seed angle
                k_idx = math.floor((theta - target_angle) / (2 * math.pi)) + (
                    1 if sense > 0 else 0)
                target = target_angle + 2 * math.pi * k_idx
                if sense > 0 and target <= theta:
                    target += 2 * math.pi
                if sense < 0 and target >= theta:
                    target -= 2 * math.pi
                self._target = target
            if sense != 0.0:
                crossed = (theta_new - self._target) * sense >= 0.0 > (
                    theta - self._target) * sense
                if crossed:
                    theta_base = theta

                    def test(yy, base=y):
                        d = self._wrap(self.angle(yy) - self.angle(base))
                        return (theta_base + d - self._target) * sense

                    h_cross, y_cross = _rk.bisect_event(
                        self.rhs, sigma, y, h, k1, test, tol_s=1e-12)
                    crossings.append((sigma + h_cross, y_cross))
                    self._target += sense * 2 * math.pi
            sigma += h
            y = y_new
            theta = theta_new
            k1 = k7
            if collect is not None:
                collect.append((sigma, y.copy()))
            h = _rk.next_step_size(h, errn)
        return crossings

    @staticmethod
    def _wrap(a: float) -> float:
        while a > math.pi:
            a -= 2 * math.pi
        while a < -math.pi:
            a += 2 * math.pi
        return a


def _section_point(region: ErgoRegion, r: float, angle: float) -> np.ndarray:
    return region.center + r * np.array([math.cos(angle), math.sin(angle)])


def find_limit_cycle(pair: CharFieldPair, which: str, seeds,
                     opts: CycleOptions = CycleOptions(),
                     known_radii=()) -> ClosedOrbit:
    """Locate a limit cycle of the chosen field from the given seeds.

    Iterates the radial return map at opts.section_angle until contraction,
    then refines the fixed point by secant iteration to
    |R(r) - r| <= opts.tol_fixed. Raises EscapedRegion when every seed's
    trajectory leaves the ergoregion and NoConvergence when the winding
    budget is exhausted. Seeds whose return radii settle within 1e-4 of a
    radius in `known_radii` abort early (duplicate of a known cycle).
    """
    region = pair.region
    last_escape = None
    for seed in np.atleast_2d(np.asarray(seeds, dtype=float)):
        try:
            return _cycle_from_seed(pair, which, seed, opts, known_radii)
        except EscapedRegion as exc:
            last_escape = exc
            continue
        except _DuplicateCycle:
            last_escape = EscapedRegion("duplicate",
                                        "converges to an already known cycle")
            continue
    if last_escape is not None:
        raise last_escape
    raise NoConvergence("no seed produced a cycle")


class _DuplicateCycle(Exception):
    pass


def _seed_direction(pair: CharFieldPair, which: str, seed: np.ndarray):
    """Initial orientation: into the ergoregion from S, away from the hole
    near S1, otherwise the stateless convention."""
    region = pair.region
    f, _ = pair.direction(which, seed)
    if abs(region.delta(seed)) < 1e-6:
        grad = region.delta_grad(seed)
        return -f if float(f @ grad) > 0.0 else f
    r = float(np.linalg.norm(seed - region.center))
    if region.annulus and r < region.r_inner * 1.05:
        radial = (seed - region.center) / r
        return -f if float(f @ radial) < 0.0 else f
    return f


def _cycle_from_seed(pair: CharFieldPair, which: str, seed, opts: CycleOptions,
                     known_radii) -> ClosedOrbit:
    region = pair.region
    tracer = _SectionTracer(pair, which, opts,
                            seed_direction=_seed_direction(pair, which, seed))
    radii = []
    crossings = tracer.run(seed, 2)
    radii.extend(float(np.linalg.norm(c[1] - region.center)) for c in crossings)

    def is_known(r):
        return any(abs(r - kr) < 1e-4 * region.diameter for kr in known_radii)

    for _ in range(opts.max_windings):
        if len(radii) >= 2:
            if is_known(radii[-1]) and is_known(radii[-2]):
                raise _DuplicateCycle()
            if abs(radii[-1] - radii[-2]) < 1e-6:
                break
            if len(radii) >= 4:
                d_new = abs(radii[-1] - radii[-2])
                d_old = abs(radii[-3] - radii[-4])
                if d_new > d_old * 1.5 and d_new > 1e-3:
                    raise NoConvergence(
                        f"return map diverging near r = {radii[-1]:.6g}")
        start = crossings[-1][1]
        crossings = tracer.run(start, 1)
        radii.append(float(np.linalg.norm(crossings[-1][1] - region.center)))
    else:
        raise NoConvergence(
            f"{opts.max_windings} windings without contraction")

    # secant refinement of R(r) - r
    def return_radius(r):
        pt = _section_point(region, r, opts.section_angle)
        t = _SectionTracer(pair, which, opts,
                           seed_direction=tracer.ctx.prev)
        cr = t.run(pt, 1)
        return float(np.linalg.norm(cr[0][1] - region.center))

    r_a, r_b = radii[-2], radii[-1]
    f_a = return_radius(r_a) - r_a
    f_b = return_radius(r_b) - r_b
    r_star, f_star = r_b, f_b
    for _ in range(60):
        if abs(f_star) <= opts.tol_fixed:
            break
        denom = f_b - f_a
        if denom == 0.0:
            break
        r_new = r_b - f_b * (r_b - r_a) / denom
        r_a, f_a = r_b, f_b
        r_b = r_new
        f_b = return_radius(r_b) - r_b
        r_star, f_star = r_b, f_b
    if abs(f_star) > opts.tol_fixed:
        raise NoConvergence(
            f"secant stalled with |R(r)-r| = {abs(f_star):.3e} at r = {r_star:.9g}")

    return _assemble_orbit(pair, which, r_star, opts)


def _assemble_orbit(pair: CharFieldPair, which: str, r_star: float,
                    opts: CycleOptions) -> ClosedOrbit:
    region = pair.region
    start = _section_point(region, r_star, opts.section_angle)
    tracer = _SectionTracer(pair, which, opts,
                            seed_direction=_seed_direction(pair, which, start))
    rec = []
    crossings = tracer.run(start, 1, collect=rec)
    sigma_T, end_pt = crossings[0]
    closure = float(np.linalg.norm(end_pt - start))

    sig = np.asarray([t for t, _ in rec])
    pts = np.asarray([p for _, p in rec])
    # winding sense from the unwrapped angle sweep
    d = pts - region.center
    ang = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
    winding = int(round((ang[-1] - ang[0]) / (2 * math.pi)))
    if winding == 0:
        winding = 1 if ang[-1] > ang[0] else -1

    # uniform-sigma resample by short exact integrations between knots
    n = opts.n_resample
    targets = np.linspace(0.0, sigma_T, n, endpoint=False)
    samples = np.empty((n, 2))
    t2 = _SectionTracer(pair, which, opts, seed_direction=tracer.ctx.prev)
    y = start.copy()
    t2.ctx.direction(y)
    sigma = 0.0
    for i, tg in enumerate(targets):
        while sigma < tg - 1e-15:
            h = tg - sigma
            y, _, _, _ = _rk.dp_step(t2.rhs, sigma, y, min(h, 0.01))
            sigma += min(h, 0.01)
        samples[i] = y
    centroid = samples.mean(axis=0)
    rad = np.linalg.norm(samples - centroid, axis=1)
    mean_radius = float(rad.mean())
    radius_dev = float(np.max(np.abs(rad - mean_radius)))

    normals = np.empty_like(samples)
    for i, p in enumerate(samples):
        f, _ = pair.direction(which, p)
        nu = np.array([-f[1], f[0]])
        if float(nu @ (p - centroid)) < 0.0:
            nu = -nu
        normals[i] = nu

    return ClosedOrbit(points=samples, normals=normals, period=sigma_T,
                       closure_residual=closure, mean_radius=mean_radius,
                       radius_deviation=radius_dev, field_used=which,
                       winding=winding, reversed_flow=opts.reverse,
                       center=centroid)


def enumerate_cycles(pair: CharFieldPair, region: ErgoRegion,
                     opts: CycleOptions = CycleOptions(),
                     seeds_per_boundary: int = 4) -> list:
    """All distinct limit cycles reachable from seed fans on S and S1.

    Both fields are integrated in both traversal senses (a cycle repelling in
    one sense attracts in the other), with midpoint seeds between found
    structures for nested cycles; duplicates collapse by Hausdorff distance.
    """
    diam = region.diameter
    found: list[ClosedOrbit] = []

    def try_seeds(seeds, which, reverse):
        radii = [o.mean_radius for o in found]
        o = opts if not reverse else replace(opts, reverse=True)
        try:
            orbit = find_limit_cycle(pair, which, seeds, o, known_radii=radii)
        except (EscapedRegion, NoConvergence):
            return
        for existing in found:
            if hausdorff_distance(existing.points, orbit.points) < 1e-4 * diam:
                return
        found.append(orbit)

    step = max(1, len(region.s_points) // seeds_per_boundary)
    s_seeds = region.s_points[::step]
    s1_seeds = region.s1_points[::step] if region.annulus else np.empty((0, 2))
    for which in (PLUS, MINUS):
        for reverse in (False, True):
            for seed in s_seeds:
                try_seeds([seed], which, reverse)
            for seed in s1_seeds:
                try_seeds([seed], which, reverse)

    # one refinement pass seeded between the structures found so far
    if found:
        radii = sorted([region.r_inner] + [o.mean_radius for o in found] +
                       [float(np.mean(np.linalg.norm(region.s_points - region.center, axis=1)))])
        mids = [0.5 * (a + b) for a, b in zip(radii, radii[1:]) if b - a > 1e-3]
        for r in mids:
            seed = _section_point(region, r, opts.section_angle)
            for which in (PLUS, MINUS):
                for reverse in (False, True):
                    try_seeds([seed], which, reverse)

    found.sort(key=lambda o: o.mean_radius)
    return found


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def classify_closed_characteristic(m: MetricField, orbit: ClosedOrbit) -> HoleReport:
    """Black/white verdict for a closed characteristic curve via the sign of
    beta = sum g^{0j} nu_j with nu the outward unit normal."""
    betas = np.empty(len(orbit.points))
    residual_max = 0.0
    scale = 1.0
    for i, (p, nu) in enumerate(zip(orbit.points, orbit.normals)):
        g = m.eval(p)
        block = g[1:, 1:]
        scale = max(scale, float(np.abs(block).max()))
        residual_max = max(residual_max, abs(float(nu @ block @ nu)))
        betas[i] = float(g[0, 1:] @ nu)
    if residual_max > CHAR_RESIDUAL_TOL * scale:
        raise NotCharacteristic(
            f"normal residual {residual_max:.3e} exceeds {CHAR_RESIDUAL_TOL:g} x scale")
    return _classify_from_betas(betas, residual_max, LIMIT_CYCLE, orbit)


def _classify_from_betas(betas, residual_max, method, orbit) -> HoleReport:
    if np.all(betas > BETA_TOL):
        cls = WHITE
    elif np.all(betas < -BETA_TOL):
        cls = BLACK
    else:
        cls = UNDETERMINED
    return HoleReport(
        classification=cls, method=method, beta_samples=betas,
        residual_max=residual_max, orbit=orbit,
        tangential_degenerate=bool(cls == UNDETERMINED
                                   and float(np.max(np.abs(betas))) < BETA_TOL))


def classify_ergosphere(m: MetricField, region: ErgoRegion) -> HoleReport:
    """Classify the ergosphere itself when it is characteristic; otherwise
    defer to the limit-cycle search (method = LimitCycle, deferred)."""
    pts = region.s_points
    betas = np.empty(len(pts))
    residual_max = 0.0
    scale = 1.0
    for i, y in enumerate(pts):
        nu = region.s_outward_normal(y)
        g = m.eval(y)
        block = g[1:, 1:]
        scale = max(scale, float(np.abs(block).max()))
        residual_max = max(residual_max, abs(float(nu @ block @ nu)))
        betas[i] = float(g[0, 1:] @ nu)
    orbit = _ergosphere_orbit(region)
    if residual_max > CHAR_RESIDUAL_TOL * scale:
        return HoleReport(classification=UNDETERMINED, method=LIMIT_CYCLE,
                          beta_samples=betas, residual_max=residual_max,
                          orbit=orbit, deferred=True)
    return _classify_from_betas(betas, residual_max,
                                ERGOSPHERE_CHARACTERISTIC, orbit)


def _ergosphere_orbit(region: ErgoRegion) -> ClosedOrbit:
    pts = region.s_points
    centroid = pts.mean(axis=0)
    normals = np.empty_like(pts)
    for i, y in enumerate(pts):
        normals[i] = region.s_outward_normal(y)
    rad = np.linalg.norm(pts - centroid, axis=1)
    mean_r = float(rad.mean())
    seg = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
    return ClosedOrbit(points=pts, normals=normals, period=float(seg.sum()),
                       closure_residual=0.0, mean_radius=mean_r,
                       radius_deviation=float(np.max(np.abs(rad - mean_r))),
                       field_used="S", winding=1, reversed_flow=False,
                       center=centroid)


def gordon_flow_crosscheck(f: MediumFlow, orbit: ClosedOrbit) -> str:
    """Incoming/Outgoing verdict of the medium flow across the orbit,
    measured against the inward normal; a cross-check for the beta
    classifier (incoming pairs with black, outgoing with white)."""
    dots = np.empty(len(orbit.points))
    for i, (p, nu) in enumerate(zip(orbit.points, orbit.normals)):
        w = np.asarray(f.w.value(p), dtype=float)
        dots[i] = float(w @ (-nu))
    tol = 1e-12 * max(1.0, float(np.max(np.abs(dots))))
    pos = bool(np.any(dots > tol))
    neg = bool(np.any(dots < -tol))
    if pos and not neg:
        return INCOMING
    if neg and not pos:
        return OUTGOING
    return MIXED_FLOW
