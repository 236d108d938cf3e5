"""Static SVG rendering of run reports and ray traces.

Output is byte-stable for identical inputs: fixed coordinate formatting,
fixed element order, no timestamps. Domain boundaries are drawn as plain
curves, the ergosphere dashed, horizons solid and colored by class, ray
projections as thin polylines.
"""
from __future__ import annotations

import numpy as np

COLORS = {"White": "#1f77b4", "Black": "#111111", "Undetermined": "#888888"}
SIZE = 640
MARGIN = 0.08


def _fmt(v: float) -> str:
    return f"{v:.4f}"


class _Canvas:
    def __init__(self, lo, hi):
        span = max(hi[0] - lo[0], hi[1] - lo[1])
        pad = MARGIN * span
        self.lo = (lo[0] - pad, lo[1] - pad)
        self.scale = SIZE / (span + 2 * pad)
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" '
            f'height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
            f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
        ]

    def map(self, p):
        x = (p[0] - self.lo[0]) * self.scale
        y = SIZE - (p[1] - self.lo[1]) * self.scale
        return x, y

    def polyline(self, pts, cls, stroke, width, dashed=False, closed=False):
        coords = " ".join(
            f"{_fmt(x)},{_fmt(y)}" for x, y in (self.map(p) for p in pts))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        tag = "polygon" if closed else "polyline"
        self.parts.append(
            f'<{tag} class="{cls}" points="{coords}" fill="none" '
            f'stroke="{stroke}" stroke-width="{width}"{dash}/>')

    def circle(self, center, radius, cls, stroke, width):
        cx, cy = self.map(center)
        self.parts.append(
            f'<circle class="{cls}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
            f'r="{_fmt(radius * self.scale)}" fill="none" '
            f'stroke="{stroke}" stroke-width="{width}"/>')

    def text(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _domain_bounds(scenario: dict):
    md = scenario.get("metric", {})
    kind = md.get("kind")
    if kind == "gordon_uniform":
        lo = md.get("box_lo", [-1.0, -1.0])
        hi = md.get("box_hi", [1.0, 1.0])
        return (lo[0], lo[1]), (hi[0], hi[1]), None
    if kind == "vortex":
        r0 = float(np.hypot(md.get("A", 0.0), md.get("B", 0.0))) / md.get("c", 1.0)
        r0 *= 1.0 + md.get("r_outer_margin", 0.0)
        return (-r0, -r0), (r0, r0), (md.get("r_inner", 0.0), r0)
    if kind == "radial_profile":
        r0 = md.get("r0", 1.0)
        return (-r0, -r0), (r0, r0), (md.get("r1", 0.0), r0)
    if kind == "radial_gordon":
        r0 = md.get("r_outer", 1.5)
        return (-r0, -r0), (r0, r0), (md.get("r_inner", 0.0), r0)
    return (-1.0, -1.0), (1.0, 1.0), None


def render_report(doc: dict) -> str:
    """SVG for a run-report dictionary (as produced by RunReport.to_dict)."""
    lo, hi, rings = _domain_bounds(doc.get("scenario", {}))
    cv = _Canvas(lo, hi)
    if rings is not None:
        r_in, r_out = rings
        if r_in > 0:
            cv.circle((0.0, 0.0), r_in, "boundary", "#999999", 1.0)
        cv.circle((0.0, 0.0), r_out, "boundary", "#999999", 1.0)
    else:
        cv.polyline([(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]),
                     (lo[0], hi[1])], "boundary", "#999999", 1.0, closed=True)
    ergo = doc.get("ergosphere")
    if ergo is not None and len(ergo.get("points", [])) > 0:
        cv.polyline(ergo["points"], "ergosphere", "#d62728", 1.5,
                    dashed=True, closed=True)
    for hole in doc.get("holes", []):
        orbit = hole.get("orbit")
        if not orbit or hole.get("method") == "ErgosphereCharacteristic":
            continue
        color = COLORS.get(hole.get("classification", "Undetermined"),
                           COLORS["Undetermined"])
        cv.polyline(orbit["points"], "horizon", color, 2.0, closed=True)
    for ray in doc.get("rays", []):
        pts = ray.get("points")
        if pts is not None and len(pts) > 1:
            cv.polyline(pts, "ray", "#2ca02c", 0.75)
    return cv.text()


def render_trace(rows: list, scenario: dict) -> str:
    """SVG of ray spatial projections from parsed trace-CSV rows."""
    lo, hi, rings = _domain_bounds(scenario)
    cv = _Canvas(lo, hi)
    if rings is not None:
        r_in, r_out = rings
        if r_in > 0:
            cv.circle((0.0, 0.0), r_in, "boundary", "#999999", 1.0)
        cv.circle((0.0, 0.0), r_out, "boundary", "#999999", 1.0)
    pts = [(row["x1"], row["x2"]) for row in rows]
    if pts:
        cv.polyline(pts, "ray", "#2ca02c", 0.75)
    return cv.text()
