"""Scenario definition, parsing, validation, and the preset catalog.

A scenario is a single JSON document:

    {
      "name": "vortex-white",
      "metric": {"kind": "vortex", "A": 0.6, "B": 0.8, "c": 1.0,
                 "rho": 1.0, "r_inner": 0.3, "r_outer_margin": 0.0},
      "numerics": {"rel_tol": 1e-9, "abs_tol": 1e-10, "s_max": 50.0,
                   "section_angle": 0.0, "seed_count": 4}
    }

Metric kinds: vortex, radial_profile, gordon_uniform, radial_gordon,
gridded. Validation failures name the hypothesis breached. Gridded flows
load from CSV with header x1,x2,w1,w2[,n_refr], row-major over a uniform
grid, bilinearly interpolated.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .domains import AnnulusDomain, BoxDomain
from .errors import NonFiniteData, ParseError, SchemaError, ValidationError, HypothesisViolation
from .media import (ACOUSTIC, GORDON, MediumFlow, ScalarField, VectorField,
                    build_metric, radial_gordon_flow, radial_profile_flow,
                    uniform_flow, vortex_flow)
from .charfields import radial_profile_fields

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class VortexSpec:
    A: float
    B: float
    c: float = 1.0
    rho: float = 1.0
    r_inner: float = 0.3
    r_outer_margin: float = 0.0
    kind: str = "vortex"

    @property
    def r_ergosphere(self) -> float:
        return math.hypot(self.A, self.B) / self.c


@dataclass(frozen=True)
class RadialProfileSpec:
    A: tuple
    B: tuple
    r1: float
    r0: float
    kind: str = "radial_profile"


@dataclass(frozen=True)
class GordonUniformSpec:
    w: tuple
    n_refr: float = 1.0
    c: float = 1.0
    box_lo: tuple = (-1.0, -1.0)
    box_hi: tuple = (1.0, 1.0)
    kind: str = "gordon_uniform"


@dataclass(frozen=True)
class RadialGordonSpec:
    A: float
    n_refr: float = 2.0
    c: float = 2.0
    r_inner: float = 0.6
    r_outer: float = 1.5
    kind: str = "radial_gordon"

    @property
    def r_ergosphere(self) -> float:
        return abs(self.A) * self.n_refr / self.c


@dataclass(frozen=True)
class GriddedSpec:
    path: str
    interpolation: str = "bilinear"
    kind: str = "gridded"


@dataclass(frozen=True)
class Numerics:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-10
    s_max: float = 50.0
    section_angle: float = 0.0
    seed_count: int = 4
    tol_fixed: float = 1e-10


@dataclass(frozen=True)
class Scenario:
    name: str
    metric_spec: object
    numerics: Numerics = Numerics()

    def to_dict(self) -> dict:
        spec = asdict(self.metric_spec)
        kind = spec.pop("kind")
        md = {"kind": kind}
        md.update({k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in spec.items()})
        return {"name": self.name, "metric": md,
                "numerics": asdict(self.numerics)}


def serialize_scenario(sc: Scenario) -> str:
    return json.dumps(sc.to_dict(), indent=2, sort_keys=True)


def _require(cond: bool, violations: list, message: str):
    if not cond:
        violations.append(message)


def _parse_metric(md: dict, violations: list):
    kind = md.get("kind")
    if kind == "vortex":
        spec = VortexSpec(
            A=float(md.get("A", 0.0)), B=float(md.get("B", 0.0)),
            c=float(md.get("c", 1.0)), rho=float(md.get("rho", 1.0)),
            r_inner=float(md.get("r_inner", 0.3)),
            r_outer_margin=float(md.get("r_outer_margin", 0.0)))
        _require(spec.c > 0, violations, "wave speed c must be positive")
        _require(spec.rho > 0, violations, "density rho must be positive")
        _require(spec.A != 0.0 or spec.B != 0.0, violations,
                 "no ergoregion: A = B = 0 gives zero ergosphere radius")
        _require(spec.r_inner > 0, violations, "r_inner must be positive")
        if spec.c > 0 and (spec.A or spec.B):
            _require(spec.r_inner < spec.r_ergosphere, violations,
                     "r_inner must lie inside the ergosphere radius "
                     f"{spec.r_ergosphere:.6g}")
        _require(spec.r_outer_margin >= 0, violations,
                 "r_outer_margin must be non-negative")
        return spec
    if kind == "radial_profile":
        spec = RadialProfileSpec(
            A=tuple(float(v) for v in md.get("A", [])),
            B=tuple(float(v) for v in md.get("B", [])),
            r1=float(md.get("r1", 0.25)), r0=float(md.get("r0", 1.0)))
        _require(len(spec.A) > 0 and len(spec.B) > 0, violations,
                 "profile coefficient arrays must be non-empty")
        _require(0 < spec.r1 < spec.r0, violations, "need 0 < r1 < r0")
        if not violations:
            try:
                radial_profile_fields(spec.A, spec.B, spec.r1, spec.r0)
            except HypothesisViolation as exc:
                violations.append(f"profile hypothesis violated: {exc.clause}")
        return spec
    if kind == "gordon_uniform":
        spec = GordonUniformSpec(
            w=tuple(float(v) for v in md.get("w", [0.0, 0.0])),
            n_refr=float(md.get("n_refr", 1.0)), c=float(md.get("c", 1.0)),
            box_lo=tuple(float(v) for v in md.get("box_lo", [-1.0, -1.0])),
            box_hi=tuple(float(v) for v in md.get("box_hi", [1.0, 1.0])))
        _require(spec.c > 0, violations, "wave speed c must be positive")
        _require(spec.n_refr >= 1.0, violations, "refraction index must be >= 1")
        speed = math.hypot(*spec.w)
        _require(speed < spec.c, violations,
                 f"superluminal uniform flow: |w| = {speed:.6g} >= c = {spec.c:.6g}")
        return spec
    if kind == "radial_gordon":
        spec = RadialGordonSpec(
            A=float(md.get("A", -1.0)), n_refr=float(md.get("n_refr", 2.0)),
            c=float(md.get("c", 2.0)), r_inner=float(md.get("r_inner", 0.6)),
            r_outer=float(md.get("r_outer", 1.5)))
        _require(spec.c > 0, violations, "wave speed c must be positive")
        _require(spec.n_refr > 1.0, violations,
                 "radial_gordon needs n_refr > 1 for an ergoregion")
        _require(spec.A != 0.0, violations, "radial flow needs A != 0")
        _require(spec.r_inner > abs(spec.A) / spec.c, violations,
                 "flow superluminal at r_inner: require r_inner > |A|/c")
        _require(spec.r_inner < spec.r_ergosphere <= spec.r_outer, violations,
                 f"ergosphere radius {spec.r_ergosphere:.6g} must lie in "
                 "(r_inner, r_outer]")
        return spec
    if kind == "gridded":
        spec = GriddedSpec(path=str(md.get("path", "")),
                           interpolation=str(md.get("interpolation", "bilinear")))
        _require(bool(spec.path), violations, "gridded metric needs a path")
        _require(spec.interpolation == "bilinear", violations,
                 f"unsupported interpolation '{spec.interpolation}'")
        return spec
    violations.append(f"unknown metric kind {kind!r}")
    return None


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document; raises ParseError for
    malformed JSON and ValidationError naming every violated hypothesis."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a JSON object")
    violations: list[str] = []
    name = doc.get("name", "unnamed")
    md = doc.get("metric")
    if not isinstance(md, dict):
        raise ParseError("missing 'metric' object")
    spec = _parse_metric(md, violations)
    nd = doc.get("numerics", {})
    if not isinstance(nd, dict):
        raise ParseError("'numerics' must be an object")
    numerics = Numerics(
        rel_tol=float(nd.get("rel_tol", 1e-9)),
        abs_tol=float(nd.get("abs_tol", 1e-10)),
        s_max=float(nd.get("s_max", 50.0)),
        section_angle=float(nd.get("section_angle", 0.0)),
        seed_count=int(nd.get("seed_count", 4)),
        tol_fixed=float(nd.get("tol_fixed", 1e-10)))
    if numerics.rel_tol <= 0 or numerics.abs_tol <= 0:
        violations.append("tolerances must be positive")
    if numerics.seed_count < 1:
        violations.append("seed_count must be at least 1")
    if violations:
        raise ValidationError(violations)
    return Scenario(name=str(name), metric_spec=spec, numerics=numerics)


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def build_flow(sc: Scenario) -> MediumFlow:
    """Medium flow (with domain) for the scenario's metric spec."""
    spec = sc.metric_spec
    if isinstance(spec, VortexSpec):
        r0 = spec.r_ergosphere * (1.0 + spec.r_outer_margin)
        domain = AnnulusDomain(r_inner=spec.r_inner, r_outer=r0)
        return vortex_flow(spec.A, spec.B, domain, c=spec.c, rho=spec.rho)
    if isinstance(spec, RadialProfileSpec):
        domain = AnnulusDomain(r_inner=spec.r1, r_outer=spec.r0)
        return radial_profile_flow(spec.A, spec.B, domain)
    if isinstance(spec, GordonUniformSpec):
        domain = BoxDomain(lo=spec.box_lo, hi=spec.box_hi)
        return uniform_flow(spec.w, domain, c=spec.c, n_refr=spec.n_refr)
    if isinstance(spec, RadialGordonSpec):
        domain = AnnulusDomain(r_inner=spec.r_inner, r_outer=spec.r_outer)
        return radial_gordon_flow(spec.A, domain, c=spec.c, n_refr=spec.n_refr)
    if isinstance(spec, GriddedSpec):
        return load_gridded_flow(spec.path)
    raise ValidationError([f"cannot build flow for {type(spec).__name__}"])


def build_scenario_metric(sc: Scenario):
    flow = build_flow(sc)
    return flow, build_metric(flow)


# ---------------------------------------------------------------------------
# gridded flows

GRID_HEADERS = (["x1", "x2", "w1", "w2"], ["x1", "x2", "w1", "w2", "n_refr"])


def load_gridded_flow(path) -> MediumFlow:
    """Bilinear MediumFlow from a row-major uniform-grid CSV."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"no such file: {path}")
    with path.open() as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError("empty file") from None
        if header not in GRID_HEADERS:
            raise SchemaError(
                f"header {header} != x1,x2,w1,w2[,n_refr]")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from None
    data = np.asarray(rows, dtype=float)
    if data.size == 0 or data.shape[0] < 4:
        raise SchemaError("grid needs at least 2 points per axis")
    if data.shape[1] != len(header):
        raise SchemaError("row width does not match header")
    if not np.all(np.isfinite(data)):
        raise NonFiniteData(f"{np.sum(~np.isfinite(data))} non-finite cells")

    x1s = np.unique(data[:, 0])
    x2s = np.unique(data[:, 1])
    nx, ny = x1s.size, x2s.size
    if nx < 2 or ny < 2 or nx * ny != data.shape[0]:
        raise SchemaError(
            f"rows ({data.shape[0]}) != grid size {nx} x {ny}")
    for axis_vals, label in ((x1s, "x1"), (x2s, "x2")):
        steps = np.diff(axis_vals)
        if np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
            raise SchemaError(f"non-uniform {label} spacing")
    expected_x1 = np.repeat(x1s, ny)
    expected_x2 = np.tile(x2s, nx)
    if (np.max(np.abs(data[:, 0] - expected_x1)) > 0
            or np.max(np.abs(data[:, 1] - expected_x2)) > 0):
        raise SchemaError("rows are not in row-major grid order")

    h1 = float(x1s[1] - x1s[0])
    h2 = float(x2s[1] - x2s[0])
    w_grid = data[:, 2:4].reshape(nx, ny, 2)
    n_grid = data[:, 4].reshape(nx, ny) if len(header) == 5 else None

    def interp(grid, x):
        u = (x[0] - x1s[0]) / h1
        v = (x[1] - x2s[0]) / h2
        i = min(max(int(math.floor(u)), 0), nx - 2)
        j = min(max(int(math.floor(v)), 0), ny - 2)
        fu = u - i
        fv = v - j
        return ((1 - fu) * (1 - fv) * grid[i, j] + fu * (1 - fv) * grid[i + 1, j]
                + (1 - fu) * fv * grid[i, j + 1] + fu * fv * grid[i + 1, j + 1])

    def w_value(x):
        return interp(w_grid, np.asarray(x, dtype=float))

    # domain inset by one cell so central differences stay on the grid
    domain = BoxDomain(lo=[x1s[0] + h1, x2s[0] + h2],
                       hi=[x1s[-1] - h1, x2s[-1] - h2])
    w = VectorField(value=w_value,
                    jacobian=_fd_jacobian(w_value, (0.5 * h1, 0.5 * h2)))
    if n_grid is not None:
        def n_value(x):
            return float(interp(n_grid, np.asarray(x, dtype=float)))

        n_field = ScalarField(value=n_value,
                              grad=_fd_grad_scalar(n_value, (0.5 * h1, 0.5 * h2)))
        return MediumFlow(kind=GORDON, dim=2, w=w, c=1.0, domain=domain,
                          n_refr=n_field, name=f"gridded:{path.name}")
    return MediumFlow(kind=ACOUSTIC, dim=2, w=w, c=1.0, domain=domain,
                      rho=ScalarField.constant(1.0, 2),
                      name=f"gridded:{path.name}")


def _fd_jacobian(fn, steps):
    def jac(x):
        x = np.asarray(x, dtype=float)
        cols = []
        for a, h in enumerate(steps):
            e = np.zeros(x.size)
            e[a] = h
            cols.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * h))
        return np.stack(cols, axis=1)

    return jac


def _fd_grad_scalar(fn, steps):
    def grad(x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.size)
        for a, h in enumerate(steps):
            e = np.zeros(x.size)
            e[a] = h
            out[a] = (fn(x + e) - fn(x - e)) / (2 * h)
        return out

    return grad


# ---------------------------------------------------------------------------
# preset catalog

PRESETS = {
    "vortex-white": {
        "name": "vortex-white",
        "metric": {"kind": "vortex", "A": 0.6, "B": 0.8, "c": 1.0,
                   "rho": 1.0, "r_inner": 0.3, "r_outer_margin": 0.0},
    },
    "vortex-black": {
        "name": "vortex-black",
        "metric": {"kind": "vortex", "A": -0.6, "B": 0.8, "c": 1.0,
                   "rho": 1.0, "r_inner": 0.3, "r_outer_margin": 0.0},
    },
    "radial-profile-white": {
        "name": "radial-profile-white",
        "metric": {"kind": "radial_profile", "A": [2.0, -2.0], "B": [1.0],
                   "r1": 0.25, "r0": 1.0},
    },
    "radial-acoustic-white": {
        "name": "radial-acoustic-white",
        "metric": {"kind": "vortex", "A": 1.0, "B": 0.0, "c": 1.0,
                   "rho": 1.0, "r_inner": 0.5, "r_outer_margin": 0.0},
    },
    "radial-acoustic-black": {
        "name": "radial-acoustic-black",
        "metric": {"kind": "vortex", "A": -1.0, "B": 0.0, "c": 1.0,
                   "rho": 1.0, "r_inner": 0.5, "r_outer_margin": 0.0},
    },
    "radial-gordon-black": {
        "name": "radial-gordon-black",
        "metric": {"kind": "radial_gordon", "A": -1.0, "n_refr": 2.0,
                   "c": 2.0, "r_inner": 0.6, "r_outer": 1.5},
    },
    "gordon-uniform": {
        "name": "gordon-uniform",
        "metric": {"kind": "gordon_uniform", "w": [0.9, 0.0],
                   "n_refr": 1.0, "c": 1.0},
    },
}


def preset_scenario(name: str) -> Scenario:
    if name not in PRESETS:
        raise ValidationError([f"unknown preset {name!r}; available: "
                               + ", ".join(sorted(PRESETS))])
    return parse_scenario(json.dumps(PRESETS[name]))


def list_presets() -> list:
    return sorted(PRESETS)
