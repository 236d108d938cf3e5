"""Report payloads and deterministic serialization.

JSON numbers are emitted with 17 significant digits (round-trip exact for
64-bit floats) through a small recursive emitter, so identical inputs give
byte-identical documents. Non-finite numbers are rejected: a report with a
NaN is a bug upstream, not something to serialize.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .horizon import ClosedOrbit, HoleReport

SCHEMA_VERSION = "1"


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value in report: {x}")
    return f"{x:.17g}"


def dumps17(obj, indent: int = 0) -> str:
    """JSON text with %.17g floats, dict insertion order, 2-space indent."""
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        import json as _json
        return _json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [dumps17(v, indent + 1) for v in obj]
        if all(len(s) < 24 and "\n" not in s for s in items) and len(items) <= 8:
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(pad_in + s for s in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f'{pad_in}"{k}": ' + dumps17(v, indent + 1) for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def orbit_to_dict(orbit: ClosedOrbit) -> dict:
    return {
        "mean_radius": orbit.mean_radius,
        "radius_deviation": orbit.radius_deviation,
        "period": orbit.period,
        "closure_residual": orbit.closure_residual,
        "field_used": orbit.field_used,
        "winding": orbit.winding,
        "reversed_flow": orbit.reversed_flow,
        "center": orbit.center,
        "points": orbit.points,
        "normals": orbit.normals,
    }


def hole_to_dict(rep: HoleReport) -> dict:
    betas = np.asarray(rep.beta_samples, dtype=float)
    return {
        "classification": rep.classification,
        "method": rep.method,
        "deferred": rep.deferred,
        "tangential_degenerate": rep.tangential_degenerate,
        "residual_max": rep.residual_max,
        "beta_min": float(betas.min()) if betas.size else 0.0,
        "beta_max": float(betas.max()) if betas.size else 0.0,
        "flow_check": rep.flow_check,
        "orbit": orbit_to_dict(rep.orbit) if rep.orbit is not None else None,
    }


@dataclass
class RunReport:
    scenario: dict
    command: str
    signature_audit: Optional[dict] = None
    ergosphere: Optional[dict] = None
    holes: list = field(default_factory=list)
    rays: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    timings_ms: dict = field(default_factory=dict)

    def to_dict(self, include_timings: bool = False) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "command": self.command,
            "scenario": self.scenario,
        }
        if self.signature_audit is not None:
            doc["signature_audit"] = self.signature_audit
        doc["ergosphere"] = self.ergosphere
        doc["holes"] = self.holes
        if self.rays:
            doc["rays"] = self.rays
        if self.notes:
            doc["notes"] = self.notes
        if include_timings:
            doc["timings_ms"] = self.timings_ms
        return doc

    def to_json(self, include_timings: bool = False) -> str:
        return dumps17(self.to_dict(include_timings)) + "\n"


def ray_csv(samples, metric) -> str:
    """CSV of bicharacteristic samples: s,x0,x...,xi0,xi...,H with H the
    live symbol value."""
    dim = metric.dim
    cols = (["s", "x0"] + [f"x{i}" for i in range(1, dim + 1)]
            + ["xi0"] + [f"xi{i}" for i in range(1, dim + 1)] + ["H"])
    lines = [",".join(cols)]
    for st in samples:
        xi_full = np.concatenate([[st.xi0], st.xi])
        h_val = float(xi_full @ metric.eval(st.x) @ xi_full)
        vals = ([st.s, st.x0] + list(st.x) + [st.xi0] + list(st.xi) + [h_val])
        lines.append(",".join(fmt_float(float(v)) for v in vals))
    return "\n".join(lines) + "\n"
