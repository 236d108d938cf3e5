"""Command implementations behind the CLI: signature audits, ergosphere
location, the horizon search pipeline, ray traces, and re-classification."""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from .charfields import (ALL_INWARD, ALL_OUTWARD, MIXED, build_char_fields,
                         locate_ergo_region, s1_flux_test)
from .errors import CharacteristicS1, NotOnErgosphere, ValidationError
from .horizon import (ClosedOrbit, CycleOptions, classify_closed_characteristic,
                      classify_ergosphere, enumerate_cycles,
                      gordon_flow_crosscheck)
from .media import ergo_function
from .metric import signature_report
from .rays import BicharState, TraceOptions, make_null_initial, trace_ray
from .report import RunReport, hole_to_dict, orbit_to_dict, ray_csv
from .scenario import Scenario, build_scenario_metric
from .errors import NotHyperbolic

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_HYPOTHESIS = 2


def _max_workers() -> int:
    env = os.environ.get("ANALOG_HORIZON_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _thread_map(fn, items):
    items = list(items)
    workers = _max_workers()
    if workers == 1 or len(items) < 8:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def signature_audit(metric, flow, grid_n: int = 16) -> dict:
    """Grid audit of the signature conditions over the scenario domain."""
    pts = metric.domain.sample_grid(grid_n)

    def probe(x):
        try:
            rep = signature_report(metric, x)
        except NotHyperbolic:
            return ("not_hyperbolic",)
        flags = ["hyperbolic"]
        if rep.cond_1_2:
            flags.append("g00_upper_positive")
        if rep.spatial_negdef:
            flags.append("negdef")
        elif rep.spatial_degenerate:
            flags.append("degenerate")
        else:
            flags.append("ergoregion")
        if not rep.prop11_agrees:
            flags.append("prop11_mismatch")
        return tuple(flags)

    results = _thread_map(probe, pts)
    count = lambda label: sum(1 for r in results if label in r)
    audit = {
        "grid_points": len(pts),
        "hyperbolic": count("hyperbolic"),
        "not_hyperbolic": count("not_hyperbolic"),
        "g00_upper_positive": count("g00_upper_positive"),
        "spatial_negdef": count("negdef"),
        "ergoregion_points": count("ergoregion"),
        "degenerate_points": count("degenerate"),
        "prop11_mismatches": count("prop11_mismatch"),
    }
    if flow is not None:
        ergo_vals = np.asarray([ergo_function(flow, x) for x in pts])
        audit["condition_2_7_subluminal"] = bool(np.all(ergo_vals < 0.0))
        audit["max_ergo_function"] = float(ergo_vals.max())
    return audit


def _region_dict(region) -> dict:
    radii = np.linalg.norm(region.s_points - region.center, axis=1)
    return {
        "points": region.s_points,
        "mean_radius": float(radii.mean()),
        "radius_deviation": float(np.max(np.abs(radii - radii.mean()))),
        "r_inner": region.r_inner,
    }


def _locate_region(metric, n_samples: int = 256):
    try:
        return locate_ergo_region(metric, n_samples=n_samples), None
    except NotOnErgosphere as exc:
        return None, str(exc)


def cmd_check(sc: Scenario) -> RunReport:
    t0 = time.perf_counter()
    flow, metric = build_scenario_metric(sc)
    rep = RunReport(scenario=sc.to_dict(), command="check")
    rep.signature_audit = signature_audit(metric, flow)
    region, why = _locate_region(metric)
    if region is None:
        rep.ergosphere = None
        rep.notes.append(f"no ergoregion: {why}")
    else:
        rep.ergosphere = _region_dict(region)
    rep.timings_ms["total"] = 1000.0 * (time.perf_counter() - t0)
    return rep


def cmd_ergosphere(sc: Scenario) -> RunReport:
    t0 = time.perf_counter()
    flow, metric = build_scenario_metric(sc)
    rep = RunReport(scenario=sc.to_dict(), command="ergosphere")
    region, why = _locate_region(metric)
    if region is None:
        rep.notes.append(f"no ergoregion: {why}")
        rep.timings_ms["total"] = 1000.0 * (time.perf_counter() - t0)
        return rep
    rep.ergosphere = _region_dict(region)
    hole = classify_ergosphere(metric, region)
    rep.ergosphere["characteristic"] = not hole.deferred
    rep.ergosphere["residual_max"] = hole.residual_max
    if not hole.deferred:
        hole.flow_check = gordon_flow_crosscheck(flow, hole.orbit)
        rep.holes.append(hole_to_dict(hole))
    else:
        rep.notes.append("ergosphere not characteristic; "
                         "horizon search deferred to limit cycles")
    rep.timings_ms["total"] = 1000.0 * (time.perf_counter() - t0)
    return rep


def cmd_horizon(sc: Scenario) -> tuple[RunReport, int]:
    t0 = time.perf_counter()
    flow, metric = build_scenario_metric(sc)
    rep = RunReport(scenario=sc.to_dict(), command="horizon")
    region, why = _locate_region(metric)
    if region is None:
        rep.notes.append(f"no ergoregion: {why}")
        rep.timings_ms["total"] = 1000.0 * (time.perf_counter() - t0)
        return rep, EXIT_OK
    rep.ergosphere = _region_dict(region)
    erg = classify_ergosphere(metric, region)
    rep.ergosphere["characteristic"] = not erg.deferred
    rep.ergosphere["residual_max"] = erg.residual_max
    if not erg.deferred:
        erg.flow_check = gordon_flow_crosscheck(flow, erg.orbit)
        rep.holes.append(hole_to_dict(erg))
        rep.timings_ms["total"] = 1000.0 * (time.perf_counter() - t0)
        return rep, EXIT_OK

    pair = build_char_fields(metric, region)
    guaranteed = False
    if region.annulus:
        try:
            flux = s1_flux_test(metric, region)
            rep.ergosphere["s1_flux"] = flux.verdict
            if flux.verdict == MIXED:
                rep.notes.append(
                    "inner-boundary flux test Mixed: limit-cycle existence "
                    "hypotheses unverified")
            else:
                guaranteed = True
        except CharacteristicS1 as exc:
            rep.notes.append(f"inner boundary characteristic: {exc}")
    opts = CycleOptions(section_angle=sc.numerics.section_angle,
                        rel_tol=sc.numerics.rel_tol,
                        abs_tol=sc.numerics.abs_tol,
                        tol_fixed=sc.numerics.tol_fixed)
    cycles = enumerate_cycles(pair, region, opts,
                              seeds_per_boundary=sc.numerics.seed_count)
    for orbit in cycles:
        hole = classify_closed_characteristic(metric, orbit)
        hole.flow_check = gordon_flow_crosscheck(flow, orbit)
        rep.holes.append(hole_to_dict(hole))
    rep.timings_ms["total"] = 1000.0 * (time.perf_counter() - t0)
    if not cycles and guaranteed:
        rep.notes.append("zero horizons found although the flux hypotheses "
                         "guarantee one")
        return rep, EXIT_HYPOTHESIS
    return rep, EXIT_OK


def cmd_trace(sc: Scenario, x, xi, branch: str, x0: float = 0.0,
              s_max: Optional[float] = None):
    """Trace one null bicharacteristic; returns (ray, metric)."""
    flow, metric = build_scenario_metric(sc)
    x = np.asarray(x, dtype=float)
    if not metric.domain.contains(x):
        raise ValidationError([f"launch point {x.tolist()} outside the domain"])
    init = make_null_initial(metric, x, xi, branch, x0=x0)
    opts = TraceOptions(s_max=s_max if s_max is not None else sc.numerics.s_max,
                        rel_tol=sc.numerics.rel_tol,
                        abs_tol=sc.numerics.abs_tol)
    ray = trace_ray(metric, init, opts)
    return ray, metric


def trace_report(sc: Scenario, ray, metric) -> RunReport:
    rep = RunReport(scenario=sc.to_dict(), command="trace")
    rep.rays.append({
        "termination": ray.termination,
        "orientation": ray.orientation,
        "h_drift_max": ray.h_drift_max,
        "reason": ray.reason,
        "points": [st.x for st in ray.samples],
        "samples": [{
            "s": st.s, "x0": st.x0, "x": st.x, "xi0": st.xi0, "xi": st.xi,
        } for st in ray.samples],
    })
    return rep


def cmd_classify(sc: Scenario, report_doc: dict) -> tuple[RunReport, int]:
    """Re-run the classifier on orbits stored in a previous report."""
    flow, metric = build_scenario_metric(sc)
    rep = RunReport(scenario=sc.to_dict(), command="classify")
    mismatches = 0
    for hole in report_doc.get("holes", []):
        od = hole.get("orbit")
        if od is None or hole.get("method") == "ErgosphereCharacteristic":
            continue
        pts = np.asarray(od["points"], dtype=float)
        normals = np.asarray(od["normals"], dtype=float)
        orbit = ClosedOrbit(
            points=pts, normals=normals, period=float(od["period"]),
            closure_residual=float(od["closure_residual"]),
            mean_radius=float(od["mean_radius"]),
            radius_deviation=float(od["radius_deviation"]),
            field_used=str(od["field_used"]), winding=int(od["winding"]),
            reversed_flow=bool(od.get("reversed_flow", False)),
            center=np.asarray(od["center"], dtype=float))
        new = classify_closed_characteristic(metric, orbit)
        new.flow_check = gordon_flow_crosscheck(flow, orbit)
        entry = hole_to_dict(new)
        entry["stored_classification"] = hole.get("classification")
        entry["agrees"] = bool(new.classification == hole.get("classification"))
        mismatches += 0 if entry["agrees"] else 1
        rep.holes.append(entry)
    if mismatches:
        rep.notes.append(f"{mismatches} classification mismatch(es)")
        return rep, EXIT_HYPOTHESIS
    return rep, EXIT_OK
