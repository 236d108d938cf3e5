#!/usr/bin/env python3
"""Render SVG figures for the preset scenarios.

Each figure shows the annulus, the dashed ergosphere, the horizon colored by
class, and a surface-tangent ray spiraling onto the horizon where one exists.

Usage: python scripts/make_figures.py [--outdir figures]
"""
import argparse
import sys
from pathlib import Path

from analog_horizon.pipeline import cmd_horizon, cmd_trace
from analog_horizon.rays import ZERO_XI0
from analog_horizon.scenario import list_presets, preset_scenario
from analog_horizon.media import build_metric
from analog_horizon.charfields import kernel_direction
from analog_horizon import svg as svgmod


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="figures")
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for name in list_presets():
        if name == "gordon-uniform":
            continue  # no ergoregion, nothing to draw
        sc = preset_scenario(name)
        rep, code = cmd_horizon(sc)
        doc = rep.to_dict()
        spec = sc.metric_spec
        if getattr(spec, "B", 0.0) and hasattr(spec, "r_ergosphere"):
            # ride the characteristic curve from the ergosphere inward
            from analog_horizon.scenario import build_scenario_metric
            import numpy as np
            _, metric = build_scenario_metric(sc)
            y = np.array([spec.r_ergosphere, 0.0])
            b = kernel_direction(metric, y)
            ray, metric = cmd_trace(sc, y, b, ZERO_XI0, s_max=40.0)
            doc["rays"] = [{"points": [st.x for st in ray.samples]}]
        path = outdir / f"{name}.svg"
        path.write_text(svgmod.render_report(doc))
        print(f"{name}: exit {code}, holes "
              f"{[h['classification'] for h in doc['holes']]} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
