"""Command-line interface.

Subcommands: check, ergosphere, horizon, trace, classify, plot.
Exit codes: 0 success, 1 input error, 2 hypothesis/convergence failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import AnalogHorizonError, ParseError, ValidationError
from .pipeline import (EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK, cmd_check,
                       cmd_classify, cmd_ergosphere, cmd_horizon, cmd_trace,
                       trace_report)
from .rays import ROOT1, ROOT2, ZERO_XI0
from .scenario import (Numerics, Scenario, list_presets, load_scenario,
                       preset_scenario)
from . import svg as svgmod


def _add_common(p):
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--preset", help="named preset scenario "
                   f"({', '.join(list_presets())})")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=None,
                   help="output format (default: csv for trace, json otherwise)")
    p.add_argument("--tol-rel", type=float, help="override rel_tol")
    p.add_argument("--tol-abs", type=float, help="override abs_tol")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock timings in the report "
                        "(breaks byte-for-byte determinism)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="analog-horizon",
        description="Detect and classify analog black/white holes in "
                    "stationary metrics of moving media.")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, desc in [
        ("check", "signature/hyperbolicity audit and ergosphere location"),
        ("ergosphere", "locate the ergosphere and classify it if characteristic"),
        ("horizon", "full pipeline: ergosphere, fields, limit cycles, classes"),
    ]:
        p = sub.add_parser(name, help=desc)
        _add_common(p)

    p = sub.add_parser("trace", help="integrate one null bicharacteristic to CSV")
    _add_common(p)
    p.add_argument("--x", required=True, help="launch point, e.g. '0.8,0'")
    p.add_argument("--xi", required=True, help="spatial covector, e.g. '1,0'")
    p.add_argument("--branch", choices=["root1", "root2", "zero-xi0"],
                   default="root1")
    p.add_argument("--x0", type=float, default=0.0, help="launch time coordinate")
    p.add_argument("--s-max", type=float, help="parameter span override")

    p = sub.add_parser("classify", help="re-classify orbits from a report")
    _add_common(p)
    p.add_argument("--report", required=True, help="report JSON from 'horizon'")

    p = sub.add_parser("plot", help="render a report or trace CSV to SVG")
    _add_common(p)
    p.add_argument("--report", help="report JSON to draw")
    p.add_argument("--trace", help="trace CSV to draw")
    return ap


def _load(args) -> Scenario:
    if args.scenario and args.preset:
        raise ValidationError(["pass either --scenario or --preset, not both"])
    if args.scenario:
        sc = load_scenario(args.scenario)
    elif args.preset:
        sc = preset_scenario(args.preset)
    else:
        raise ValidationError(["a scenario is required (--scenario/--preset)"])
    if args.tol_rel or args.tol_abs:
        n = sc.numerics
        sc = Scenario(name=sc.name, metric_spec=sc.metric_spec,
                      numerics=Numerics(
                          rel_tol=args.tol_rel or n.rel_tol,
                          abs_tol=args.tol_abs or n.abs_tol,
                          s_max=n.s_max, section_angle=n.section_angle,
                          seed_count=n.seed_count))
    return sc


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_vector(text: str):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ValidationError([f"bad vector {text!r}: {exc}"]) from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AnalogHorizonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


def _dispatch(args) -> int:
    if args.command in ("check", "ergosphere", "horizon", "classify") \
            and args.format == "csv":
        raise ValidationError([f"{args.command} reports are JSON only"])
    if args.command == "check":
        rep = cmd_check(_load(args))
        _emit(rep.to_json(include_timings=args.timings), args.out)
        return EXIT_OK
    if args.command == "ergosphere":
        rep = cmd_ergosphere(_load(args))
        _emit(rep.to_json(include_timings=args.timings), args.out)
        return EXIT_OK
    if args.command == "horizon":
        rep, code = cmd_horizon(_load(args))
        _emit(rep.to_json(include_timings=args.timings), args.out)
        return code
    if args.command == "trace":
        sc = _load(args)
        branch = {"root1": ROOT1, "root2": ROOT2, "zero-xi0": ZERO_XI0}[args.branch]
        ray, metric = cmd_trace(sc, _parse_vector(args.x), _parse_vector(args.xi),
                                branch, x0=args.x0, s_max=args.s_max)
        if args.format == "json":
            _emit(trace_report(sc, ray, metric).to_json(
                include_timings=args.timings), args.out)
        else:
            from .report import ray_csv
            _emit(ray_csv(ray.samples, metric), args.out)
        return EXIT_OK
    if args.command == "classify":
        sc = _load(args)
        doc = json.loads(Path(args.report).read_text())
        rep, code = cmd_classify(sc, doc)
        _emit(rep.to_json(include_timings=args.timings), args.out)
        return code
    if args.command == "plot":
        if bool(args.report) == bool(args.trace):
            raise ValidationError(["plot needs exactly one of --report/--trace"])
        if args.report:
            doc = json.loads(Path(args.report).read_text())
            _emit(svgmod.render_report(doc), args.out)
            return EXIT_OK
        sc = _load(args)
        rows = _read_trace_csv(Path(args.trace).read_text())
        _emit(svgmod.render_trace(rows, sc.to_dict()), args.out)
        return EXIT_OK
    raise ValidationError([f"unknown command {args.command!r}"])


def _read_trace_csv(text: str) -> list:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines:
        raise ParseError("empty trace CSV")
    header = lines[0].split(",")
    if "x1" not in header or "x2" not in header:
        raise ParseError("trace CSV must carry x1 and x2 columns")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        vals = ln.split(",")
        if len(vals) != len(header):
            raise ParseError(f"line {lineno}: {len(vals)} fields, "
                             f"expected {len(header)}")
        try:
            rows.append({k: float(v) for k, v in zip(header, vals)})
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return rows


if __name__ == "__main__":
    sys.exit(main())
