import json
import math
from pathlib import Path

import numpy as np
import pytest

from analog_horizon.cli import main
from analog_horizon.report import dumps17, fmt_float
from analog_horizon.scenario import PRESETS


def run_cli(*argv):
    return main(list(argv))


# ---------------------------------------------------------------------------
# report serialization

def test_fmt_float_roundtrip():
    for v in (0.1, 1.0 / 3.0, 0.6, -0.5625, 1e-300, 123456.789e12):
        assert float(fmt_float(v)) == v
    with pytest.raises(ValueError):
        fmt_float(float("nan"))


def test_dumps17_is_valid_json():
    doc = {"a": 0.1, "b": [1, 2.5, None, True], "c": {"d": "text"}}
    parsed = json.loads(dumps17(doc))
    assert parsed["a"] == 0.1
    assert parsed["b"] == [1, 2.5, None, True]


# ---------------------------------------------------------------------------
# check

def test_check_vortex(tmp_path, capsys):
    out = tmp_path / "check.json"
    code = run_cli("check", "--preset", "vortex-white", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["ergosphere"]["mean_radius"] == pytest.approx(1.0, abs=1e-9)
    audit = doc["signature_audit"]
    assert audit["not_hyperbolic"] == 0
    assert audit["prop11_mismatches"] == 0
    # whole annulus lies inside the ergoregion
    assert audit["ergoregion_points"] + audit["degenerate_points"] > 0


def test_check_minkowski_box_no_ergoregion(tmp_path):
    sc = tmp_path / "mink.json"
    sc.write_text(json.dumps({
        "name": "minkowski-box",
        "metric": {"kind": "gordon_uniform", "w": [0.0, 0.0], "n_refr": 1.0,
                   "c": 1.0}}))
    out = tmp_path / "check.json"
    code = run_cli("check", "--scenario", str(sc), "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["ergosphere"] is None
    assert any("no ergoregion" in n for n in doc["notes"])
    assert doc["signature_audit"]["spatial_negdef"] == doc["signature_audit"]["grid_points"]


def test_check_gordon_uniform_subluminal(tmp_path):
    out = tmp_path / "check.json"
    code = run_cli("check", "--preset", "gordon-uniform", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["signature_audit"]["condition_2_7_subluminal"] is True


# ---------------------------------------------------------------------------
# horizon

def test_horizon_vortex_white(tmp_path):
    out = tmp_path / "h.json"
    code = run_cli("horizon", "--preset", "vortex-white", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    holes = doc["holes"]
    assert len(holes) == 1
    assert holes[0]["classification"] == "White"
    assert holes[0]["orbit"]["mean_radius"] == pytest.approx(0.6, abs=1e-3)
    assert holes[0]["flow_check"] == "Outgoing"


def test_horizon_vortex_black(tmp_path):
    out = tmp_path / "h.json"
    code = run_cli("horizon", "--preset", "vortex-black", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["holes"][0]["classification"] == "Black"
    assert doc["holes"][0]["orbit"]["mean_radius"] == pytest.approx(0.6, abs=1e-3)


def test_horizon_radial_gordon_black(tmp_path):
    out = tmp_path / "h.json"
    code = run_cli("horizon", "--preset", "radial-gordon-black", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    hole = doc["holes"][0]
    assert hole["method"] == "ErgosphereCharacteristic"
    assert hole["classification"] == "Black"
    assert doc["ergosphere"]["mean_radius"] == pytest.approx(1.0, abs=1e-6)


def test_horizon_missing_scenario_is_input_error(capsys):
    assert run_cli("horizon") == 1


def test_horizon_invalid_scenario_exit_1(tmp_path):
    sc = tmp_path / "bad.json"
    sc.write_text(json.dumps({
        "name": "bad", "metric": {"kind": "vortex", "A": 0, "B": 0}}))
    assert run_cli("horizon", "--scenario", str(sc)) == 1


# ---------------------------------------------------------------------------
# trace

def test_trace_minkowski_straight(tmp_path):
    sc = tmp_path / "mink.json"
    sc.write_text(json.dumps({
        "name": "mink",
        "metric": {"kind": "gordon_uniform", "w": [0.0, 0.0], "n_refr": 1.0,
                   "c": 1.0}}))
    out = tmp_path / "ray.csv"
    code = run_cli("trace", "--scenario", str(sc), "--x", "0,0", "--xi", "1,0",
                   "--branch", "root1", "--s-max", "0.4", "--out", str(out))
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "s,x0,x1,x2,xi0,xi1,xi2,H"
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    assert np.max(np.abs(rows[:, 7])) <= 1e-14        # H column
    # straight line: x1 = 2 s xi1 ... constant velocity
    assert np.allclose(rows[:, 2], -2.0 * rows[:, 0], atol=1e-10)


def test_trace_vortex_spiral(tmp_path):
    out = tmp_path / "spiral.csv"
    code = run_cli("trace", "--preset", "vortex-white", "--x", "1,0",
                   "--xi", "0.6,0.8", "--branch", "zero-xi0", "--out", str(out))
    assert code == 0
    lines = out.read_text().strip().splitlines()
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    x0 = rows[:, 1]
    assert np.all(np.diff(x0) > -1e-12)               # monotone time
    radii = np.hypot(rows[:, 2], rows[:, 3])
    assert radii[-1] < 0.7                            # trends toward r = 0.6
    assert radii[-1] > 0.59


def test_trace_outside_domain_is_error(tmp_path):
    code = run_cli("trace", "--preset", "vortex-white", "--x", "2,0",
                   "--xi", "1,0")
    assert code == 1


# ---------------------------------------------------------------------------
# classify

def test_classify_roundtrip(tmp_path):
    rep = tmp_path / "h.json"
    assert run_cli("horizon", "--preset", "vortex-white", "--out", str(rep)) == 0
    out = tmp_path / "c.json"
    code = run_cli("classify", "--preset", "vortex-white", "--report", str(rep),
                   "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["holes"][0]["agrees"] is True


# ---------------------------------------------------------------------------
# plot

def test_plot_report_element_counts(tmp_path):
    rep = tmp_path / "h.json"
    run_cli("horizon", "--preset", "vortex-white", "--out", str(rep))
    out = tmp_path / "h.svg"
    assert run_cli("plot", "--report", str(rep), "--out", str(out)) == 0
    svg = out.read_text()
    assert svg.count('class="ergosphere"') == 1
    assert svg.count('class="horizon"') == 1
    assert svg.count('class="boundary"') == 2  # the two annulus circles


def test_plot_trace(tmp_path):
    trace = tmp_path / "ray.csv"
    run_cli("trace", "--preset", "vortex-white", "--x", "1,0",
            "--xi", "0.6,0.8", "--branch", "zero-xi0", "--out", str(trace))
    out = tmp_path / "ray.svg"
    assert run_cli("plot", "--preset", "vortex-white", "--trace", str(trace),
                   "--out", str(out)) == 0
    assert 'class="ray"' in out.read_text()


def test_plot_corrupt_csv(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("s,x0,x1,x2\n1,2,3\n")
    assert run_cli("plot", "--preset", "vortex-white", "--trace", str(bad)) == 1


# ---------------------------------------------------------------------------
# determinism

def test_reports_byte_identical(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run_cli("horizon", "--preset", "vortex-white", "--out", str(a))
    run_cli("horizon", "--preset", "vortex-white", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_svg_byte_identical(tmp_path):
    rep = tmp_path / "h.json"
    run_cli("horizon", "--preset", "vortex-white", "--out", str(rep))
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    run_cli("plot", "--report", str(rep), "--out", str(a))
    run_cli("plot", "--report", str(rep), "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_trace_json_format(tmp_path):
    out = tmp_path / "ray.json"
    code = run_cli("trace", "--preset", "vortex-white", "--x", "0.8,0",
                   "--xi", "0.3,1", "--branch", "root1", "--s-max", "1.0",
                   "--format", "json", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    ray = doc["rays"][0]
    assert ray["h_drift_max"] <= 1e-6
    assert len(ray["samples"]) == len(ray["points"])


def test_report_csv_format_rejected():
    assert run_cli("horizon", "--preset", "vortex-white", "--format", "csv") == 1


def test_reports_validate_against_published_schema(tmp_path):
    import jsonschema

    schema = json.loads(
        (Path(__file__).parent.parent / "schemas" / "report.schema.json").read_text())
    for argv in (
        ["check", "--preset", "vortex-white"],
        ["horizon", "--preset", "vortex-white"],
        ["horizon", "--preset", "radial-gordon-black"],
        ["ergosphere", "--preset", "radial-acoustic-black"],
        ["trace", "--preset", "vortex-white", "--x", "0.8,0", "--xi", "0.3,1",
         "--s-max", "0.5", "--format", "json"],
    ):
        out = tmp_path / "r.json"
        assert run_cli(*argv, "--out", str(out)) == 0
        jsonschema.validate(json.loads(out.read_text()), schema)
