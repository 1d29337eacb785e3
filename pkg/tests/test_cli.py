"""Config parsing, serialization round-trips, and CLI exit codes."""

import json
import os

import numpy as np
import pytest

from kottler_imcf import ConfigError, FlowTrace, TRACE_COLUMNS
from kottler_imcf.cli import (
    AuditResult,
    CheckResult,
    build_background,
    build_initial_surface,
    emit_audit_json,
    emit_trace_csv,
    main,
    parse_config,
    parse_trace_csv,
    run_scenario,
)

MINIMAL = """
id = t

[background]
curvature_sign = 0
mass = 0.5

[surface]
radius = 2.0
"""


def test_parse_defaults():
    c = parse_config(MINIMAL)
    assert c.scenario_id == "t"
    assert c.genus == 1
    assert c.resolution == 64
    assert c.cfl == 0.2
    assert c.sample_interval == 0.25
    assert c.checks == ("all",)
    assert c.rho_eval == (10.0, 20.0, 40.0, 80.0)


def test_parse_comments_and_blank_lines():
    c = parse_config("# header\n\n" + MINIMAL + "\n[flow]\nt_end = 1.0  # trailing\n")
    assert c.t_end == 1.0


def test_unknown_key_line_numbered():
    bad = MINIMAL + "\n[flow]\nbogus = 1\n"
    with pytest.raises(ConfigError) as err:
        parse_config(bad)
    assert "bogus" in str(err.value)
    assert "line" in str(err.value)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[extras]\n")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[surface]\nradius = 3.0\n")


def test_both_mass_and_radius_rejected():
    bad = MINIMAL.replace("mass = 0.5", "mass = 0.5\nhorizon_radius = 1.0")
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_neither_mass_nor_radius_rejected():
    with pytest.raises(ConfigError):
        parse_config("[background]\ncurvature_sign = 0\n")


def test_amplitude_exterior_guarantee():
    # radius 2, horizon 1: amplitude must stay below 1
    with pytest.raises(ConfigError) as err:
        parse_config(MINIMAL.replace("radius = 2.0", "radius = 2.0\namplitude = 1.5"))
    assert "amplitude" in str(err.value)


def test_radius_below_horizon_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace("radius = 2.0", "radius = 0.5"))


def test_critical_mass_derivation():
    text = """
[background]
curvature_sign = +1
mass = 0.3849001794597505
resolution = point
"""
    c = parse_config(text)
    b = build_background(c)
    assert b.horizon_rho == pytest.approx(1.0 / np.sqrt(3.0), abs=1e-9)
    assert b.surface_gravity == pytest.approx(np.sqrt(3.0), abs=1e-9)


def test_build_initial_surface_kinds():
    c = parse_config(MINIMAL.replace("radius = 2.0",
                                     "radius = 3.0\namplitude = 0.1\nmode1 = 1"))
    b = build_background(c)
    s = build_initial_surface(c, b)
    assert not s.is_constant
    g = b.base.grid
    expected = 3.0 + 0.1 * np.sin(2.0 * np.pi * g.theta1 / g.side)
    assert np.allclose(s.radius_field, expected)


def _trace(n):
    data = np.arange(n * len(TRACE_COLUMNS), dtype=float).reshape(n, -1)
    data[:, 0] = np.arange(n)  # strictly increasing times
    data[:, 1] = np.pi * (1.0 + data[:, 1])  # irrational-looking areas
    return FlowTrace(data=data)


def test_trace_csv_round_trip(tmp_path):
    path = tmp_path / "trace.csv"
    trace = _trace(3)
    emit_trace_csv(trace, path)
    again = parse_trace_csv(path)
    assert np.array_equal(again.data, trace.data)
    emit_trace_csv(again, tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


def test_empty_trace_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_trace_csv(FlowTrace(data=np.empty((0, len(TRACE_COLUMNS)))), path)
    lines = path.read_text().splitlines()
    assert lines == [",".join(TRACE_COLUMNS)]
    assert parse_trace_csv(path).n_samples == 0


def test_audit_json_failing_check(tmp_path):
    result = AuditResult(scenario_id="x")
    result.checks = [CheckResult("c", 1.0, 0.0, 0.5, False, "demo")]
    path = tmp_path / "audit.json"
    emit_audit_json(result, path)
    payload = json.loads(path.read_text())
    assert payload["passed"] is False
    assert payload["checks"][0]["name"] == "c"


def test_run_scenario_deterministic():
    c = parse_config(MINIMAL + "\n[flow]\nt_end = 1.0\n[background]\nresolution = 16\n")
    # note: section keys may be split across repeated headers
    t1, r1 = run_scenario(c)
    t2, r2 = run_scenario(c)
    assert np.array_equal(t1.data, t2.data)
    assert [c1.value for c1 in r1.checks] == [c2.value for c2 in r2.checks]
    assert r1.passed


def test_unknown_requested_check_rejected():
    c = parse_config(MINIMAL + "\n[audit]\nchecks = nonexistent\n")
    with pytest.raises(ConfigError):
        run_scenario(c, with_flow=False)


def _write(tmp_path, text):
    path = tmp_path / "scenario.cfg"
    path.write_text(text)
    return str(path)


def test_cli_audit_exit_zero(tmp_path, capsys):
    cfg = _write(tmp_path, MINIMAL + "\n[background]\nresolution = point\n")
    assert main(["audit", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_cli_config_error_exit_two(tmp_path, capsys):
    cfg = _write(tmp_path, "[background]\ncurvature_sign = 0\n")
    assert main(["background", "--config", cfg]) == 2
    assert main(["audit", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_cli_scenario_name_mismatch(tmp_path, capsys):
    cfg = _write(tmp_path, MINIMAL)
    assert main(["audit", "--config", cfg, "--scenario", "other"]) == 2


def test_cli_background_output(tmp_path, capsys):
    cfg = _write(tmp_path, MINIMAL + "\n[background]\nresolution = point\n")
    assert main(["background", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "horizon_radius" in out
    assert "surface_gravity" in out


def test_cli_chmass(tmp_path, capsys):
    cfg = _write(tmp_path, MINIMAL + "\n[background]\nresolution = point\n")
    assert main(["chmass", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "extrapolated" in out


def test_cli_flow_writes_outputs(tmp_path, capsys):
    cfg = _write(
        tmp_path,
        MINIMAL + "\n[background]\nresolution = point\n[flow]\nt_end = 1.0\n",
    )
    out_dir = str(tmp_path / "out")
    assert main(["flow", "--config", cfg, "--out", out_dir]) == 0
    assert os.path.exists(os.path.join(out_dir, "t_trace.csv"))
    payload = json.loads(open(os.path.join(out_dir, "t_audit.json")).read())
    assert payload["passed"] is True


def test_cli_tolerance_scale(tmp_path, capsys):
    cfg = _write(tmp_path, MINIMAL + "\n[background]\nresolution = point\n")
    # an absurdly small tolerance scale forces rigidity checks to fail
    assert main(["audit", "--config", cfg, "--tolerance-scale", "1e-20"]) == 1
