"""Command-line interface: dispatch, artifacts, exit codes, reproducibility."""

import csv
import json

import pytest

from shockstab import cli


def write_config(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def run(args):
    return cli.main(args)


def test_models_command(tmp_path):
    out = str(tmp_path / "m")
    assert run(["models", "--out", out]) == 0
    payload = json.loads((tmp_path / "m_report.json").read_text())
    kinds = {k["kind"] for k in payload["kinds"]}
    assert kinds == {"scalar_cubic", "elastodynamics", "reflected"}


def test_curve_command_csv(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"kind": "elastodynamics"},
        "base": [1.0, 0.0],
        "s": {"min": -4.0, "max": 2.0, "n": 25},
    })
    out = str(tmp_path / "c")
    assert run(["curve", "--config", cfg, "--out", out]) == 0
    with open(tmp_path / "c_curve.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["s", "state_0", "state_1", "sigma", "sigma_prime",
                       "lax_admissible"]
    assert len(rows) == 26
    assert (tmp_path / "c_curve.png").exists()


def test_classify_command(tmp_path):
    cfg = write_config(tmp_path, "cl.json", {"model": {"kind": "scalar_cubic"}})
    out = str(tmp_path / "cl")
    assert run(["classify", "--config", cfg, "--out", out]) == 0
    payload = json.loads((tmp_path / "cl_report.json").read_text())
    assert payload["classification"]["class"] == "convex-concave"


def test_certify_command(tmp_path):
    cfg = write_config(tmp_path, "cert.json", {
        "model": {"kind": "scalar_cubic"}, "u_L": 1.0, "s0": 1.0,
    })
    out = str(tmp_path / "cert")
    assert run(["certify", "--config", cfg, "--out", out]) == 0
    payload = json.loads((tmp_path / "cert_report.json").read_text())
    assert payload["certification"]["a_star"] > 0
    assert (tmp_path / "cert_certify.png").exists()


def test_entropy_build_command(tmp_path):
    cfg = write_config(tmp_path, "e.json", {"u_L": 1.0, "u_R": 5.0})
    out = str(tmp_path / "e")
    assert run(["entropy-build", "--config", cfg, "--out", out]) == 0
    payload = json.loads((tmp_path / "e_report.json").read_text())
    assert 0 < payload["entropy"]["slope"] < 1


def test_region_map_command(tmp_path):
    cfg = write_config(tmp_path, "r.json", {
        "model": {"kind": "scalar_cubic"}, "u_base": 1.0,
        "grid": {"n_first": 41},
    })
    out = str(tmp_path / "r")
    assert run(["region-map", "--config", cfg, "--out", out]) == 0
    with open(tmp_path / "r_region_map.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["state_0", "class", "s_param", "covered_reason"]
    assert len(rows) == 42
    assert (tmp_path / "r_region_map.png").exists()


def test_simulate_command(tmp_path):
    cfg = write_config(tmp_path, "s.json", {
        "model": {"kind": "elastodynamics"}, "u_L": [1.0, 0.0],
        "s0": 0.5, "a": 0.41,
        "sim": {"n_cells": 100, "t_end": 0.05},
    })
    out = str(tmp_path / "s")
    assert run(["simulate", "--config", cfg, "--out", out]) == 0
    with open(tmp_path / "s_series.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["t", "E", "dE", "h", "hdot", "diss_boundary"]
    assert len(rows) > 2
    assert (tmp_path / "s_series.png").exists()


def test_malformed_json_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{bad")
    assert run(["certify", "--config", str(p)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "usage"


def test_unknown_config_field_exits_2(tmp_path):
    cfg = write_config(tmp_path, "u.json", {
        "model": {"kind": "scalar_cubic"}, "u_L": 1.0, "s0": 1.0,
        "extra_field": True,
    })
    assert run(["certify", "--config", cfg, "--out", str(tmp_path / "u")]) == 2


def test_missing_config_exits_2():
    assert run(["constants"]) == 2


def test_reports_reproducible_across_threads(tmp_path):
    cfg = write_config(tmp_path, "k.json", {
        "model": {"kind": "elastodynamics"}, "u_L": [1.0, 0.0],
        "s0": 0.5, "a": 0.05,
    })
    run(["constants", "--config", cfg, "--seed", "7", "--threads", "1",
         "--out", str(tmp_path / "k1")])
    run(["constants", "--config", cfg, "--seed", "7", "--threads", "8",
         "--out", str(tmp_path / "k2")])
    p1 = json.loads((tmp_path / "k1_report.json").read_text())
    p2 = json.loads((tmp_path / "k2_report.json").read_text())
    del p1["resolved"]["threads"], p2["resolved"]["threads"]
    assert p1 == p2


def test_report_embeds_resolved_config(tmp_path):
    cfg_payload = {"model": {"kind": "scalar_cubic"}, "u_base": 1.0,
                   "grid": {"n_first": 21}}
    cfg = write_config(tmp_path, "p.json", cfg_payload)
    run(["region-map", "--config", cfg, "--out", str(tmp_path / "p")])
    payload = json.loads((tmp_path / "p_report.json").read_text())
    assert payload["resolved"]["config"] == cfg_payload
