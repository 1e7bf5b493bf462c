import json
import math
import subprocess
import sys

import numpy as np
import pytest

from sphere_strichartz.cli import run


def test_kappa_prints_value_and_branch(capsys):
    assert run(["kappa", "--d", "2", "--p", "8"]) == 0
    out = capsys.readouterr().out
    assert "0.25" in out
    assert "supercritical" in out
    assert "p_c = 6" in out


def test_kappa_with_q(capsys):
    assert run(["kappa", "--d", "2", "--p", "4", "--q", "4"]) == 0
    out = capsys.readouterr().out
    assert "kappa_pq = 0.375" in out


def test_validation_errors_exit_1(capsys):
    assert run(["kappa", "--d", "2", "--p", "1.5"]) == 1
    assert run(["kappa", "--d", "0", "--p", "4"]) == 1
    assert run(["no-such-command"]) == 1
    assert run(["kappa", "--p", "4", "--bogus-flag", "1"]) == 1
    capsys.readouterr()


def test_resource_cap_exit_1(monkeypatch, capsys):
    monkeypatch.setenv("SPHERE_STRICHARTZ_MAX_N", "20")
    assert run(["identity-check", "--N", "32", "--trials", "1"]) == 1
    capsys.readouterr()


def test_identity_check_passes(capsys):
    assert run(["identity-check", "--d", "2", "--N", "8", "--seed", "7",
                "--trials", "2"]) == 0
    out = capsys.readouterr().out
    assert "max relative error" in out


def test_identity_check_tolerance_breach_exit_2(capsys):
    assert run(["identity-check", "--N", "8", "--trials", "1",
                "--tol", "1e-18"]) == 2
    capsys.readouterr()


def test_sweep_csv_schema_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    argv = ["sweep", "--d", "2", "--p", "inf", "--family", "zonal",
            "--n", "16:64", "--count", "5", "--seed", "3"]
    assert run(argv + ["--output", str(out1)]) == 0
    assert run(argv + ["--output", str(out2)]) == 0
    capsys.readouterr()
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    lines = b1.decode().strip().split("\n")
    assert lines[0] == "n,ratio,p,q,s,d,family"
    assert len(lines) == 6


def test_sweep_rows_rederivable(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert run(["sweep", "--d", "2", "--p", "inf", "--family", "zonal",
                "--n", "8,16,32", "--output", str(out)]) == 0
    capsys.readouterr()
    rows = out.read_text().strip().split("\n")[1:]
    from sphere_strichartz.experiments import field_lp_norm, make_family

    for row in rows:
        vals = row.split(",")
        n, ratio = int(vals[0]), float(vals[1])
        f = make_family("zonal-kernel", n, 2)
        assert ratio == pytest.approx(field_lp_norm(f, math.inf), rel=1e-15)


def test_sweep_json_format(tmp_path, capsys):
    out = tmp_path / "sweep.json"
    assert run(["sweep", "--d", "2", "--p", "4", "--family", "hw",
                "--n", "8,16,32", "--format", "json", "--output", str(out)]) == 0
    capsys.readouterr()
    data = json.loads(out.read_text())
    assert data["columns"][0] == "n"
    assert "slope" in data["summary"]


def test_config_file_defaults_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"version": 1, "d": 2, "p": "8"}))
    assert run(["kappa", "--config", str(cfg)]) == 0
    assert "0.25" in capsys.readouterr().out
    # explicit flag beats the config value
    assert run(["kappa", "--config", str(cfg), "--p", "inf"]) == 0
    assert "0.5" in capsys.readouterr().out


def test_config_file_version_and_keys_checked(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 99, "p": "8"}))
    assert run(["kappa", "--config", str(bad)]) == 1
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"version": 1, "wat": 3}))
    assert run(["kappa", "--p", "4", "--config", str(unknown)]) == 1
    assert run(["kappa", "--p", "4", "--config", str(tmp_path / "missing.json")]) == 1
    capsys.readouterr()


def test_strichartz_command(capsys):
    assert run(["strichartz", "--d", "2", "--N", "6", "--p", "4", "--q", "4",
                "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "ratio =" in out
    assert "s=0.375" in out


def test_sharpness_command(tmp_path, capsys):
    out = tmp_path / "sharp.csv"
    assert run(["sharpness", "--d", "2", "--p", "inf", "--s", "0.5",
                "--n", "16:64", "--count", "5", "--output", str(out)]) == 0
    text = capsys.readouterr().out
    assert "growth slope" in text
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "n,ratio,p,q,s,d,family"
    assert len(lines) == 11  # 5 degrees x 2 families + header


def test_solve_potential_roundtrip(tmp_path, capsys):
    pot_file = tmp_path / "pot.json"
    pot_file.write_text(json.dumps({
        "terms": [{
            "time_coeffs": [{"freq": 1, "re": 0.01, "im": 0.0},
                            {"freq": -1, "re": 0.01, "im": 0.0}],
            "spatial_coeffs": [{"n": 1, "m": 0, "re": 1.0, "im": 0.0}],
        }]
    }))
    out = tmp_path / "report.json"
    assert run(["solve-potential", "--potential", str(pot_file), "--N", "4",
                "--p", "4", "--seed", "2", "--format", "json",
                "--output", str(out)]) == 0
    text = capsys.readouterr().out
    assert "converged" in text
    report = json.loads(out.read_text())
    assert float(report["summary"]["residual"]) <= 1e-6


def test_solve_potential_divergence_exit_2(tmp_path, capsys):
    pot_file = tmp_path / "strong.json"
    pot_file.write_text(json.dumps({
        "terms": [{
            "time_coeffs": [{"freq": 0, "re": 90.0, "im": 0.0}],
            "spatial_coeffs": [{"n": 1, "m": 0, "re": 1.0, "im": 0.0}],
        }]
    }))
    assert run(["solve-potential", "--potential", str(pot_file), "--N", "4",
                "--p", "4", "--seed", "2", "--max-iter", "10"]) == 2
    capsys.readouterr()


def test_selftest_small(capsys):
    assert run(["selftest", "--N", "24"]) == 0
    out = capsys.readouterr().out
    assert "round-trip" in out
    assert "FAIL" not in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sphere_strichartz.cli", "kappa", "--d", "3",
         "--p", "4"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "0.25" in proc.stdout
