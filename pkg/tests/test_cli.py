"""Command-line interface: artifacts, exit codes, and reproducibility."""

import json

import pytest

from edgeqet import cli


def run(argv):
    return cli.main(argv)


# validate ---------------------------------------------------------------

def test_validate_defaults(capsys):
    assert run(["validate"]) == 0
    out = capsys.readouterr().out
    assert "parameter set valid" in out
    assert "v_g" in out and "nu_S" in out


def test_validate_rejects_bad_file(tmp_path, capsys):
    f = tmp_path / "bad.par"
    f.write_text("v_g = snail\n", encoding="utf-8")
    assert run(["validate", "--params", str(f)]) == 1
    assert "1" in capsys.readouterr().err  # line number surfaced


def test_validate_rejects_bad_override(capsys):
    assert run(["validate", "--set", "v_g=-1"]) == 1
    assert run(["validate", "--set", "warp=9"]) == 1
    assert run(["validate", "--set", "v_g"]) == 1
    err = capsys.readouterr().err
    assert "v_g" in err


def test_unknown_subcommand_is_usage_error():
    assert run(["teleport"]) == 1


# budget -----------------------------------------------------------------

def test_budget_artifacts(tmp_path, capsys):
    assert run(["budget", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "pass" in out and "FAIL" not in out
    payload = json.loads((tmp_path / "budget.json").read_text())
    assert set(payload) == {"budget", "si_units", "order_bands"}
    b = payload["budget"]
    assert b["E_A"] > b["E_B"] > 0
    assert b["delta_v"] == pytest.approx(12.43e-6, rel=1e-3)
    csv_text = (tmp_path / "budget.csv").read_text()
    assert csv_text.splitlines()[0].startswith("quantity,")
    assert "True" in csv_text
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "budget"
    assert manifest["params"]["L"] == 2e-5
    assert "duration_s" in manifest


def test_budget_set_override_and_zero_amplitude(tmp_path, capsys):
    assert run(["budget", "--out", str(tmp_path),
                "--set", "lambda_amp=0"]) == 0
    payload = json.loads((tmp_path / "budget.json").read_text())
    assert payload["budget"]["E_B"] == 0.0  # not -0.0
    assert payload["budget"]["E_1"] == 0.0
    out = capsys.readouterr().out
    assert "-0" not in out.split("E_B")[1].splitlines()[0]


# sweep ------------------------------------------------------------------

def test_sweep_artifacts_and_fit(tmp_path, capsys):
    assert run(["sweep", "--out", str(tmp_path), "--sweep", "L",
                "--values", "6e-5,8e-5", "--tol", "1e-3"]) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "L,E_B_J,E_B_error_J,E_B_order_estimate_J"
    assert len(lines) == 3
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert fit["n_points"] == 2
    assert fit["slope"] is not None and fit["slope_stderr"] is None
    assert "slope" in capsys.readouterr().out


def test_sweep_single_point_not_computable(tmp_path, capsys):
    assert run(["sweep", "--out", str(tmp_path), "--sweep", "L",
                "--values", "4e-5", "--tol", "1e-3"]) == 0
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert fit["slope"] is None and fit["status"] == "not-computable"
    assert "not computable" in capsys.readouterr().out


def test_sweep_usage_errors(tmp_path, capsys):
    assert run(["sweep", "--out", str(tmp_path), "--sweep", "L",
                "--values", "4e-5,3e-5,5e-5"]) == 1  # not monotone
    assert run(["sweep", "--out", str(tmp_path), "--sweep", "warp",
                "--values", "1,2"]) == 1
    assert run(["sweep", "--out", str(tmp_path), "--sweep", "L",
                "--values", "4e-5,fast"]) == 1
    capsys.readouterr()


# simulate ---------------------------------------------------------------

SIM_ARGS = ["simulate", "--shots", "60", "--seed", "3", "--modes", "64",
            "--coupling-scale", "0.01", "--ramp-fraction", "0",
            "--profile-points", "64", "--tol", "1e-3"]


def test_simulate_artifacts(tmp_path, capsys):
    assert run(SIM_ARGS + ["--out", str(tmp_path)]) == 0
    assert "sigma" in capsys.readouterr().out
    shots = (tmp_path / "shots.csv").read_text().splitlines()
    assert shots[0] == "shot,outcome_V,E_B_J"
    assert len(shots) == 61
    profile = (tmp_path / "profile.csv").read_text().splitlines()
    assert profile[0] == "x_m,eps_S_J_per_m_t0"
    assert len(profile) == 65
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["feedback_mode"] == "correlated"
    assert summary["E_A_oracle_J"] == pytest.approx(
        summary["compute_EA_J"], rel=0.05)
    assert summary["E_B_oracle_J"] != 0.0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 3 and manifest["shots"] == 60
    assert manifest["grid"]["n_modes"] == 64


def test_simulate_byte_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(SIM_ARGS + ["--out", str(a)]) == 0
    assert run(SIM_ARGS + ["--out", str(b)]) == 0
    for name in ("shots.csv", "profile.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate_feedback_choice_errors():
    assert run(["simulate", "--feedback", "telepathic"]) == 1


# convert ----------------------------------------------------------------

def test_convert_current_to_density(capsys):
    assert run(["convert", "--current", "1e-8"]) == 0
    out = capsys.readouterr().out
    assert "1.342" in out  # ~1.3426 ueV/um at the default nu_S
    assert "consistent" in out


def test_convert_density_to_current(capsys):
    assert run(["convert", "--energy-density", "2.15107e-19"]) == 0
    out = capsys.readouterr().out
    assert "1e-08 A" in out or "9.99" in out


def test_convert_requires_exactly_one_flag(capsys):
    assert run(["convert"]) == 1
    assert run(["convert", "--current", "1e-8",
                "--energy-density", "1e-17"]) == 1
    assert "exactly one" in capsys.readouterr().err
