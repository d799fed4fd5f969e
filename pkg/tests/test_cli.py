"""
Smoke tests for cli module.
Verifies argument parsing, subcommand outputs and exit codes.
"""
import csv
import io
import math

import pytest

from predens import cli
from predens.config import EXIT_OK, EXIT_VALIDATION_ERROR, EXIT_VERIFICATION_FAILED
from predens.curves import CurveRow
from predens.verify import CheckResult, VerificationSummary


def _exit_code(argv):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(argv)
    return excinfo.value.code


def test_parse_args_risk_curve():
    """Test spec flags and comma-separated lists."""
    args = cli.parse_args(["risk-curve", "--constraint", "rectangle", "--p", "2", "--m", "1,2", "--estimators", "mle"])
    assert args.command == "risk-curve"
    assert args.m == [1.0, 2.0]
    assert args.estimators == "mle"
    assert args.sigma1_sq is None


def test_parse_args_dominance_schemes():
    """Test the repeatable scheme flag."""
    args = cli.parse_args(["dominance", "--scheme", "2,1,1", "--scheme", "1,1,4"])
    assert args.scheme == [[2.0, 1.0, 1.0], [1.0, 1.0, 4.0]]
    assert args.psi == "mle"


def test_usage_error_exit_code():
    """Test argparse errors map to the validation exit code."""
    assert _exit_code(["dominance", "--scheme", "2,1"]) == EXIT_VALIDATION_ERROR
    assert _exit_code(["no-such-command"]) == EXIT_VALIDATION_ERROR


def test_risk_curve_writes_csv(tmp_path):
    """Test risk-curve output file and plot data."""
    output = tmp_path / "out" / "curve.csv"
    plot = tmp_path / "out" / "plot.csv"
    code = _exit_code(
        [
            "risk-curve",
            "--estimators", "mle",
            "--grid-min", "0", "--grid-max", "1", "--grid-steps", "3",
            "--output", str(output),
            "--plot-data", str(plot),
        ]
    )
    assert code == EXIT_OK
    lines = output.read_text().splitlines()
    assert lines[0] == "delta,estimator,risk,std_error,ratio_vs_mre"
    assert len(lines) == 1 + 3 * 2
    assert lines[1].startswith("0,mle,0.375,")
    assert plot.read_text().splitlines()[0] == "delta,mle,mre"


def test_risk_curve_stdout_is_plain_csv(capsys):
    """Test that stdout carries only the CSV when no output file is given."""
    code = _exit_code(["risk-curve", "--estimators", "mre", "--grid-steps", "3", "--grid-max", "1"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["delta", "estimator", "risk", "std_error", "ratio_vs_mre"]
    assert len(rows) == 4
    assert all(len(row) == 5 and row[1] == "mre" for row in rows[1:])
    assert "[cli]" not in out


def test_risk_curve_invalid_grid():
    """Test a validation error exits with code 1."""
    assert _exit_code(["risk-curve", "--grid-steps", "1"]) == EXIT_VALIDATION_ERROR


def test_risk_curve_missing_config(tmp_path):
    """Test a missing config file exits with code 1."""
    assert _exit_code(["risk-curve", "--config", str(tmp_path / "none.toml")]) == EXIT_VALIDATION_ERROR


def test_risk_curve_unknown_estimator(tmp_path):
    """Test an unknown estimator name exits with code 1."""
    code = _exit_code(["risk-curve", "--estimators", "median", "--output", str(tmp_path / "c.csv")])
    assert code == EXIT_VALIDATION_ERROR


def test_figure_uses_config_run_keys(tmp_path, monkeypatch):
    """Test figure passes run.* keys from the config file and flags win."""
    config = tmp_path / "run.toml"
    config.write_text("[run]\nmethod = \"mc\"\nmc_samples = 5000\nseed = 3\n")
    captured = {}

    def fake_run_figure(figure_id, **kwargs):
        captured["id"] = figure_id
        captured.update(kwargs)
        return [CurveRow(0.0, "mre", 0.5, 0.0, 1.0)]

    monkeypatch.setattr(cli, "run_figure", fake_run_figure)
    output = tmp_path / "fig.csv"
    code = _exit_code(["figure", "2", "--config", str(config), "--seed", "9", "--output", str(output)])
    assert code == EXIT_OK
    assert captured["id"] == 2
    assert captured["method"] == "mc"
    assert captured["mc_samples"] == 5000
    assert captured["seed"] == 9
    assert output.read_text().splitlines()[1] == "0,mre,0.5,0,1"


def test_dominance_report(tmp_path):
    """Test the dominance report for the order constraint."""
    output = tmp_path / "report.txt"
    code = _exit_code(["dominance", "--scheme", "2,1,1", "--scheme", "1,1,4", "--output", str(output)])
    assert code == EXIT_OK
    text = output.read_text()
    assert "psi = mle" in text
    assert "r_lower = 0.75" in text
    assert "exact = true" in text
    assert "persistence (2, 1, 1) = holds = true" in text
    assert "persistence (1, 1, 4) = holds = false" in text
    assert "alpha = 0: sigma_z1_sq" in text


def test_build_dominance_report_alphas():
    """Test gamma0 at c = 1 and its omission at alpha = 1."""
    config = cli.load_config(None, {"dominance.alphas": [0.0, 1.0], "dominance.c": 1.0})
    lines = cli.build_dominance_report(config).splitlines()
    alpha_lines = [line for line in lines if line.startswith("alpha = ")]
    assert len(alpha_lines) == 2
    assert "gamma0 = 2" in alpha_lines[0] and "dual_scale = 4" in alpha_lines[0]
    assert "gamma0" not in alpha_lines[1]


def test_density_eval(tmp_path):
    """Test the mre density table against N(0, 2)."""
    output = tmp_path / "density.csv"
    code = _exit_code(
        [
            "density-eval", "--estimator", "mre", "--x1", "0", "--x2", "0",
            "--y-min", "-2", "--y-max", "2", "--y-steps", "5", "--output", str(output),
        ]
    )
    assert code == EXIT_OK
    lines = output.read_text().splitlines()
    assert lines[0] == "y,density"
    assert len(lines) == 6
    y, density = (float(v) for v in lines[3].split(","))
    assert y == 0.0
    assert density == pytest.approx(1.0 / math.sqrt(4.0 * math.pi), rel=1e-9)


def test_density_eval_rejects_short_grid(tmp_path):
    """Test y-steps below two."""
    code = _exit_code(["density-eval", "--estimator", "mre", "--x1", "0", "--x2", "0", "--y-steps", "1"])
    assert code == EXIT_VALIDATION_ERROR


def test_verify_exit_codes(tmp_path, monkeypatch):
    """Test verify returns 0 on success and 2 on a failing check."""
    outcomes = {"passed": True}

    def fake_run_verification(level, seed):
        return VerificationSummary(level, (CheckResult("c0", outcomes["passed"]),))

    monkeypatch.setattr(cli, "run_verification", fake_run_verification)
    output = tmp_path / "verify.txt"
    assert _exit_code(["verify", "--output", str(output)]) == EXIT_OK
    assert output.read_text().splitlines()[-1] == "summary = 1/1 passed"

    outcomes["passed"] = False
    assert _exit_code(["verify", "--output", str(output)]) == EXIT_VERIFICATION_FAILED
    assert "c0 = FAIL" in output.read_text()
