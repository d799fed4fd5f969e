"""
Smoke tests for curves module.
Verifies risk curves, quadrature dispatch, Monte Carlo fallback and CSV output.
"""
import math

import pytest

from predens.curves import (
    CurveRow,
    format_curve_csv,
    format_plot_data,
    risk_curve,
    risk_quadrature,
    write_curve_csv,
    write_plot_data,
)
from predens.estimators import LossSpec
from predens.experiment import DeltaGrid, ExperimentConfig
from predens.model import Ball, HalfLineProduct, ProblemSpec
from predens.risk import CLOSED_FORM, MONTE_CARLO, ThetaPoint


ORDER = ProblemSpec(constraint=HalfLineProduct.order())


def _rows_at(rows, delta):
    return {row.estimator: row for row in rows if row.delta == delta}


def test_risk_curve_quadrature_order():
    """Test the order-constraint curve at Delta = 0 and its row layout."""
    config = ExperimentConfig(estimators=("mle", "mle:2", "bayes-uniform"), delta_grid=DeltaGrid(0.0, 2.0, 3))
    rows = risk_curve(config)
    assert len(rows) == 12
    assert [row.estimator for row in rows[:4]] == ["bayes-uniform", "mle", "mle:2", "mre"]
    assert [row.delta for row in rows] == sorted(row.delta for row in rows)

    at_zero = _rows_at(rows, 0.0)
    assert at_zero["mre"].risk == pytest.approx(math.log(2) / 2, abs=1e-12)
    assert at_zero["mre"].ratio_vs_mre == 1.0
    assert at_zero["mle"].risk == pytest.approx(0.375, abs=1e-8)
    assert at_zero["mle"].ratio_vs_mre == pytest.approx(1.082, abs=1e-3)
    assert at_zero["bayes-uniform"].ratio_vs_mre == pytest.approx(1.0, abs=1e-8)
    assert all(row.std_error == 0.0 for row in rows)


def test_risk_curve_bayes_improves_away_from_boundary():
    """Test the Bayes ratio drops below one for Delta > 0."""
    config = ExperimentConfig(estimators=("bayes-uniform",), delta_grid=DeltaGrid(0.5, 1.5, 2))
    rows = risk_curve(config)
    for row in rows:
        if row.estimator == "bayes-uniform":
            assert row.ratio_vs_mre < 1.0


def test_risk_curve_tag_and_reference_once():
    """Test tags are appended and mre is not duplicated."""
    config = ExperimentConfig(estimators=("mre", "mle"), delta_grid=DeltaGrid(0.0, 1.0, 2), tag="sigma2_sq=2")
    rows = risk_curve(config)
    names = sorted({row.estimator for row in rows})
    assert names == ["mle[sigma2_sq=2]", "mre[sigma2_sq=2]"]
    assert len(rows) == 4


def test_risk_curve_mc_independent_of_workers():
    """Test per-point seeds make Monte Carlo rows identical across thread counts."""
    base = ExperimentConfig(
        estimators=("mle",), delta_grid=DeltaGrid(0.0, 1.0, 3), method="mc", mc_samples=1000, seed=11
    )
    single = risk_curve(base)
    threaded = risk_curve(base.with_changes(workers=3))
    assert single == threaded
    assert all(row.method == MONTE_CARLO and row.std_error > 0 for row in single)


def test_risk_curve_falls_back_to_monte_carlo():
    """Test a ball constraint falls back to simulation for the restricted mle."""
    spec = ProblemSpec(p=2, constraint=Ball(1.0, 2))
    config = ExperimentConfig(spec=spec, estimators=("mle",), delta_grid=DeltaGrid(0.0, 1.0, 2), mc_samples=2000)
    rows = risk_curve(config)
    methods = {row.estimator: row.method for row in rows}
    assert methods["mre"] == CLOSED_FORM
    assert methods["mle"] == MONTE_CARLO


def test_risk_quadrature_rejects_unsupported():
    """Test unknown names and losses without a closed form."""
    theta = ThetaPoint.from_delta(ORDER, 0.0)
    with pytest.raises(ValueError):
        risk_quadrature("median", ORDER, LossSpec.kl(), theta)
    with pytest.raises(NotImplementedError):
        risk_quadrature("mle", ORDER, LossSpec.hellinger(), theta)


def test_risk_quadrature_plugin_matches_mre():
    """Test plugin:<c> at the mre scale equals mre."""
    theta = ThetaPoint.from_delta(ORDER, 1.0)
    mre = risk_quadrature("mre", ORDER, LossSpec.kl(), theta)
    plugin = risk_quadrature("plugin:2", ORDER, LossSpec.kl(), theta)
    assert plugin.value == pytest.approx(mre.value, abs=1e-12)


def test_format_curve_csv():
    """Test the CSV header and number formatting."""
    rows = [CurveRow(0.0, "mre", 0.5, 0.0, 1.0), CurveRow(0.0, "mle", 0.625, 0.001, 1.25)]
    lines = format_curve_csv(rows).splitlines()
    assert lines[0] == "delta,estimator,risk,std_error,ratio_vs_mre"
    assert lines[1] == "0,mre,0.5,0,1"
    assert lines[2] == "0,mle,0.625,0.001,1.25"


def test_format_plot_data():
    """Test the wide layout with a missing cell."""
    rows = [
        CurveRow(0.0, "mre", 0.5, 0.0, 1.0),
        CurveRow(0.0, "mle", 0.6, 0.0, 1.2),
        CurveRow(1.0, "mre", 0.5, 0.0, 1.0),
    ]
    lines = format_plot_data(rows).splitlines()
    assert lines == ["delta,mle,mre", "0,1.2,1", "1,,1"]


def test_write_outputs(tmp_path):
    """Test CSV writers create parent folders."""
    rows = [CurveRow(0.0, "mre", 0.5, 0.0, 1.0)]
    csv_path = write_curve_csv(rows, tmp_path / "renders" / "curve.csv")
    plot_path = write_plot_data(rows, tmp_path / "renders" / "plot.csv")
    assert csv_path.read_text().startswith("delta,estimator")
    assert plot_path.read_text().splitlines()[0] == "delta,mre"
