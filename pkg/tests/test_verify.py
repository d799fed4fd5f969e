"""
Smoke tests for verify module.
Verifies the check runner, the negative control and the text summary.
"""
import math

import pytest
from scipy.stats import norm

from predens.model import HalfLineProduct, Interval, ProblemSpec
from predens.verify import (
    FAST_CHECKS,
    FULL_CHECKS,
    CheckResult,
    VerificationSummary,
    posterior_moments_quadrature,
    run_verification,
)


def test_fast_checks_subset_of_full():
    """Test every fast check also runs at the full level."""
    assert set(FAST_CHECKS) <= set(FULL_CHECKS)
    assert "diagonal-identity" in FAST_CHECKS


def test_selected_fast_checks_pass():
    """Test cheap closed-form checks pass."""
    summary = run_verification("fast", only=("c0", "diagonal-identity", "expansion-intervals"))
    assert summary.passed, summary.to_text()
    assert [check.name for check in summary.checks] == ["c0", "diagonal-identity", "expansion-intervals"]


def test_order_risk_difference_check_passes():
    """Test the order risk difference check."""
    summary = run_verification("fast", only=("order-risk-difference",))
    assert summary.passed, summary.to_text()


def test_corrupted_sigma_t_fails_identity():
    """Test the negative control: a wrong sigma_T^2 must fail."""
    summary = run_verification("fast", sigma_t_sq=5.0, only=("diagonal-identity",))
    assert not summary.passed
    assert summary.failures[0].name == "diagonal-identity"


def test_unknown_level_and_check():
    """Test invalid levels and check names."""
    with pytest.raises(ValueError):
        run_verification("thorough")
    with pytest.raises(ValueError):
        run_verification("fast", only=("kl-plugin-mc",))


def test_summary_text():
    """Test the key-value report layout."""
    summary = VerificationSummary(
        "fast", (CheckResult("c0", True, "c0(1.75) = 3.480660"), CheckResult("persistence", False, "case (i)"))
    )
    lines = summary.to_text().splitlines()
    assert lines[0] == "level = fast"
    assert lines[1] == "c0 = pass (c0(1.75) = 3.480660)"
    assert lines[2] == "persistence = FAIL (case (i))"
    assert lines[-1] == "summary = 1/2 passed"
    assert not summary.passed


def test_posterior_moments_order():
    """Test the posterior mean against the inverse Mills ratio form."""
    spec = ProblemSpec(constraint=HalfLineProduct.order())
    mean, var = posterior_moments_quadrature(-0.5, 0.0, spec)
    t = -0.5 / math.sqrt(2.0)
    expected = -0.5 + norm.pdf(t) / norm.cdf(t) / math.sqrt(2.0)
    assert mean == pytest.approx(expected, abs=1e-6)
    assert 0.0 < var < 1.0


def test_posterior_moments_interval_symmetry():
    """Test the posterior mean is odd in the data for a symmetric interval."""
    spec = ProblemSpec(constraint=Interval(1.0))
    left, _ = posterior_moments_quadrature(-0.7, 0.0, spec)
    right, _ = posterior_moments_quadrature(0.7, 0.0, spec)
    assert left == pytest.approx(-right, abs=1e-8)
