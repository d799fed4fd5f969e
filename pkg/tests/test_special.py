"""
Smoke tests for special module.
Verifies normal tail functions, K_n/J_n and quadrature rules.
"""
import math

import numpy as np
import pytest
from scipy.stats import chi2, ncx2, norm

from predens.special import (
    QuadratureError,
    bivariate_normal_cdf,
    gauss_hermite_expect,
    gauss_hermite_rule,
    inverse_mills,
    j1_closed_form,
    j2_closed_form,
    j_n,
    k1_closed_form,
    k_n,
    log_std_normal_cdf,
    std_normal_cdf,
    std_normal_pdf,
    noncentral_chi2_cdf,
    truncated_std_normal_mean,
)


def test_gauss_hermite_rule_moments():
    """Test that the probabilist rule integrates normal moments exactly."""
    rule = gauss_hermite_rule(32)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.dot(rule.weights, rule.nodes**2) == pytest.approx(1.0, abs=1e-12)
    assert np.dot(rule.weights, rule.nodes**4) == pytest.approx(3.0, abs=1e-11)


def test_gauss_hermite_expect_vectorized():
    """Test E exp(tZ) = exp(t^2/2) for several t at once."""
    t = np.array([0.0, 0.5, 1.0])
    values = gauss_hermite_expect(lambda z: np.exp(t[:, None] * z))
    assert values == pytest.approx(np.exp(0.5 * t * t), rel=1e-10)


def test_gauss_hermite_expect_raises_when_not_converging():
    """Test that a non-smooth integrand exhausts a short ladder."""
    with pytest.raises(QuadratureError):
        gauss_hermite_expect(lambda z: np.sign(z - 0.123), tol=1e-15, orders=(3, 4))


def test_inverse_mills_tails():
    """Test inverse Mills ratio in both tails."""
    assert inverse_mills(0.0) == pytest.approx(2.0 / math.sqrt(2.0 * math.pi))
    assert inverse_mills(8.0) == pytest.approx(5.0523e-15, rel=1e-3)
    far = inverse_mills(-40.0)
    assert math.isfinite(far)
    assert far == pytest.approx(40.025, abs=0.01)


def test_inverse_mills_decreasing():
    """Test that the inverse Mills ratio decreases."""
    values = inverse_mills(np.linspace(-30.0, 10.0, 81))
    assert np.all(np.diff(values) < 0)


def test_inverse_mills_rejects_nonfinite():
    """Test that non-finite input raises ValueError."""
    with pytest.raises(ValueError):
        inverse_mills(float("nan"))


def test_log_std_normal_cdf_lower_tail():
    """Test log Phi stays finite far into the lower tail."""
    assert log_std_normal_cdf(-40.0) == pytest.approx(norm.logcdf(-40.0), rel=1e-10)


def test_std_normal_pdf_and_cdf():
    """Test scalar and array evaluation against scipy."""
    z = np.array([-3.0, -0.5, 0.0, 1.25])
    assert np.allclose(std_normal_pdf(z), norm.pdf(z), rtol=1e-14)
    assert np.allclose(std_normal_cdf(z), norm.cdf(z), rtol=1e-14)
    assert std_normal_cdf(0.0) == pytest.approx(0.5)
    assert std_normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))


def test_k1_matches_closed_form():
    """Test K_1 quadrature against Phi(a0/sqrt(1+a1^2))."""
    for a0, a1 in [(0.0, 1.0), (0.7, -0.4), (-1.5, 0.9)]:
        assert k_n(1, a0, a1) == pytest.approx(k1_closed_form(a0, a1), abs=1e-12)


def test_k2_orthant_probability():
    """Test K_2(0, 1) equals the orthant probability 1/3."""
    assert k_n(2, 0.0, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-10)


def test_k_n_rejects_zero_power():
    """Test that n = 0 raises ValueError."""
    with pytest.raises(ValueError):
        k_n(0, 0.0, 1.0)


def test_j1_and_j2_closed_forms():
    """Test J_1 and J_2 quadrature against their closed forms."""
    assert j_n(1, 1.0, 0.5, -1.0) == pytest.approx(j1_closed_form(1.0, 0.5, -1.0), abs=1e-12)
    assert j_n(2, 1.0, 0.5, -1.0) == pytest.approx(j2_closed_form(1.0, 0.5, -1.0), abs=1e-8)


def test_j_n_requires_ordered_limits():
    """Test that a0 <= a2 raises ValueError."""
    with pytest.raises(ValueError):
        j_n(1, 0.0, 1.0, 0.0)


def test_bivariate_normal_cdf_known_values():
    """Test the bivariate cdf at the origin and at zero correlation."""
    assert bivariate_normal_cdf(0.0, 0.0, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert bivariate_normal_cdf(0.3, -0.2, 0.0) == pytest.approx(norm.cdf(0.3) * norm.cdf(-0.2), abs=1e-14)
    with pytest.raises(ValueError):
        bivariate_normal_cdf(0.0, 0.0, 1.0)


def test_noncentral_chi2_cdf_matches_scipy():
    """Test the Poisson series against scipy's chi-square distributions."""
    assert noncentral_chi2_cdf(1, 0.0, 2.0) == pytest.approx(chi2.cdf(2.0, 1), abs=1e-12)
    for p, lam, x in [(2, 3.0, 4.0), (5, 12.0, 10.0), (3, 40.0, 60.0)]:
        assert noncentral_chi2_cdf(p, lam, x) == pytest.approx(ncx2.cdf(x, p, lam), abs=1e-9)


def test_noncentral_chi2_cdf_validation():
    """Test invalid degrees of freedom and negative arguments."""
    with pytest.raises(ValueError):
        noncentral_chi2_cdf(0, 1.0, 1.0)
    with pytest.raises(ValueError):
        noncentral_chi2_cdf(2, -1.0, 1.0)


def test_truncated_std_normal_mean():
    """Test truncated normal means on half-lines, the real line and far tails."""
    assert float(truncated_std_normal_mean(0.0, np.inf)) == pytest.approx(math.sqrt(2.0 / math.pi))
    assert float(truncated_std_normal_mean(-np.inf, np.inf)) == pytest.approx(0.0, abs=1e-15)
    tail = float(truncated_std_normal_mean(10.0, 11.0))
    assert 10.0 < tail < 11.0
    assert float(truncated_std_normal_mean(-11.0, -10.0)) == pytest.approx(-tail)
