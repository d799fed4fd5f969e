"""
Smoke tests for skewnormal module.
Verifies densities, means and the rejection sampler.
"""
import math

import numpy as np
import pytest

from predens.skewnormal import (
    SkewNormalGB,
    SkewNormalInterval,
    interval_mean,
    interval_pdf,
    mean,
    pdf,
    rejection_sample,
    sample,
)


GRID = np.linspace(-14.0, 14.0, 40001)


def test_zero_slope_is_normal():
    """Test that alpha1 = 0 reduces to the normal location-scale family."""
    d = SkewNormalGB(1, 0.0, 0.0, xi=1.0, tau=2.0)
    assert pdf(d, 1.0) == pytest.approx(1.0 / (2.0 * math.sqrt(2.0 * math.pi)))
    assert mean(d) == pytest.approx(1.0)


def test_density_integrates_to_one():
    """Test normalization for several powers and slopes."""
    for d in (SkewNormalGB(1, 0.3, 2.0), SkewNormalGB(3, 0.5, -0.8, xi=0.2, tau=1.3)):
        assert np.trapezoid(d.pdf(GRID), GRID) == pytest.approx(1.0, abs=1e-6)


def test_mean_n1_closed_form():
    """Test E X = delta sqrt(2/pi) for the classical skew-normal."""
    d = SkewNormalGB(1, 0.0, 1.0)
    assert mean(d) == pytest.approx(math.sqrt(0.5) * math.sqrt(2.0 / math.pi), rel=1e-10)


def test_mean_n2_matches_numerical_integral():
    """Test the power-n mean against direct integration."""
    d = SkewNormalGB(2, 0.4, 1.5, xi=-0.3, tau=0.7)
    numeric = np.trapezoid(GRID * d.pdf(GRID), GRID)
    assert mean(d) == pytest.approx(numeric, abs=1e-6)


def test_far_tail_log_pdf_finite():
    """Test that log-density stays finite when the normalizer underflows."""
    d = SkewNormalGB(1, -30.0, 0.5)
    assert math.isfinite(d.log_pdf(0.0))
    assert math.isfinite(d.log_pdf(np.array([-5.0, 5.0])).sum())


def test_invalid_parameters():
    """Test that bad n, tau and interval offsets raise ValueError."""
    with pytest.raises(ValueError):
        SkewNormalGB(0, 0.0, 1.0)
    with pytest.raises(ValueError):
        SkewNormalGB(1, 0.0, 1.0, tau=0.0)
    with pytest.raises(ValueError):
        SkewNormalInterval(1, -1.0, 0.5, 1.0)


def test_interval_density_and_mean():
    """Test the interval variant integrates to one and its n = 1 mean."""
    d = SkewNormalInterval(1, 1.0, 0.8, -2.0, xi=0.1, tau=1.1)
    assert np.trapezoid(d.pdf(GRID), GRID) == pytest.approx(1.0, abs=1e-6)
    numeric = np.trapezoid(GRID * d.pdf(GRID), GRID)
    assert interval_mean(d) == pytest.approx(numeric, abs=1e-6)
    assert interval_pdf(d, 0.4) == pytest.approx(d.pdf(0.4))


def test_interval_mean_needs_n1():
    """Test that the interval mean for n >= 2 is not available."""
    with pytest.raises(NotImplementedError):
        SkewNormalInterval(2, 1.0, 0.8, -1.0).mean()


def test_sampler_matches_mean():
    """Test that sample means agree with the exact mean."""
    d = SkewNormalGB(2, 0.2, 1.2, xi=0.5, tau=0.8)
    draws, rate = rejection_sample(d, 20_000, seed=1)
    assert draws.shape == (20_000,)
    assert rate == pytest.approx(d.normalizer, abs=0.02)
    se = draws.std() / math.sqrt(len(draws))
    assert abs(draws.mean() - mean(d)) < 4.0 * se


def test_sampler_deterministic():
    """Test that equal seeds give identical draws."""
    d = SkewNormalInterval(1, 1.0, 0.5, -1.0)
    assert np.array_equal(sample(d, 500, seed=9), sample(d, 500, seed=9))
    with pytest.raises(ValueError):
        sample(d, 0, seed=9)
