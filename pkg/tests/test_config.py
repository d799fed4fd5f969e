"""
Smoke tests for config module.
Verifies that config values are valid and accessible.
"""
import pytest

from predens import config


def test_config_values_exist():
    """Verify numerical constants exist and have valid types."""
    assert isinstance(config.QUADRATURE_ORDERS, tuple)
    assert all(isinstance(x, int) and x > 0 for x in config.QUADRATURE_ORDERS)
    assert list(config.QUADRATURE_ORDERS) == sorted(config.QUADRATURE_ORDERS)

    assert isinstance(config.QUADRATURE_TOL, float)
    assert 0 < config.QUADRATURE_TOL < 1e-6

    assert config.MILLS_LOG_SPACE_BELOW < 0

    assert isinstance(config.DEFAULT_SEED, int)
    assert isinstance(config.DEFAULT_MC_SAMPLES, int)
    assert config.DEFAULT_MC_SAMPLES >= config.MIN_MC_SAMPLES > 0
    assert config.MC_CHUNK_SIZE > 0

    assert config.SE_BAND > 0


def test_curve_defaults():
    """Verify risk curve defaults and CSV settings."""
    lo, hi, steps = config.DEFAULT_DELTA_GRID
    assert hi > lo
    assert isinstance(steps, int) and steps >= 2

    assert config.DEFAULT_ESTIMATORS[0] == "mre"
    assert config.CSV_HEADER == ("delta", "estimator", "risk", "std_error", "ratio_vs_mre")
    assert config.CSV_SIGNIFICANT_DIGITS >= 6


def test_exit_codes_distinct():
    """Verify exit codes are the documented 0/1/2."""
    assert (config.EXIT_OK, config.EXIT_VALIDATION_ERROR, config.EXIT_VERIFICATION_FAILED) == (0, 1, 2)
