"""
Smoke tests for dominance module.
Verifies expansion intervals, dual loss parameters and persistence verdicts.
"""
import math

import numpy as np
import pytest

from predens.dominance import (
    ExpansionReport,
    c0,
    default_mu1_grid,
    dual_reflected_scale,
    expansion_gap,
    expansion_report,
    gamma0,
    persistence_case,
    persistence_check,
    r_bounds_numeric,
    r_bounds_order,
    r_floor,
    reflected_affine_map,
    sigma_z1,
)
from predens.estimators import LossSpec, identity_psi, two_step_scale
from predens.model import HalfLineProduct, Interval, MisspecScheme, ProblemSpec, unconstrained
from predens.risk import gaussian_alpha_loss, reflected_normal_loss


ORDER = ProblemSpec(constraint=HalfLineProduct.order())


def test_c0_hand_values():
    """Test c0 at s = 1.75 and s = 2 and the bracket s^2 < c0 < e^s."""
    assert c0(1.75) == pytest.approx(3.48066, abs=2e-5)
    assert c0(2.0) == pytest.approx(4.9215, abs=2e-4)
    for s in (1.1, 1.5, 3.0):
        root = c0(s)
        assert s * s < root < math.exp(s)
        assert abs(expansion_gap(root, s)) < 1e-12


def test_c0_near_one():
    """Test c0(1 + eps) = 1 + 2 eps + O(eps^2) down to eps = 1e-9."""
    for eps in (1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9):
        s = 1.0 + eps
        root = c0(s)
        assert (root - 1.0) / (2.0 * eps) == pytest.approx(1.0, abs=1e-3)
        assert root > s
        assert abs(expansion_gap(root, s)) < 1e-12


def test_c0_near_one_through_callers():
    """Test the two-step factor and the report for a nearly degenerate R bound."""
    spec = ProblemSpec(sigmaY_sq=5e5, constraint=HalfLineProduct.order())
    s = 1.0 + r_floor(spec)
    c = two_step_scale(spec)
    assert s < c < c0(s)
    report = expansion_report(ProblemSpec(sigmaY_sq=1e6))
    assert report.r_lower == pytest.approx(7.5e-7)
    assert report.bounds_hold()


def test_c0_rejects_small_s():
    """Test that s <= 1 raises ValueError."""
    with pytest.raises(ValueError):
        c0(1.0)


def test_r_bounds_order_and_floor():
    """Test closed-form R bounds for unit variances."""
    assert r_bounds_order(ORDER) == pytest.approx((0.75, 1.0))
    assert r_floor(ORDER) == pytest.approx(0.5)
    with pytest.raises(NotImplementedError):
        r_bounds_order(ProblemSpec(constraint=Interval(1.0)))


def test_expansion_report_order():
    """Test the exact report for the mle under the order constraint."""
    report = expansion_report(ORDER)
    assert report.exact
    assert report.c0_value == pytest.approx(3.48066, abs=2e-5)
    assert report.complete_subclass == pytest.approx((1.75, 3.48066), abs=2e-5)
    assert report.minimal_complete == pytest.approx((1.75, 2.0))
    assert report.bounds_hold()
    assert report.nested()
    text = report.to_text()
    assert "r_lower = 0.75" in text
    assert "bound_check = pass" in text


def test_expansion_report_unconstrained_identity():
    """Test that A = R^p with the identity gives R = s1/sY."""
    report = expansion_report(ProblemSpec(constraint=unconstrained(1)), identity_psi)
    assert report.r_lower == pytest.approx(1.0)
    assert report.r_upper == pytest.approx(1.0)


def test_r_bounds_numeric_brackets_exact_bounds():
    """Test that Monte Carlo bounds for the order mle land near the exact ones."""
    grid = default_mu1_grid(ORDER, points=5)
    r_lower, r_upper = r_bounds_numeric(ORDER, None, grid, n=20_000, seed=11)
    assert r_floor(ORDER) <= r_lower <= 0.75 + 0.02
    assert r_upper == pytest.approx(1.0, abs=0.05)
    with pytest.raises(ValueError):
        r_bounds_numeric(ORDER, None, [], n=1000)


def test_expansion_report_validation():
    """Test that inconsistent bounds are rejected."""
    with pytest.raises(ValueError):
        ExpansionReport(0.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        ExpansionReport(1.0, 0.5, 4.0)


def test_gamma0_and_sigma_z1():
    """Test the dual loss scale and variance at alpha = 0, c = 1."""
    assert gamma0(0.0, 1.0, ORDER) == pytest.approx(2.0)
    assert dual_reflected_scale(0.0, 1.0, ORDER) == pytest.approx(4.0)
    assert sigma_z1(0.0, 1.0, ORDER) == pytest.approx(2.0 / 3.0)
    assert sigma_z1(-1.0, 3.0, ORDER) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        gamma0(1.0, 1.0, ORDER)


def test_reflected_affine_map_reproduces_alpha_loss():
    """Test L_alpha = offset + slope * reflected normal loss at the dual scale."""
    spec = ProblemSpec(p=2, sigmaY_sq=0.7, constraint=HalfLineProduct.order(2))
    rng = np.random.default_rng(0)
    centers = rng.normal(size=(50, 2))
    theta1 = np.array([0.3, -0.4])
    for alpha, c in ((-0.5, 1.5), (0.0, 2.0), (0.6, 1.2)):
        offset, slope = reflected_affine_map(alpha, c, spec)
        assert slope > 0
        dist_sq = np.sum((centers - theta1) ** 2, axis=-1)
        direct = gaussian_alpha_loss(c * spec.sigmaY_sq, dist_sq, spec.sigmaY_sq, spec.p, LossSpec(alpha))
        dual = offset + slope * reflected_normal_loss(centers, theta1, dual_reflected_scale(alpha, c, spec))
        assert direct == pytest.approx(dual, abs=1e-12)


def test_persistence_verdicts():
    """Test persistence for the named cases and a failing scheme."""
    assert persistence_check(ORDER, MisspecScheme(1.0, 1.0, 1.0)).case == "i"
    assert persistence_case(ORDER, MisspecScheme(2.0, 2.0, 1.0)) == "ii"
    verdict = persistence_check(ORDER, MisspecScheme(2.0, 1.0, 1.0))
    assert verdict.holds
    assert verdict.case == "iii"
    assert verdict.sigma_u_sq == pytest.approx(7.0 / 6.0)
    failing = persistence_check(ORDER, MisspecScheme(1.0, 1.0, 4.0))
    assert not failing.holds
    assert failing.case is None
    assert "holds = false" in failing.to_text()


def test_persistence_check_requires_order():
    """Test that an interval constraint raises ValueError."""
    with pytest.raises(ValueError):
        persistence_check(ProblemSpec(constraint=Interval(1.0)), MisspecScheme())
