"""
Smoke tests for model module.
Verifies constraint sets, problem specifications and the rotated frame.
"""
import math

import numpy as np
import pytest

from predens.model import (
    Ball,
    HalfLineProduct,
    Interval,
    MisspecScheme,
    ProblemSpec,
    Rectangle,
    constraint_probability,
    project_onto,
    reduce_bivariate_correlated,
    reduce_linear,
    rotate,
    unconstrained,
)


def test_problem_spec_derived_quantities():
    """Test r, var_w1 and var_w2 for unequal variances."""
    spec = ProblemSpec(sigma1_sq=2.0, sigma2_sq=1.0, sigmaY_sq=1.0)
    assert spec.r == pytest.approx(0.5)
    assert spec.var_w1 == pytest.approx(2.0 / 1.5)
    assert spec.var_w2 == pytest.approx(1.0 / 1.5)
    assert spec.var_diff == pytest.approx(3.0)
    assert spec.true_scheme.is_identity


def test_problem_spec_validation():
    """Test that bad variances, dimensions and mismatched constraints raise ValueError."""
    with pytest.raises(ValueError):
        ProblemSpec(sigma1_sq=0.0)
    with pytest.raises(ValueError):
        ProblemSpec(p=0)
    with pytest.raises(ValueError):
        ProblemSpec(p=2, constraint=HalfLineProduct.order(1))


def test_misspec_scheme_validation():
    """Test that non-positive multipliers are rejected."""
    with pytest.raises(ValueError):
        MisspecScheme(1.0, -1.0, 1.0)
    assert not MisspecScheme(2.0, 1.0, 1.0).is_identity


def test_rotate_reconstructs_data():
    """Test that (w1, w2) maps back to (x1, x2)."""
    spec = ProblemSpec(sigma1_sq=1.0, sigma2_sq=3.0)
    frame = rotate(np.array([0.4, -1.0]), np.array([1.2, 0.3]), spec, theta1=1.0, theta2=0.0)
    assert frame.w1[:, 0] == pytest.approx((np.array([0.4, -1.0]) - np.array([1.2, 0.3])) / 4.0)
    x1, x2 = frame.reconstruct()
    assert x1[:, 0] == pytest.approx([0.4, -1.0])
    assert x2[:, 0] == pytest.approx([1.2, 0.3])
    assert frame.mu1[0] == pytest.approx(0.25)
    assert frame.mu2[0] == pytest.approx(0.75)


def test_rotate_dimension_mismatch():
    """Test that a wrong data dimension raises ValueError."""
    spec = ProblemSpec(p=2, constraint=HalfLineProduct.order(2))
    with pytest.raises(ValueError):
        rotate(np.zeros(3), np.zeros(3), spec)


def test_half_line_product():
    """Test membership, projection and probability for an order constraint."""
    A = HalfLineProduct.order(2, bound=0.5)
    assert A.is_order and not A.is_unconstrained
    assert A.contains([1.0, 0.5]) and not A.contains([1.0, 0.4])
    assert project_onto(A, [[-1.0, 2.0]])[0] == pytest.approx([0.5, 2.0])
    assert constraint_probability(A, [0.5, 0.5], 1.0) == pytest.approx(0.25)
    assert "0.5" in A.describe()


def test_unconstrained_sentinel():
    """Test that A = R^p has probability one and identity projection."""
    A = unconstrained(2)
    assert A.is_unconstrained
    assert constraint_probability(A, [3.0, -4.0], 1.0) == pytest.approx(1.0)
    assert project_onto(A, [[3.0, -4.0]])[0] == pytest.approx([3.0, -4.0])


def test_interval_truncated_mean_symmetric():
    """Test that the truncated mean is zero at the center of the interval."""
    A = Interval(1.0)
    assert A.truncated_mean(0.0, 1.0)[0] == pytest.approx(0.0, abs=1e-15)
    assert 0.0 < A.truncated_mean(2.0, 1.0)[0] < 1.0
    with pytest.raises(ValueError):
        Interval(0.0)


def test_rectangle_probability_factorizes():
    """Test that the rectangle probability is a product over coordinates."""
    A = Rectangle((1.0, 2.0))
    expected = constraint_probability(Interval(1.0), 0.3, 1.0) * constraint_probability(Interval(2.0), -0.1, 1.0)
    assert constraint_probability(A, [0.3, -0.1], 1.0) == pytest.approx(expected)
    assert A.scaled(2.0).m == (2.0, 4.0)


def test_ball_projection_and_probability():
    """Test ball projection and the noncentral chi-square probability."""
    A = Ball(1.0, 2)
    assert project_onto(A, [[3.0, 4.0]])[0] == pytest.approx([0.6, 0.8])
    # ||T||^2 ~ chi2_2 at the origin: P(||T|| <= 1) = 1 - exp(-1/2)
    assert constraint_probability(A, [0.0, 0.0], 1.0) == pytest.approx(1.0 - math.exp(-0.5), abs=1e-12)


def test_projection_idempotent_and_nonexpansive():
    """Test P(P(u)) = P(u) and ||P(u) - P(v)|| <= ||u - v|| on random pairs."""
    rng = np.random.default_rng(17)
    sets = (
        HalfLineProduct.order(1),
        HalfLineProduct((0.5, -math.inf, -1.0)),
        Interval(1.0),
        Rectangle((1.0, 0.25)),
        Ball(1.0, 2),
        Ball(2.5, 3),
    )
    for A in sets:
        u = 3.0 * rng.standard_normal((500, A.dim))
        v = 3.0 * rng.standard_normal((500, A.dim))
        pu, pv = project_onto(A, u), project_onto(A, v)
        assert np.all(A.contains(pu))
        assert np.allclose(project_onto(A, pu), pu, atol=1e-12)
        gap = np.linalg.norm(pu - pv, axis=-1)
        assert np.all(gap <= np.linalg.norm(u - v, axis=-1) + 1e-12)


def test_ball_truncated_mean_shrinks():
    """Test that the truncated mean lies inside the ball along mu."""
    A = Ball(1.0, 2)
    mean = A.truncated_mean([[2.0, 0.0]], 1.0)[0]
    assert 0.0 < mean[0] < 1.0
    assert mean[1] == pytest.approx(0.0, abs=1e-15)


def test_reduce_linear_identity_and_scaling():
    """Test the trivial reduction and variance scaling."""
    spec = ProblemSpec()
    same, _ = reduce_linear(1.0, 1.0, 0.0, spec)
    assert same == spec
    scaled, transform = reduce_linear(2.0, 1.0, 0.5, spec)
    assert scaled.sigma1_sq == pytest.approx(4.0)
    assert scaled.sigmaY_sq == pytest.approx(4.0)
    x1, x2, y1 = transform(1.0, 1.0, 1.0)
    assert (float(x1), float(x2), float(y1)) == pytest.approx((2.0, 0.5, 2.0))
    with pytest.raises(ValueError):
        reduce_linear(0.0, 1.0, 0.0, spec)


def test_reduce_bivariate_correlated_constants():
    """Test the induced constraint constants at rho = 1/sqrt(3)."""
    _, (c1, c2, d), _ = reduce_bivariate_correlated(1.0 / math.sqrt(3.0), ProblemSpec())
    assert c1 == pytest.approx(0.4226, abs=1e-4)
    assert c2 == pytest.approx(1.1547, abs=1e-4)
    assert d == 0.0
    with pytest.raises(ValueError):
        reduce_bivariate_correlated(1.0, ProblemSpec())
    with pytest.raises(ValueError):
        reduce_bivariate_correlated(0.5, ProblemSpec(sigma2_sq=4.0))


def test_reduce_bivariate_correlated_preserves_difference():
    """Test the correlated then linear reduction keeps theta1 - theta2 on simulated pairs."""
    rho, theta1, theta2 = 0.5, 1.3, 0.4
    spec = ProblemSpec(sigma1_sq=1.0, sigma2_sq=2.25)
    new_spec, (c1, c2, d), decorrelate = reduce_bivariate_correlated(rho, spec)
    linear_spec, rescale = reduce_linear(c1, c2, d, new_spec)

    m1, m2, _ = rescale(*decorrelate(theta1, theta2, 0.0)[:2], 0.0)
    assert np.asarray(m1 - m2).item() == pytest.approx(theta1 - theta2, abs=1e-12)

    rng = np.random.default_rng(5)
    z = rng.standard_normal((2, 200_000))
    x1 = theta1 + z[0]
    x2 = theta2 + 1.5 * (rho * z[0] + math.sqrt(1.0 - rho * rho) * z[1])
    u1, u2, _ = rescale(*decorrelate(x1, x2, 0.0)[:2], 0.0)
    assert np.mean(u1 - u2) == pytest.approx(theta1 - theta2, abs=0.015)
    assert abs(np.corrcoef(u1, u2)[0, 1]) < 0.01
    assert np.var(u1) == pytest.approx(linear_spec.sigma1_sq, rel=0.02)
    assert np.var(u2) == pytest.approx(linear_spec.sigma2_sq, rel=0.02)


def test_reduce_bivariate_correlated_decorrelates():
    """Test that the transformed second coordinate is uncorrelated with X1."""
    rho = 0.5
    rng = np.random.default_rng(3)
    z = rng.standard_normal((2, 200_000))
    x1 = z[0]
    x2 = rho * z[0] + math.sqrt(1.0 - rho * rho) * z[1]
    new_spec, _, transform = reduce_bivariate_correlated(rho, ProblemSpec())
    t1, t2, _ = transform(x1, x2, 0.0)
    assert abs(np.corrcoef(t1, t2)[0, 1]) < 0.01
    assert np.var(t2) == pytest.approx(new_spec.sigma2_sq, rel=0.02)
