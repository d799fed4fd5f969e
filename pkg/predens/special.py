"""
Special functions module.

Standard normal pdf/cdf with deep-tail log-cdf, the inverse Mills ratio,
Gauss-Hermite and Gauss-Legendre rules, the skew-normal normalizers K_n and
J_n, the bivariate normal cdf and the noncentral chi-square cdf.

Every function accepts scalars or numpy arrays; scalar input gives a float.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss
from scipy.special import gammainc, gammaln, ndtr, xlogy
from scipy.special import log_ndtr as scipy_log_ndtr

from predens.config import (
    LEGENDRE_ORDERS,
    MILLS_LOG_SPACE_BELOW,
    POISSON_MAX_TERMS,
    POISSON_TAIL_TOL,
    QUADRATURE_ORDERS,
    QUADRATURE_TOL,
)

__all__ = [
    "QuadratureError",
    "QuadratureRule",
    "gauss_hermite_rule",
    "gauss_legendre_rule",
    "gauss_hermite_expect",
    "gauss_legendre_integrate",
    "log_ndtr",
    "ndtr_diff",
    "log_ndtr_diff",
    "mills",
    "inverse_mills",
    "std_normal_pdf",
    "std_normal_cdf",
    "log_std_normal_cdf",
    "log_std_normal_pdf",
    "truncated_std_normal_mean",
    "k_n",
    "j_n",
    "k1_closed_form",
    "j1_closed_form",
    "j2_closed_form",
    "bivariate_normal_cdf",
    "noncentral_chi2_cdf",
]

logger = logging.getLogger("predens.special")

SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
SQRT2 = math.sqrt(2.0)

GAUSS_HERMITE = "gauss-hermite-probabilist"
GAUSS_LEGENDRE = "gauss-legendre"


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature fails to converge at the largest order."""


@dataclass(frozen=True)
class QuadratureRule:
    """
    Nodes and weights of a quadrature rule.

    Attributes:
        nodes: Abscissae in increasing order (read-only array)
        weights: Positive weights summing to the measure's total mass
        kind: GAUSS_HERMITE (standard normal weight, mass 1) or
            GAUSS_LEGENDRE (Lebesgue measure on [-1, 1], mass 2)
    """
    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    @property
    def order(self) -> int:
        return len(self.nodes)


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values


@lru_cache(maxsize=None)
def gauss_hermite_rule(order: int) -> QuadratureRule:
    """Probabilist Gauss-Hermite rule: sum(w * g(nodes)) approximates E g(Z), Z ~ N(0, 1)."""
    if order < 1:
        raise ValueError(f"Quadrature order must be >= 1, got {order}")
    nodes, weights = hermegauss(order)
    return QuadratureRule(_frozen(nodes), _frozen(weights / SQRT_2PI), GAUSS_HERMITE)


@lru_cache(maxsize=None)
def gauss_legendre_rule(order: int) -> QuadratureRule:
    """Gauss-Legendre rule on [-1, 1]."""
    if order < 1:
        raise ValueError(f"Quadrature order must be >= 1, got {order}")
    nodes, weights = leggauss(order)
    return QuadratureRule(_frozen(nodes), _frozen(weights), GAUSS_LEGENDRE)


def gauss_hermite_expect(
    integrand: Callable[[np.ndarray], np.ndarray],
    tol: float = QUADRATURE_TOL,
    orders: Sequence[int] = QUADRATURE_ORDERS,
) -> np.ndarray:
    """
    Adaptive evaluation of E g(Z) for Z ~ N(0, 1).

    The integrand maps the node vector of shape (K,) to an array of shape
    (..., K); the expectation is taken over the last axis. Orders escalate
    until two successive orders agree within tol (relative to max(1, |value|)).

    Args:
        integrand: Vectorized function of the nodes
        tol: Agreement tolerance between successive orders
        orders: Escalation ladder

    Returns:
        Array of shape (...) with the expectations

    Raises:
        QuadratureError: If the last two orders still disagree
    """
    previous = None
    gap = float("nan")
    for order in orders:
        rule = gauss_hermite_rule(order)
        value = np.asarray(integrand(rule.nodes), dtype=float) @ rule.weights
        if previous is not None:
            gap = float(np.max(np.abs(value - previous))) if value.size else 0.0
            scale = max(1.0, float(np.max(np.abs(value)))) if value.size else 1.0
            if gap <= tol * scale:
                return value
            logger.debug(f"Gauss-Hermite order {order} gap {gap:.3e}, escalating")
        previous = value
    raise QuadratureError(
        f"Gauss-Hermite quadrature did not converge at order {orders[-1]} (gap {gap:.3e})"
    )


def gauss_legendre_integrate(
    integrand: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    tol: float = 1e-13,
    orders: Sequence[int] = LEGENDRE_ORDERS,
) -> float:
    """Adaptive Gauss-Legendre integral of a scalar integrand over [lower, upper]."""
    if lower == upper:
        return 0.0
    half = 0.5 * (upper - lower)
    mid = 0.5 * (upper + lower)
    previous = None
    for order in orders:
        rule = gauss_legendre_rule(order)
        value = half * float(np.dot(integrand(mid + half * rule.nodes), rule.weights))
        if previous is not None and abs(value - previous) <= tol * max(1.0, abs(value)):
            return value
        previous = value
    raise QuadratureError(f"Gauss-Legendre quadrature did not converge at order {orders[-1]}")


def _finite(z, name: str = "z") -> np.ndarray:
    values = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return values


def _out(values: np.ndarray, like):
    """Return a float for scalar input, the array otherwise."""
    if np.ndim(like) == 0:
        return float(values)
    return values


def log_ndtr(z) -> np.ndarray:
    """log Phi(z) without input validation; accepts +-inf."""
    return scipy_log_ndtr(np.asarray(z, dtype=float))


def ndtr_diff(upper, lower) -> np.ndarray:
    """Phi(upper) - Phi(lower) for upper >= lower, computed in the lighter tail."""
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    return np.where(lower > 0, ndtr(-lower) - ndtr(-upper), ndtr(upper) - ndtr(lower))


def log_ndtr_diff(upper, lower) -> np.ndarray:
    """log(Phi(upper) - Phi(lower)) for upper > lower; either end may be infinite."""
    upper, lower = np.broadcast_arrays(np.asarray(upper, dtype=float), np.asarray(lower, dtype=float))
    flip = lower > 0
    hi = np.where(flip, -lower, upper)
    lo = np.where(flip, -upper, lower)
    log_hi = log_ndtr(hi)
    log_lo = log_ndtr(lo)
    with np.errstate(divide="ignore"):
        return log_hi + np.log1p(-np.exp(log_lo - log_hi))


def mills(z) -> np.ndarray:
    """phi(z)/Phi(z) without validation; switches to log space below the Mills threshold."""
    values = np.asarray(z, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        direct = np.exp(-0.5 * values * values) / SQRT_2PI / ndtr(values)
        logged = np.exp(-0.5 * values * values - LOG_SQRT_2PI - log_ndtr(values))
    return np.where(values < MILLS_LOG_SPACE_BELOW, logged, direct)


def std_normal_pdf(z):
    """Standard normal density exp(-z^2/2)/sqrt(2 pi)."""
    values = _finite(z)
    return _out(np.exp(-0.5 * values * values) / SQRT_2PI, z)


def std_normal_cdf(z):
    """Standard normal distribution function."""
    return _out(ndtr(_finite(z)), z)


def log_std_normal_cdf(z):
    """log Phi(z), finite and accurate far into the lower tail."""
    return _out(log_ndtr(_finite(z)), z)


def inverse_mills(z):
    """
    Inverse Mills ratio R(z) = phi(z)/Phi(z).

    Args:
        z: Finite scalar or array

    Returns:
        Strictly positive values, decreasing in z

    Raises:
        ValueError: If any input is not finite
    """
    return _out(mills(_finite(z)), z)


def _check_power(n) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n} (K_0 and J_0 are identically 1)")
    return n


def k_n(n: int, a0, a1):
    """
    K_n(a0, a1) = integral of phi(z) Phi^n(a0 + a1 z) dz.

    Vectorized over a0 and a1 (broadcast together). Equals the equicorrelated
    orthant probability of an n-variate normal with correlation a1^2/(1+a1^2).

    Raises:
        ValueError: For n < 1 or non-finite parameters
        QuadratureError: If the quadrature ladder is exhausted
    """
    n = _check_power(n)
    a0v, a1v = np.broadcast_arrays(_finite(a0, "a0"), _finite(a1, "a1"))

    def integrand(z):
        return ndtr(a0v[..., None] + a1v[..., None] * z) ** n

    return _out(gauss_hermite_expect(integrand), a0v)


def j_n(n: int, a0, a1, a2):
    """
    J_n(a0, a1, a2) = integral of phi(z) {Phi(a0 + a1 z) - Phi(a2 + a1 z)}^n dz.

    Raises:
        ValueError: Unless a0 > a2 everywhere
    """
    n = _check_power(n)
    a0v, a1v, a2v = np.broadcast_arrays(_finite(a0, "a0"), _finite(a1, "a1"), _finite(a2, "a2"))
    if not np.all(a0v > a2v):
        raise ValueError(f"j_n requires a0 > a2, got a0={a0!r}, a2={a2!r}")

    def integrand(z):
        shift = a1v[..., None] * z
        return ndtr_diff(a0v[..., None] + shift, a2v[..., None] + shift) ** n

    return _out(gauss_hermite_expect(integrand), a0v)


def k1_closed_form(a0, a1):
    """K_1(a0, a1) = Phi(a0 / sqrt(1 + a1^2))."""
    a0v, a1v = np.asarray(a0, dtype=float), np.asarray(a1, dtype=float)
    return _out(ndtr(a0v / np.sqrt(1.0 + a1v * a1v)), a0v + a1v)


def j1_closed_form(a0, a1, a2):
    """J_1(a0, a1, a2) = Phi(a0') - Phi(a2') with primes denoting division by sqrt(1 + a1^2)."""
    a0v, a1v, a2v = (np.asarray(v, dtype=float) for v in (a0, a1, a2))
    scale = np.sqrt(1.0 + a1v * a1v)
    return _out(ndtr_diff(a0v / scale, a2v / scale), a0v + a1v + a2v)


def j2_closed_form(a0: float, a1: float, a2: float) -> float:
    """J_2 through three bivariate normal cdf terms with correlation a1^2/(1+a1^2)."""
    scale = math.sqrt(1.0 + a1 * a1)
    rho = a1 * a1 / (1.0 + a1 * a1)
    b0, b2 = a0 / scale, a2 / scale
    return (
        bivariate_normal_cdf(b0, b0, rho)
        + bivariate_normal_cdf(b2, b2, rho)
        - 2.0 * bivariate_normal_cdf(b0, b2, rho)
    )


def bivariate_normal_cdf(h: float, k: float, rho: float) -> float:
    """
    P(X <= h, Y <= k) for a standard bivariate normal with correlation rho.

    Integrates the density in the correlation parameter:
    Phi(h)Phi(k) + (1/2pi) * int_0^{asin rho} exp(-(h^2 + k^2 - 2hk sin t) / (2 cos^2 t)) dt.

    Raises:
        ValueError: If |rho| >= 1 or h, k are not finite
    """
    h = float(_finite(h, "h"))
    k = float(_finite(k, "k"))
    if not abs(rho) < 1.0:
        raise ValueError(f"bivariate_normal_cdf requires |rho| < 1, got {rho}")

    def integrand(theta):
        sin_t = np.sin(theta)
        cos_sq = np.cos(theta) ** 2
        return np.exp(-(h * h + k * k - 2.0 * h * k * sin_t) / (2.0 * cos_sq))

    correction = gauss_legendre_integrate(integrand, 0.0, math.asin(rho)) / (2.0 * math.pi)
    value = float(ndtr(h) * ndtr(k)) + correction
    return min(1.0, max(0.0, value))


def noncentral_chi2_cdf(p: int, lam, x):
    """
    Distribution function F_{p,lam}(x) of a noncentral chi-square.

    Poisson mixture of central chi-square cdfs (regularized incomplete gamma).
    Terms are added outward from the index floor(lam/2) in both directions
    until the Poisson mass still missing is below POISSON_TAIL_TOL.

    Args:
        p: Degrees of freedom (positive integer)
        lam: Noncentrality, >= 0 (scalar or array)
        x: Evaluation point, >= 0 (scalar or array)

    Returns:
        Probability (float for scalar inputs)
    """
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise ValueError(f"Degrees of freedom must be a positive integer, got {p!r}")
    lam_v = _finite(lam, "lambda")
    x_v = _finite(x, "x")
    if np.any(lam_v < 0) or np.any(x_v < 0):
        raise ValueError("noncentral_chi2_cdf requires lambda >= 0 and x >= 0")
    lam_b, x_b = np.broadcast_arrays(lam_v, x_v)
    mu = 0.5 * lam_b
    center = np.floor(mu)
    half_x = 0.5 * x_b

    total = np.zeros(lam_b.shape)
    mass = np.zeros(lam_b.shape)

    def add(index: np.ndarray) -> None:
        valid = index >= 0
        j = np.where(valid, index, 0.0)
        weight = np.where(valid, np.exp(xlogy(j, mu) - mu - gammaln(j + 1.0)), 0.0)
        mass[...] += weight
        total[...] += weight * gammainc(0.5 * p + j, half_x)

    add(center)
    step = 0
    while np.any(1.0 - mass >= POISSON_TAIL_TOL):
        step += 1
        if step > POISSON_MAX_TERMS:
            logger.warning(f"Chi-square series stopped after {POISSON_MAX_TERMS} terms each side")
            break
        add(center + step)
        add(center - step)

    result = np.clip(total, 0.0, 1.0)
    return _out(result, lam_b)


def log_std_normal_pdf(z) -> np.ndarray:
    """log phi(z) without validation; -inf at +-inf."""
    values = np.asarray(z, dtype=float)
    return -0.5 * values * values - LOG_SQRT_2PI


def truncated_std_normal_mean(lower, upper) -> np.ndarray:
    """
    E[Z | lower <= Z <= upper] for Z ~ N(0, 1); bounds may be infinite.

    Works on the side of the lighter tail and in log space so that
    intervals far in either tail keep full relative accuracy.
    """
    lower, upper = np.broadcast_arrays(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))
    flip = lower > 0
    lo = np.where(flip, -upper, lower)
    hi = np.where(flip, -lower, upper)
    log_mass = log_ndtr_diff(hi, lo)
    with np.errstate(invalid="ignore", over="ignore"):
        mean = np.exp(log_std_normal_pdf(lo) - log_mass) - np.exp(log_std_normal_pdf(hi) - log_mass)
    return np.where(flip, -mean, mean)
