"""
Risk Module.

Alpha-divergence losses of predictive densities and their frequentist risks:

- Closed forms for Gaussian plug-in densities (and the KL/MSE duality)
- Gauss-Hermite quadrature for univariate non-Gaussian densities and for the
  one-dimensional risk-difference representations of the Bayes densities
- Monte Carlo over data draws (and over Y1 for p > 1) everywhere else
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.special import ndtr
from tqdm import tqdm

from predens.config import (
    DEFAULT_MC_SAMPLES,
    DEFAULT_SEED,
    LOSS_MC_SAMPLES,
    MC_CHUNK_SIZE,
    MIN_MC_SAMPLES,
    SE_BAND,
)
from predens.estimators import DensityBatch, LossSpec, PredictiveDensity
from predens.model import HalfLineProduct, Interval, MisspecScheme, ProblemSpec, as_vectors, rotate
from predens.special import LOG_SQRT_2PI, gauss_hermite_expect, log_ndtr, log_ndtr_diff

__all__ = [
    "RiskEvaluationError",
    "RiskEstimate",
    "ThetaPoint",
    "OrderingWitness",
    "gaussian_alpha_loss",
    "alpha_losses",
    "alpha_loss",
    "loss_draws",
    "risk_mc",
    "risk_difference_mc",
    "reflected_normal_loss",
    "point_risk_mc",
    "kl_risk_plugin_closed",
    "mse_mle_order",
    "mse_clipped_normal",
    "mse_decomposed",
    "misspec_sigmas",
    "risk_diff_order",
    "risk_diff_interval",
    "monotone_expectation_check",
]

logger = logging.getLogger("predens.risk")

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"
MONTE_CARLO = "monte-carlo"
RISK_METHODS = (CLOSED_FORM, QUADRATURE, MONTE_CARLO)

# Y1 values held in memory at once when losses need Monte Carlo over Y1
_LOSS_MC_BLOCK = 2_000_000


class RiskEvaluationError(RuntimeError):
    """Raised when an estimator cannot be built or evaluated for a simulated draw."""

    def __init__(self, message: str, draw_index: int):
        super().__init__(message)
        self.draw_index = draw_index


@dataclass(frozen=True)
class RiskEstimate:
    """
    A risk value with its provenance.

    Attributes:
        value: Risk estimate
        std_error: Monte Carlo standard error (0 for closed form and quadrature)
        method: One of RISK_METHODS
        sample_count: Number of Monte Carlo draws (0 otherwise)
    """
    value: float
    std_error: float = 0.0
    method: str = CLOSED_FORM
    sample_count: int = 0

    def __post_init__(self):
        if self.method not in RISK_METHODS:
            raise ValueError(f"Unknown risk method '{self.method}'")
        if self.method != MONTE_CARLO and self.std_error != 0.0:
            raise ValueError(f"{self.method} risk must carry std_error 0, got {self.std_error}")
        if self.std_error < 0:
            raise ValueError(f"std_error must be >= 0, got {self.std_error}")

    def within(self, target: float, band: float = SE_BAND, atol: float = 1e-12) -> bool:
        """True when target lies within band standard errors (plus atol) of the value."""
        return abs(self.value - target) <= band * self.std_error + atol


@dataclass(frozen=True)
class ThetaPoint:
    """Parameter point (theta1, theta2); membership in A is recorded, never enforced."""
    theta1: np.ndarray
    theta2: np.ndarray
    in_constraint: Optional[bool] = None

    @classmethod
    def at(cls, spec: ProblemSpec, theta1, theta2) -> "ThetaPoint":
        t1 = as_vectors(theta1, spec.p, "theta1").reshape(spec.p)
        t2 = as_vectors(theta2, spec.p, "theta2").reshape(spec.p)
        inside = bool(np.all(spec.constraint.contains(t1 - t2)))
        return cls(t1, t2, inside)

    @classmethod
    def from_delta(cls, spec: ProblemSpec, delta: float) -> "ThetaPoint":
        """theta1 = delta e1, theta2 = 0."""
        t1 = np.zeros(spec.p)
        t1[0] = delta
        return cls.at(spec, t1, np.zeros(spec.p))

    @property
    def delta(self) -> np.ndarray:
        return self.theta1 - self.theta2


@dataclass(frozen=True)
class OrderingWitness:
    """Expectations E log Phi(U) and E log Phi(V) with the ordering they exhibit."""
    expectation_u: float
    expectation_v: float

    @property
    def holds(self) -> bool:
        return self.expectation_u >= self.expectation_v - 1e-12


def _true_y_variance(spec: ProblemSpec) -> float:
    return spec.sigmaY_sq * spec.true_scheme.aY_sq


def _gaussian_log_pdf(y: np.ndarray, mean: np.ndarray, var: float) -> np.ndarray:
    diff = y - mean
    return -0.5 * np.sum(diff * diff, axis=-1) / var - y.shape[-1] * (LOG_SQRT_2PI + 0.5 * math.log(var))


def gaussian_alpha_loss(var_hat: float, dist_sq, var_y: float, p: int, loss: LossSpec) -> np.ndarray:
    """
    L_alpha between N_p(center, var_hat I) and N_p(theta1, var_y I), dist_sq = ||center - theta1||^2.
    """
    ratio = var_hat / var_y
    dist_sq = np.asarray(dist_sq, dtype=float)
    if loss.is_kl:
        return 0.5 * p * (math.log(ratio) + 1.0 / ratio - 1.0) + dist_sq / (2.0 * var_hat)
    if loss.is_rkl:
        return 0.5 * p * (ratio - 1.0 - math.log(ratio)) + dist_sq / (2.0 * var_y)
    a = 0.5 * (1.0 + loss.alpha)
    b = 1.0 - a
    pooled = a * var_y + b * var_hat
    log_aff = p * (0.5 * b * math.log(var_hat) + 0.5 * a * math.log(var_y) - 0.5 * math.log(pooled))
    affinity = np.exp(log_aff - a * b * dist_sq / (2.0 * pooled))
    return 4.0 / (1.0 - loss.alpha ** 2) * (1.0 - affinity)


def _tilted_gaussian(batch: DensityBatch, theta1: np.ndarray, var_y: float, a: float):
    """base^a q^(1-a) = affinity * N(m_star, 1/precision); returns (log affinity, m_star, 1/precision)."""
    b = 1.0 - a
    var_hat = batch.variance
    precision = a / var_hat + b / var_y
    m_star = (a * batch.centers / var_hat + b * theta1 / var_y) / precision
    dist_sq = np.sum((batch.centers - theta1) ** 2, axis=-1)
    pooled = a * var_y + b * var_hat
    log_aff = batch.p * (0.5 * b * math.log(var_hat) + 0.5 * a * math.log(var_y) - 0.5 * math.log(pooled))
    return log_aff - a * b * dist_sq / (2.0 * pooled), m_star, 1.0 / precision


def _loss_terms(batch: DensityBatch, theta1, loss: LossSpec, var_y: float, rows, z: np.ndarray) -> np.ndarray:
    """Loss integrand at standardized points z (..., K, p) for the given rows; returns (rows, K)."""
    centers = batch.centers[rows]
    theta = theta1[rows]
    if loss.is_kl:
        y = theta[:, None, :] + math.sqrt(var_y) * z
        return _gaussian_log_pdf(y, theta[:, None, :], var_y) - batch.log_density(y, rows)
    if loss.is_rkl:
        y = centers[:, None, :] + math.sqrt(batch.variance) * z
        log_w = batch.log_weight(y, rows)
        log_q_hat = batch.base_log_density(y, rows) + log_w
        with np.errstate(invalid="ignore"):
            terms = np.exp(log_w) * (log_q_hat - _gaussian_log_pdf(y, theta[:, None, :], var_y))
        return np.where(np.isneginf(log_w), 0.0, terms)
    a = 0.5 * (1.0 + loss.alpha)
    log_aff, m_star, var_star = _tilted_gaussian(batch, theta1, var_y, a)
    y = m_star[rows][:, None, :] + math.sqrt(var_star) * z
    return np.exp(log_aff[rows][:, None] + a * batch.log_weight(y, rows))


def _finish(raw: np.ndarray, loss: LossSpec) -> np.ndarray:
    if loss.is_kl or loss.is_rkl:
        return raw
    return 4.0 / (1.0 - loss.alpha ** 2) * (1.0 - raw)


def alpha_losses(
    batch: DensityBatch,
    theta1,
    loss: LossSpec,
    var_y: float,
    samples: int = LOSS_MC_SAMPLES,
    seed: int = 0,
) -> np.ndarray:
    """
    L_alpha(theta1, qhat_i) for every density of a batch.

    Gaussian densities use the closed form; univariate non-Gaussian densities
    use Gauss-Hermite quadrature in y1; p > 1 non-Gaussian densities use
    samples common-random-number draws of Y1 per density.

    Args:
        batch: Densities, one per row
        theta1: Shape (p,) or (N, p)
        loss: The alpha-divergence loss
        var_y: True variance of Y1 per coordinate
        samples: Y1 draws per density when Monte Carlo is needed
        seed: Seed of those draws

    Returns:
        Array of shape (N,)
    """
    theta1 = np.broadcast_to(as_vectors(theta1, batch.p, "theta1"), batch.centers.shape)
    if batch.is_gaussian:
        dist_sq = np.sum((batch.centers - theta1) ** 2, axis=-1)
        return gaussian_alpha_loss(batch.variance, dist_sq, var_y, batch.p, loss)

    if batch.p == 1:
        def integrand(nodes):
            return _loss_terms(batch, theta1, loss, var_y, slice(None), nodes[None, :, None])

        return _finish(gauss_hermite_expect(integrand), loss)

    z = np.random.default_rng(seed).standard_normal((samples, batch.p))
    block = max(1, _LOSS_MC_BLOCK // (samples * batch.p))
    out = np.empty(batch.size)
    for start in range(0, batch.size, block):
        rows = slice(start, min(start + block, batch.size))
        out[rows] = _loss_terms(batch, theta1, loss, var_y, rows, z[None, :, :]).mean(axis=1)
    return _finish(out, loss)


def alpha_loss(
    qhat: PredictiveDensity,
    theta1,
    loss: LossSpec,
    spec: ProblemSpec,
    samples: int = LOSS_MC_SAMPLES,
    seed: int = 0,
) -> float:
    """
    L_alpha(theta, qhat) against the true density N_p(theta1, sY I).

    Returns:
        Non-negative loss (up to quadrature or Monte Carlo error)
    """
    values = alpha_losses(qhat.batch, theta1, loss, _true_y_variance(spec), samples, seed)
    return float(values[0])


def _simulate(spec: ProblemSpec, theta: ThetaPoint, rng: np.random.Generator, size: int):
    scheme = spec.true_scheme
    sd1 = math.sqrt(spec.sigma1_sq * scheme.a1_sq)
    sd2 = math.sqrt(spec.sigma2_sq * scheme.a2_sq)
    x1s = theta.theta1 + sd1 * rng.standard_normal((size, spec.p))
    x2s = theta.theta2 + sd2 * rng.standard_normal((size, spec.p))
    return x1s, x2s


def _chunks(n: int):
    starts = range(0, n, MC_CHUNK_SIZE)
    return [(start, min(MC_CHUNK_SIZE, n - start)) for start in starts]


def _locate_failure(make_qhat, x1s, x2s, offset: int, error: Exception) -> RiskEvaluationError:
    for i in range(x1s.shape[0]):
        try:
            make_qhat(x1s[i], x2s[i])
        except Exception as e:
            return RiskEvaluationError(f"Estimator failed at draw {offset + i}: {e}", offset + i)
    return RiskEvaluationError(f"Estimator batch failed at draws from {offset}: {error}", offset)


def loss_draws(
    make_qhat,
    theta: ThetaPoint,
    loss: LossSpec,
    spec: ProblemSpec,
    n: int = DEFAULT_MC_SAMPLES,
    seed: int = DEFAULT_SEED,
    progress: bool = False,
) -> np.ndarray:
    """
    Per-draw losses L_alpha(theta, qhat(.; X_i)) for n simulated data draws.

    X is drawn with the true variances (nominal times the spec's MisspecScheme
    multipliers) while the estimator keeps the nominal ones. Equal seeds give
    identical draws, so two estimators evaluated with one seed are paired.

    Raises:
        RiskEvaluationError: If the estimator fails or yields a non-finite loss, with the draw index
    """
    if n < MIN_MC_SAMPLES:
        raise ValueError(f"Monte Carlo risk needs n >= {MIN_MC_SAMPLES}, got {n}")
    rng = np.random.default_rng(seed)
    var_y = _true_y_variance(spec)
    losses = np.empty(n)
    vectorized = hasattr(make_qhat, "batch")

    for start, size in tqdm(_chunks(n), desc="Risk MC", ncols=80, disable=not progress):
        x1s, x2s = _simulate(spec, theta, rng, size)
        if vectorized:
            try:
                batch = make_qhat.batch(x1s, x2s)
            except Exception as e:
                raise _locate_failure(make_qhat, x1s, x2s, start, e) from e
            chunk_losses = alpha_losses(batch, theta.theta1, loss, var_y, seed=seed)
        else:
            chunk_losses = np.empty(size)
            for i in range(size):
                try:
                    qhat = make_qhat(x1s[i], x2s[i])
                except Exception as e:
                    raise RiskEvaluationError(f"Estimator failed at draw {start + i}: {e}", start + i) from e
                chunk_losses[i] = alpha_losses(qhat.batch, theta.theta1, loss, var_y, seed=seed)[0]
        bad = np.flatnonzero(~np.isfinite(chunk_losses))
        if bad.size:
            index = start + int(bad[0])
            raise RiskEvaluationError(f"Non-finite loss at draw {index}", index)
        losses[start:start + size] = chunk_losses
    return losses


def _summarize(values: np.ndarray) -> RiskEstimate:
    n = values.shape[0]
    return RiskEstimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(n)), MONTE_CARLO, n)


def risk_mc(
    make_qhat,
    theta: ThetaPoint,
    loss: LossSpec,
    spec: ProblemSpec,
    n: int = DEFAULT_MC_SAMPLES,
    seed: int = DEFAULT_SEED,
    progress: bool = False,
) -> RiskEstimate:
    """
    Monte Carlo frequentist risk E_theta L_alpha(theta, qhat(.; X)).

    Args:
        make_qhat: Estimator (vectorized via .batch) or any callable (x1, x2) -> PredictiveDensity
        theta: Parameter point
        loss: Loss
        spec: Problem specification
        n: Number of data draws (>= MIN_MC_SAMPLES)
        seed: Seed; results are bit-identical for equal seeds
        progress: Show a tqdm bar over chunks

    Raises:
        RiskEvaluationError: If the estimator fails or yields a non-finite loss, with the draw index
    """
    estimate = _summarize(loss_draws(make_qhat, theta, loss, spec, n, seed, progress))
    logger.debug(f"Risk MC: {n} draws, value {estimate.value:.6g} +- {estimate.std_error:.2g}")
    return estimate


def risk_difference_mc(
    first,
    second,
    theta: ThetaPoint,
    loss: LossSpec,
    spec: ProblemSpec,
    n: int = DEFAULT_MC_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> RiskEstimate:
    """Risk of first minus risk of second on common data draws."""
    return _summarize(
        loss_draws(first, theta, loss, spec, n, seed) - loss_draws(second, theta, loss, spec, n, seed)
    )


def reflected_normal_loss(est, theta1, gamma0: float):
    """1 - exp(-||est - theta1||^2 / (2 gamma0)); vectorized over leading axes."""
    if not gamma0 > 0:
        raise ValueError(f"gamma0 must be > 0, got {gamma0}")
    diff = np.asarray(est, dtype=float) - np.asarray(theta1, dtype=float)
    dist_sq = np.sum(np.atleast_1d(diff) ** 2, axis=-1)
    values = -np.expm1(-dist_sq / (2.0 * gamma0))
    return float(values) if np.ndim(values) == 0 else values


def point_risk_mc(
    estimate: Callable[[np.ndarray, np.ndarray], np.ndarray],
    theta: ThetaPoint,
    spec: ProblemSpec,
    n: int = DEFAULT_MC_SAMPLES,
    seed: int = DEFAULT_SEED,
    gamma0: Optional[float] = None,
) -> RiskEstimate:
    """
    Monte Carlo risk of a point estimator of theta1.

    Squared error loss by default, reflected normal loss when gamma0 is given.

    Args:
        estimate: Vectorized map (x1s, x2s) of shape (N, p) to estimates (N, p)
    """
    if n < MIN_MC_SAMPLES:
        raise ValueError(f"Monte Carlo risk needs n >= {MIN_MC_SAMPLES}, got {n}")
    rng = np.random.default_rng(seed)
    losses = np.empty(n)
    for start, size in _chunks(n):
        x1s, x2s = _simulate(spec, theta, rng, size)
        est = np.asarray(estimate(x1s, x2s), dtype=float).reshape(size, spec.p)
        if gamma0 is None:
            losses[start:start + size] = np.sum((est - theta.theta1) ** 2, axis=-1)
        else:
            losses[start:start + size] = reflected_normal_loss(est, theta.theta1, gamma0)
    return _summarize(losses)


def kl_risk_plugin_closed(
    mse: Union[float, Callable[[ThetaPoint], float]],
    c: float,
    spec: ProblemSpec,
    theta: Optional[ThetaPoint] = None,
) -> RiskEstimate:
    """
    KL risk of the plug-in N_p(theta1_hat, c sY I): p/2 (ln c + 1/c - 1) + MSE/(2 c sY).

    Args:
        mse: Mean squared error of theta1_hat, or a function of theta returning it
        c: Expansion factor (> 0)
        spec: Problem specification
        theta: Parameter point, required when mse is a function
    """
    if not (c > 0 and math.isfinite(c)):
        raise ValueError(f"Expansion factor c must be > 0, got {c}")
    if callable(mse):
        if theta is None:
            raise ValueError("theta is required when mse is a function")
        mse = mse(theta)
    value = 0.5 * spec.p * (math.log(c) + 1.0 / c - 1.0) + float(mse) / (2.0 * c * spec.sigmaY_sq)
    return RiskEstimate(value)


def mse_mle_order(mu1, var_w1: float):
    """
    MSE of max(0, W1) for W1 ~ N(mu1, var_w1), mu1 >= 0.

    var_w1 * {1/2 + rho^2 Phi(-rho) + Phi(rho) - 1/2 - rho phi(rho)}, rho = mu1/sqrt(var_w1).
    """
    mu = np.asarray(mu1, dtype=float)
    if np.any(mu < 0):
        raise ValueError(f"mse_mle_order requires mu1 >= 0, got {mu1!r}")
    if not var_w1 > 0:
        raise ValueError(f"var_w1 must be > 0, got {var_w1}")
    rho = mu / math.sqrt(var_w1)
    phi = np.exp(-0.5 * rho * rho - LOG_SQRT_2PI)
    values = var_w1 * (0.5 + rho * rho * ndtr(-rho) + ndtr(rho) - 0.5 - rho * phi)
    return float(values) if np.ndim(values) == 0 else values


def mse_clipped_normal(mu, var: float, lo, hi):
    """
    E(clip(W, lo, hi) - mu)^2 for W ~ N(mu, var); bounds may be infinite.

    Elementwise over broadcast (mu, lo, hi).
    """
    if not var > 0:
        raise ValueError(f"var must be > 0, got {var}")
    mu, lo, hi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (mu, lo, hi)))
    sd = math.sqrt(var)
    with np.errstate(invalid="ignore"):
        a = (lo - mu) / sd
        b = (hi - mu) / sd
    a_fin = np.where(np.isfinite(a), a, 0.0)
    b_fin = np.where(np.isfinite(b), b, 0.0)
    phi_a = np.where(np.isfinite(a), np.exp(-0.5 * a_fin * a_fin - LOG_SQRT_2PI), 0.0)
    phi_b = np.where(np.isfinite(b), np.exp(-0.5 * b_fin * b_fin - LOG_SQRT_2PI), 0.0)
    below = np.where(np.isfinite(a), a_fin * a_fin * ndtr(a), 0.0)
    above = np.where(np.isfinite(b), b_fin * b_fin * ndtr(-b), 0.0)
    inside = ndtr(b) - ndtr(a) - (b_fin * phi_b - a_fin * phi_a)
    values = var * (below + above + inside)
    return float(values) if np.ndim(values) == 0 else values


def mse_decomposed(psi_mse: Union[float, Callable[[np.ndarray], float]], spec: ProblemSpec, theta: ThetaPoint) -> float:
    """MSE of W2 + psi(W1): psi_mse(mu1) + p s2/(1 + r)."""
    frame = rotate(theta.theta1, theta.theta2, spec, theta.theta1, theta.theta2)
    term = psi_mse(frame.mu1.reshape(spec.p)) if callable(psi_mse) else psi_mse
    return float(term) + spec.p * spec.var_w2


def misspec_sigmas(spec: ProblemSpec, a: MisspecScheme) -> Tuple[float, float]:
    """
    Variances of the standardized U and V under true variances a_i s_i.

    sU = (a2 s2 + (1 - beta)^2 a1 s1 + beta^2 aY sY)/(s2 + beta sY),
    sV = (a1 s1 + a2 s2)/(s1 + s2), beta = s1/(s1 + sY).
    """
    if spec.p != 1:
        raise ValueError(f"misspec_sigmas is defined for p = 1, got p = {spec.p}")
    s1, s2, sy = spec.sigma1_sq, spec.sigma2_sq, spec.sigmaY_sq
    beta = s1 / (s1 + sy)
    sigma_u_sq = (a.a2_sq * s2 + (1.0 - beta) ** 2 * a.a1_sq * s1 + beta ** 2 * a.aY_sq * sy) / (s2 + beta * sy)
    sigma_v_sq = (a.a1_sq * s1 + a.a2_sq * s2) / (s1 + s2)
    return sigma_u_sq, sigma_v_sq


def _expected_log_ndtr(mu: float, sd: float) -> float:
    return float(gauss_hermite_expect(lambda z: log_ndtr(mu + sd * z)))


def risk_diff_order(theta: ThetaPoint, spec: ProblemSpec, misspec: Optional[MisspecScheme] = None) -> float:
    """
    KL risk of mre minus KL risk of the order-case Bayes density (n = 1).

    E log Phi(muU + sU Z) - E log Phi(muV + sV Z) with muU = (Delta - b)/sT,
    muV = (Delta - b)/sqrt(s1 + s2), b the lower bound of A.

    Raises:
        ValueError: Unless p = 1 with a finite lower bound
    """
    A = spec.constraint
    if spec.p != 1 or not isinstance(A, HalfLineProduct) or not A.is_order:
        raise ValueError(f"risk_diff_order needs p = 1 and an order constraint, got {A.describe()}")
    scheme = misspec if misspec is not None else spec.true_scheme
    sigma_u_sq, sigma_v_sq = misspec_sigmas(spec, scheme)
    shift = float(theta.delta[0]) - A.lower[0]
    beta = spec.sigma1_sq / (spec.sigma1_sq + spec.sigmaY_sq)
    sigma_t = math.sqrt(spec.sigma2_sq + beta * spec.sigmaY_sq)
    mu_u = shift / sigma_t
    mu_v = shift / math.sqrt(spec.var_diff)
    return _expected_log_ndtr(mu_u, math.sqrt(sigma_u_sq)) - _expected_log_ndtr(mu_v, math.sqrt(sigma_v_sq))


def risk_diff_interval(theta: ThetaPoint, spec: ProblemSpec) -> float:
    """
    KL risk of mre minus KL risk of the interval-case Bayes density (n = 1).

    Raises:
        ValueError: Unless p = 1 with an Interval constraint
    """
    A = spec.constraint
    if spec.p != 1 or not isinstance(A, Interval):
        raise ValueError(f"risk_diff_interval needs p = 1 and an interval constraint, got {A.describe()}")
    delta = float(theta.delta[0])
    beta = spec.sigma1_sq / (spec.sigma1_sq + spec.sigmaY_sq)
    sigma_t = math.sqrt(spec.sigma2_sq + beta * spec.sigmaY_sq)
    s = math.sqrt(spec.var_diff)

    def expected(scale: float) -> float:
        upper, lower = (delta + A.m) / scale, (delta - A.m) / scale
        return float(gauss_hermite_expect(lambda z: log_ndtr_diff(upper + z, lower + z)))

    return expected(sigma_t) - expected(s)


def monotone_expectation_check(mu_u: float, sd_u: float, mu_v: float, sd_v: float) -> OrderingWitness:
    """
    Quadrature values of E log Phi(U) and E log Phi(V), U ~ N(mu_u, sd_u^2), V ~ N(mu_v, sd_v^2).

    Raises:
        ValueError: Unless mu_u >= mu_v and 0 < sd_u <= sd_v
    """
    if not (mu_u >= mu_v and 0 < sd_u <= sd_v):
        raise ValueError(
            f"Ordering check needs mu_u >= mu_v and 0 < sd_u <= sd_v, got ({mu_u}, {sd_u}), ({mu_v}, {sd_v})"
        )
    return OrderingWitness(_expected_log_ndtr(mu_u, sd_u), _expected_log_ndtr(mu_v, sd_v))
