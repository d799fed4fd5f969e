"""
Predictive Density Estimators Module.

Constructors for the predictive densities of Y1 given (X1, X2):

- mre: N_p(x1, (s1 (1 - alpha)/2 + sY) I), the minimum risk equivariant density
- plugin: N_p(center, c sY I)
- mle: plug-in at W2 + restricted mle of mu1, optionally expanded by c
- bayes_uniform: Bayes density for the uniform prior on theta1 - theta2 in A
- bayes_rkl: reverse-KL Bayes density, a plug-in at the posterior mean
- two_step_improve: plug-in at W2 + psi*(W1) with a dominating expansion factor

Every constructor has a vectorized form producing a DensityBatch for many data
draws at once; PredictiveDensity is the single-draw view used by callers.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from predens.config import (
    BALL_NORMALIZER_SAMPLES,
    BALL_NORMALIZER_SEED,
    LOSS_MC_SAMPLES,
    SAMPLER_BATCH,
    SAMPLER_MAX_PROPOSALS,
)
from predens.model import (
    Ball,
    ConstraintSet,
    HalfLineProduct,
    ProblemSpec,
    _BoxConstraint,
    as_vectors,
    rotate,
)
from predens.skewnormal import SkewNormalGB, SkewNormalInterval
from predens.special import (
    LOG_SQRT_2PI,
    gauss_hermite_expect,
    j_n,
    k_n,
    log_ndtr,
    log_ndtr_diff,
    noncentral_chi2_cdf,
)

__all__ = [
    "ESTIMATOR_NAMES",
    "LossSpec",
    "DensityBatch",
    "PredictiveDensity",
    "Estimator",
    "mre_scale",
    "mre",
    "plugin",
    "identity_psi",
    "restricted_mle_mu1",
    "mle",
    "psi_uniform",
    "posterior_mean_theta1",
    "bayes_rkl",
    "two_step_scale",
    "two_step_improve",
    "order_case_parameters",
    "bayes_t_parameters",
    "bayes_uniform",
    "make_mre",
    "make_plugin",
    "make_mle",
    "make_bayes_rkl",
    "make_two_step",
    "make_bayes_uniform",
    "make_estimator",
    "normalization_check",
]

logger = logging.getLogger("predens.estimators")

GAUSSIAN_PLUGIN = "gaussian-plugin"
BAYES_UNIFORM = "bayes-uniform"
MRE = "mre"

ESTIMATOR_NAMES = ("mre", "mle", "plugin:c", "mle:c", "bayes-uniform", "bayes-rkl", "two-step")

# log_accept(y, rows): y of shape (len(rows), K, p) -> (len(rows), K)
LogAccept = Callable[[np.ndarray, np.ndarray], np.ndarray]
Psi = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LossSpec:
    """
    alpha-divergence loss.

    alpha = -1 is Kullback-Leibler, alpha = 1 reverse Kullback-Leibler and
    alpha = 0 the Hellinger-type loss. Bayes densities under the uniform prior
    exist in closed form when n = 2/(1 - alpha) is a positive integer.
    """
    alpha: float = -1.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and -1.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [-1, 1], got {self.alpha}")

    @classmethod
    def kl(cls) -> "LossSpec":
        return cls(-1.0)

    @classmethod
    def rkl(cls) -> "LossSpec":
        return cls(1.0)

    @classmethod
    def hellinger(cls) -> "LossSpec":
        return cls(0.0)

    @property
    def is_kl(self) -> bool:
        return self.alpha == -1.0

    @property
    def is_rkl(self) -> bool:
        return self.alpha == 1.0

    @property
    def n(self) -> float:
        """2/(1 - alpha); infinite for reverse KL."""
        return math.inf if self.is_rkl else 2.0 / (1.0 - self.alpha)

    @property
    def integer_n(self) -> Optional[int]:
        n = self.n
        if math.isfinite(n) and abs(n - round(n)) < 1e-9:
            return int(round(n))
        return None

    @property
    def label(self) -> str:
        if self.is_kl:
            return "KL"
        if self.is_rkl:
            return "RKL"
        return f"alpha={self.alpha:g}"


@dataclass(frozen=True)
class DensityBatch:
    """
    Predictive densities for N data draws, sharing one functional form.

    Each density is a Gaussian base N_p(centers[i], variance I) reweighted by
    exp(log_accept) / exp(log_normalizer[i]); Gaussian kinds have no reweighting.

    Attributes:
        kind: GAUSSIAN_PLUGIN, BAYES_UNIFORM or MRE
        p: Dimension
        centers: Base centers, shape (N, p)
        variance: Base variance per coordinate
        log_accept: Log reweighting, at most 0, or None for Gaussian densities
        log_normalizer: Shape (N,) log normalizing constants
        normalizer_std_error: Largest Monte Carlo standard error of the normalizers
        scale_factor: Expansion factor c of Gaussian plug-ins (variance = c sY)
        skew_params: Skew-normal parameters when the rows are SN densities (p = 1)
    """
    kind: str
    p: int
    centers: np.ndarray
    variance: float
    log_accept: Optional[LogAccept] = None
    log_normalizer: Optional[np.ndarray] = None
    normalizer_std_error: float = 0.0
    scale_factor: Optional[float] = None
    skew_params: Optional[Dict[str, object]] = None

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def is_gaussian(self) -> bool:
        return self.log_accept is None

    def base_log_density(self, y: np.ndarray, rows=slice(None)) -> np.ndarray:
        diff = y - self.centers[rows][:, None, :]
        return -0.5 * np.sum(diff * diff, axis=-1) / self.variance - self.p * (
            LOG_SQRT_2PI + 0.5 * math.log(self.variance)
        )

    def log_weight(self, y: np.ndarray, rows=slice(None)) -> np.ndarray:
        """log(density / base density) for y of shape (rows, K, p)."""
        if self.is_gaussian:
            return np.zeros(y.shape[:-1])
        return self.log_accept(y, rows) - self.log_normalizer[rows][:, None]

    def log_density(self, y: np.ndarray, rows=slice(None)) -> np.ndarray:
        """Log-densities at y of shape (rows, K, p), one row of points per density."""
        return self.base_log_density(y, rows) + self.log_weight(y, rows)

    def row(self, index: int) -> "PredictiveDensity":
        rows = np.array([index])

        def log_accept(y, sub):
            return self.log_accept(y, rows[sub])

        return PredictiveDensity(
            DensityBatch(
                kind=self.kind,
                p=self.p,
                centers=self.centers[rows],
                variance=self.variance,
                log_accept=None if self.is_gaussian else log_accept,
                log_normalizer=None if self.log_normalizer is None else self.log_normalizer[rows],
                normalizer_std_error=self.normalizer_std_error,
                scale_factor=self.scale_factor,
                skew_params=_slice_params(self.skew_params, rows),
            )
        )


def _slice_params(params: Optional[Dict[str, object]], rows: np.ndarray) -> Optional[Dict[str, object]]:
    if params is None:
        return None
    return {k: (v[rows] if isinstance(v, np.ndarray) else v) for k, v in params.items()}


def _as_points(y1, p: int) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(y1, dtype=float)
    if p == 1:
        return arr.reshape(-1, 1), arr.ndim == 0
    if arr.ndim == 1:
        return as_vectors(arr, p, "y1").reshape(1, p), True
    return as_vectors(arr, p, "y1").reshape(-1, p), False


@dataclass(frozen=True)
class PredictiveDensity:
    """An evaluable and sampleable predictive density for one data draw."""
    batch: DensityBatch

    @property
    def kind(self) -> str:
        return self.batch.kind

    @property
    def p(self) -> int:
        return self.batch.p

    @property
    def is_gaussian(self) -> bool:
        return self.batch.is_gaussian

    @property
    def center(self) -> np.ndarray:
        """Center of the Gaussian base (the plug-in center for Gaussian kinds)."""
        return self.batch.centers[0]

    @property
    def variance(self) -> float:
        return self.batch.variance

    @property
    def scale_factor(self) -> Optional[float]:
        return self.batch.scale_factor

    @property
    def normalizer_std_error(self) -> float:
        return self.batch.normalizer_std_error

    @property
    def skew_normal(self):
        """The SkewNormalGB / SkewNormalInterval form of a univariate Bayes density, else None."""
        params = self.batch.skew_params
        if params is None:
            return None
        alpha0 = float(np.asarray(params["alpha0"]).reshape(-1)[0])
        if params.get("alpha2") is None:
            return SkewNormalGB(params["n"], alpha0, params["alpha1"], float(self.center[0]), params["tau"])
        alpha2 = float(np.asarray(params["alpha2"]).reshape(-1)[0])
        return SkewNormalInterval(params["n"], alpha0, params["alpha1"], alpha2, float(self.center[0]), params["tau"])

    def log_density(self, y1):
        """
        Log-density at y1.

        Args:
            y1: A point (scalar for p = 1, p-vector otherwise) or an array of points

        Returns:
            Float for a single point, otherwise an array with one value per point
        """
        points, single = _as_points(y1, self.p)
        values = self.batch.log_density(points[None, :, :])[0]
        return float(values[0]) if single else values

    def density(self, y1):
        values = np.exp(self.log_density(y1))
        return float(values) if np.ndim(values) == 0 else values

    def sample(self, count: int, seed: int) -> np.ndarray:
        """
        Draw count variates, shape (count, p); deterministic given seed.

        Non-Gaussian densities are sampled by rejection from the Gaussian base.
        """
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        rng = np.random.default_rng(seed)
        sd = math.sqrt(self.variance)
        if self.is_gaussian:
            return self.center + sd * rng.standard_normal((count, self.p))
        chunks = []
        accepted = proposed = 0
        rate_guess = max(math.exp(float(self.batch.log_normalizer[0])), 1e-6)
        while accepted < count:
            size = max(SAMPLER_BATCH, int((count - accepted) / rate_guess * 1.2) + 1)
            if proposed + size > SAMPLER_MAX_PROPOSALS:
                raise RuntimeError(f"Rejection sampler exceeded {SAMPLER_MAX_PROPOSALS} proposals")
            y = self.center + sd * rng.standard_normal((size, self.p))
            u = rng.random(size)
            keep = u < np.exp(self.batch.log_accept(y[None, :, :], np.array([0]))[0])
            chunks.append(y[keep])
            accepted += int(keep.sum())
            proposed += size
        return np.concatenate(chunks)[:count]


@dataclass(frozen=True)
class Estimator:
    """A named estimator, buildable for one draw or a batch of draws."""
    name: str
    spec: ProblemSpec
    build: Callable[[np.ndarray, np.ndarray], DensityBatch]
    centers: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def batch(self, x1s, x2s) -> DensityBatch:
        x1s = as_vectors(x1s, self.spec.p, "x1").reshape(-1, self.spec.p)
        x2s = as_vectors(x2s, self.spec.p, "x2").reshape(-1, self.spec.p)
        x1s, x2s = np.broadcast_arrays(x1s, x2s)
        return self.build(x1s, x2s)

    def __call__(self, x1, x2) -> PredictiveDensity:
        return PredictiveDensity(self.batch(x1, x2))


def _gaussian_batch(kind: str, centers: np.ndarray, c: float, spec: ProblemSpec) -> DensityBatch:
    if not (c > 0 and math.isfinite(c)):
        raise ValueError(f"Expansion factor c must be > 0, got {c}")
    return DensityBatch(kind=kind, p=spec.p, centers=centers, variance=c * spec.sigmaY_sq, scale_factor=c)


def mre_scale(spec: ProblemSpec, loss: LossSpec) -> float:
    """c = 1 + (1 - alpha) s1 / (2 sY)."""
    return 1.0 + (1.0 - loss.alpha) * spec.sigma1_sq / (2.0 * spec.sigmaY_sq)


def mre(x1, spec: ProblemSpec, loss: LossSpec) -> PredictiveDensity:
    """
    Minimum risk equivariant density N_p(x1, (s1 (1 - alpha)/2 + sY) I).

    At alpha = 1 this is the plug-in N_p(x1, sY I), which is also the reverse-KL
    Bayes density under the unconstrained prior.
    """
    if loss.is_rkl:
        logger.debug("mre at alpha = 1 coincides with the unconstrained reverse-KL Bayes plug-in")
    x1s = as_vectors(x1, spec.p, "x1").reshape(-1, spec.p)
    return PredictiveDensity(_gaussian_batch(MRE, x1s, mre_scale(spec, loss), spec))


def plugin(center, c: float, spec: ProblemSpec) -> PredictiveDensity:
    """N_p(center, c sY I)."""
    centers = as_vectors(center, spec.p, "center").reshape(-1, spec.p)
    return PredictiveDensity(_gaussian_batch(GAUSSIAN_PLUGIN, centers, c, spec))


def identity_psi(w1: np.ndarray) -> np.ndarray:
    return w1


def restricted_mle_mu1(w1, spec: ProblemSpec) -> np.ndarray:
    """Maximum likelihood estimate of mu1 from W1 subject to (1 + r) mu1 in A."""
    return spec.constraint.scaled(1.0 / (1.0 + spec.r)).project(w1)


def _mle_centers(x1s: np.ndarray, x2s: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    frame = rotate(x1s, x2s, spec)
    return frame.w2 + restricted_mle_mu1(frame.w1, spec)


def mle(x1, x2, spec: ProblemSpec, c: float = 1.0) -> PredictiveDensity:
    """Plug-in at theta1_hat = W2 + restricted mle of mu1, variance c sY."""
    return make_mle(spec, c)(x1, x2)


def psi_uniform(w1, var: float, A: ConstraintSet, scale: float) -> np.ndarray:
    """
    Bayes estimate of mu1 under the uniform prior on {scale * mu1 in A}.

    W1 ~ N_p(mu1, var I); the posterior is N_p(w1, var I) truncated to A/scale.
    """
    if A.is_unconstrained:
        return np.asarray(w1, dtype=float)
    return A.scaled(1.0 / scale).truncated_mean(w1, var)


def posterior_mean_theta1(x1, x2, spec: ProblemSpec) -> np.ndarray:
    """
    E(theta1 | x) = (E(omega1 | x) + r x1 + x2)/(1 + r), omega1 ~ N_p(x1 - x2, (s1 + s2) I) truncated to A.
    """
    x1 = as_vectors(x1, spec.p, "x1")
    x2 = as_vectors(x2, spec.p, "x2")
    diff = x1 - x2
    if spec.constraint.is_unconstrained:
        omega = diff
    else:
        omega = spec.constraint.truncated_mean(diff, spec.var_diff)
    return (omega + spec.r * x1 + x2) / (1.0 + spec.r)


def bayes_rkl(x1, x2, spec: ProblemSpec) -> PredictiveDensity:
    """Reverse-KL Bayes density: plug-in N_p(E(theta1 | x), sY I)."""
    return make_bayes_rkl(spec)(x1, x2)


def two_step_scale(spec: ProblemSpec, r_lower_hint: Optional[float] = None) -> float:
    """
    Midpoint of [1 + R_lower, c0(1 + R_lower)].

    Without a hint R_lower is the floor s1 s2 / ((s1 + s2) sY), which holds for
    every estimator of the rotated class.
    """
    from predens.dominance import c0, r_floor

    r_lower = r_floor(spec) if r_lower_hint is None else float(r_lower_hint)
    if r_lower <= 0:
        raise ValueError(f"R lower bound must be > 0, got {r_lower}")
    s = 1.0 + r_lower
    return 0.5 * (s + c0(s))


def two_step_improve(
    x1, x2, spec: ProblemSpec, psi_star: Psi, r_lower_hint: Optional[float] = None
) -> PredictiveDensity:
    """Plug-in at W2 + psi_star(W1), expanded by two_step_scale."""
    return make_two_step(spec, psi_star, r_lower_hint)(x1, x2)


def order_case_parameters(spec: ProblemSpec, n: int, x1, x2) -> Dict[str, float]:
    """
    SN parameters of the univariate order-case Bayes density.

    With lower bound b: alpha0 = (x1 - x2 - b)/sT, alpha1 = beta tau / sT,
    xi = x1, tau = sqrt(s1/n + sY).
    """
    if spec.p != 1 or not isinstance(spec.constraint, HalfLineProduct) or not spec.constraint.is_order:
        raise ValueError("order_case_parameters needs p = 1 and a finite lower bound")
    beta, tau, sigma_t = bayes_t_parameters(spec, n)
    bound = spec.constraint.lower[0]
    return {
        "alpha0": (float(x1) - float(x2) - bound) / sigma_t,
        "alpha1": beta * tau / sigma_t,
        "xi": float(x1),
        "tau": tau,
    }


def bayes_t_parameters(spec: ProblemSpec, n: int) -> Tuple[float, float, float]:
    """
    (beta, tau, sigma_T) of the Bayes representation for power n.

    beta = s1/(s1 + n sY), tau^2 = s1/n + sY, sigma_T^2 = s2 + n sY beta.
    """
    beta = spec.sigma1_sq / (spec.sigma1_sq + n * spec.sigmaY_sq)
    tau = math.sqrt(spec.sigma1_sq / n + spec.sigmaY_sq)
    sigma_t = math.sqrt(spec.sigma2_sq + n * spec.sigmaY_sq * beta)
    return beta, tau, sigma_t


def _bayes_power(loss: LossSpec) -> int:
    n = loss.integer_n
    if n is None:
        raise ValueError(
            f"Bayes uniform density needs n = 2/(1 - alpha) to be a positive integer, "
            f"got alpha = {loss.alpha}; use plug-in or expanded estimators for risk comparisons"
        )
    return n


def _box_bayes_batch(x1s, x2s, spec: ProblemSpec, n: int) -> DensityBatch:
    A = spec.constraint
    lo, hi = A.bounds()
    beta, tau, sigma_t = bayes_t_parameters(spec, n)
    alpha1 = beta * tau / sigma_t
    diff = x1s - x2s

    def log_accept(y, rows):
        mu_t = beta * (y - x1s[rows][:, None, :]) + diff[rows][:, None, :]
        return n * np.sum(log_ndtr_diff((mu_t - lo) / sigma_t, (mu_t - hi) / sigma_t), axis=-1)

    with np.errstate(invalid="ignore"):
        a0 = (diff - lo) / sigma_t
        a2 = (diff - hi) / sigma_t
    log_norm = np.zeros(diff.shape[0])
    for c in range(spec.p):
        lower_free, upper_free = np.isneginf(lo[c]), np.isposinf(hi[c])
        if lower_free and upper_free:
            continue
        if upper_free:
            log_norm += log_ndtr(a0[:, c] / math.sqrt(1 + alpha1 ** 2)) if n == 1 else np.log(k_n(n, a0[:, c], alpha1))
        elif lower_free:
            log_norm += log_ndtr(-a2[:, c] / math.sqrt(1 + alpha1 ** 2)) if n == 1 else np.log(k_n(n, -a2[:, c], alpha1))
        elif n == 1:
            s = math.sqrt(1 + alpha1 ** 2)
            log_norm += log_ndtr_diff(a0[:, c] / s, a2[:, c] / s)
        else:
            log_norm += np.log(j_n(n, a0[:, c], alpha1, a2[:, c]))

    skew = None
    if spec.p == 1:
        skew = {
            "n": n,
            "alpha0": a0[:, 0],
            "alpha1": alpha1,
            "alpha2": None if np.isposinf(hi[0]) else a2[:, 0],
            "tau": tau,
        }
    return DensityBatch(
        kind=BAYES_UNIFORM,
        p=spec.p,
        centers=x1s,
        variance=tau * tau,
        log_accept=log_accept,
        log_normalizer=log_norm,
        skew_params=skew,
    )


def _ball_normalizer_mc(
    diff: np.ndarray, spec: ProblemSpec, n: int, samples: int, seed: int
) -> Tuple[float, float]:
    """P(all Z_i in the ball) for the equicorrelated Z_i = diff + sT U_i + beta tau U_0."""
    beta, tau, sigma_t = bayes_t_parameters(spec, n)
    radius_sq = spec.constraint.m ** 2
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    chunk = 200_000
    while done < samples:
        size = min(chunk, samples - done)
        shared = beta * tau * rng.standard_normal((size, 1, spec.p))
        z = diff + sigma_t * rng.standard_normal((size, n, spec.p)) + shared
        inside = np.all(np.sum(z * z, axis=-1) <= radius_sq, axis=-1)
        hits += int(inside.sum())
        done += size
    prob = hits / samples
    return prob, math.sqrt(max(prob * (1.0 - prob), 0.0) / samples)


def _ball_bayes_batch(
    x1s, x2s, spec: ProblemSpec, n: int, normalizer_samples: int, normalizer_seed: int
) -> DensityBatch:
    A = spec.constraint
    beta, tau, sigma_t = bayes_t_parameters(spec, n)
    diff = x1s - x2s
    x_t = A.m ** 2 / sigma_t ** 2

    def log_accept(y, rows):
        mu_t = beta * (y - x1s[rows][:, None, :]) + diff[rows][:, None, :]
        lam = np.sum(mu_t * mu_t, axis=-1) / sigma_t ** 2
        with np.errstate(divide="ignore"):
            return n * np.log(noncentral_chi2_cdf(spec.p, lam, np.full_like(lam, x_t)))

    std_error = 0.0
    if n == 1:
        lam = np.sum(diff * diff, axis=-1) / spec.var_diff
        prob = noncentral_chi2_cdf(spec.p, lam, np.full_like(lam, A.m ** 2 / spec.var_diff))
        log_norm = np.log(np.asarray(prob, dtype=float))
    else:
        logger.debug(f"Ball normalizer by Monte Carlo: {normalizer_samples} draws per density")
        log_norm = np.empty(diff.shape[0])
        for i in range(diff.shape[0]):
            prob, se = _ball_normalizer_mc(diff[i], spec, n, normalizer_samples, normalizer_seed)
            if prob <= 0.0:
                raise RuntimeError(
                    f"Ball normalizer Monte Carlo recorded no hits for draw {i}; increase the sample size"
                )
            log_norm[i] = math.log(prob)
            std_error = max(std_error, se)
    return DensityBatch(
        kind=BAYES_UNIFORM,
        p=spec.p,
        centers=x1s,
        variance=tau * tau,
        log_accept=log_accept,
        log_normalizer=log_norm,
        normalizer_std_error=std_error,
    )


def bayes_uniform(
    x1,
    x2,
    spec: ProblemSpec,
    loss: LossSpec,
    normalizer_samples: int = BALL_NORMALIZER_SAMPLES,
    normalizer_seed: int = BALL_NORMALIZER_SEED,
) -> PredictiveDensity:
    """
    Bayes predictive density for the uniform prior on theta1 - theta2 in A.

    q_mre(y1; x1) P(T in A)^n / normalizer, with
    T ~ N_p(beta (y1 - x1) + x1 - x2, sT I), beta = s1/(s1 + n sY), sT = s2 + n sY beta.

    Raises:
        ValueError: If n = 2/(1 - alpha) is not a positive integer
    """
    return make_bayes_uniform(spec, loss, normalizer_samples, normalizer_seed)(x1, x2)


def make_mre(spec: ProblemSpec, loss: LossSpec) -> Estimator:
    c = mre_scale(spec, loss)
    return Estimator("mre", spec, lambda x1s, x2s: _gaussian_batch(MRE, x1s, c, spec), lambda x1s, x2s: x1s)


def make_plugin(spec: ProblemSpec, c: float) -> Estimator:
    return Estimator(
        f"plugin:{c:g}", spec, lambda x1s, x2s: _gaussian_batch(GAUSSIAN_PLUGIN, x1s, c, spec), lambda x1s, x2s: x1s
    )


def make_mle(spec: ProblemSpec, c: float = 1.0) -> Estimator:
    name = "mle" if c == 1.0 else f"mle:{c:g}"

    def centers(x1s, x2s):
        return _mle_centers(x1s, x2s, spec)

    return Estimator(name, spec, lambda x1s, x2s: _gaussian_batch(GAUSSIAN_PLUGIN, centers(x1s, x2s), c, spec), centers)


def make_bayes_rkl(spec: ProblemSpec) -> Estimator:
    def centers(x1s, x2s):
        return posterior_mean_theta1(x1s, x2s, spec)

    return Estimator(
        "bayes-rkl", spec, lambda x1s, x2s: _gaussian_batch(GAUSSIAN_PLUGIN, centers(x1s, x2s), 1.0, spec), centers
    )


def make_two_step(spec: ProblemSpec, psi_star: Optional[Psi] = None, r_lower_hint: Optional[float] = None) -> Estimator:
    """Two-step estimator; psi_star defaults to the uniform-prior Bayes estimate of mu1."""
    c = two_step_scale(spec, r_lower_hint)
    if psi_star is None:
        def psi_star(w1):
            return psi_uniform(w1, spec.var_w1, spec.constraint, 1.0 + spec.r)

    def centers(x1s, x2s):
        frame = rotate(x1s, x2s, spec)
        return frame.w2 + np.asarray(psi_star(frame.w1), dtype=float).reshape(frame.w1.shape)

    return Estimator("two-step", spec, lambda x1s, x2s: _gaussian_batch(GAUSSIAN_PLUGIN, centers(x1s, x2s), c, spec), centers)


def make_bayes_uniform(
    spec: ProblemSpec,
    loss: LossSpec,
    normalizer_samples: int = BALL_NORMALIZER_SAMPLES,
    normalizer_seed: int = BALL_NORMALIZER_SEED,
) -> Estimator:
    n = _bayes_power(loss)
    A = spec.constraint

    def build(x1s, x2s):
        if A.is_unconstrained:
            return _gaussian_batch(MRE, x1s, mre_scale(spec, loss), spec)
        if isinstance(A, _BoxConstraint):
            return _box_bayes_batch(x1s, x2s, spec, n)
        if isinstance(A, Ball):
            return _ball_bayes_batch(x1s, x2s, spec, n, normalizer_samples, normalizer_seed)
        raise NotImplementedError(f"No Bayes uniform density for constraint {A!r}")

    return Estimator("bayes-uniform", spec, build)


def make_estimator(name: str, spec: ProblemSpec, loss: LossSpec, **options) -> Estimator:
    """
    Build an estimator from its command-line name.

    Args:
        name: One of mre, mle, mle:<c>, plugin:<c>, bayes-uniform, bayes-rkl, two-step
        spec: Problem specification
        loss: Loss (used by mre and bayes-uniform)
        **options: r_lower_hint / psi_star for two-step; normalizer_samples /
            normalizer_seed for bayes-uniform

    Raises:
        ValueError: For unknown names or malformed factors
    """
    key, _, arg = name.strip().partition(":")
    if key in ("mle", "plugin") and arg:
        try:
            c = float(arg)
        except ValueError as e:
            raise ValueError(f"Estimator '{name}': expansion factor must be a number") from e
        return make_mle(spec, c) if key == "mle" else make_plugin(spec, c)
    if arg:
        raise ValueError(f"Estimator '{name}' takes no parameter")
    if key == "mre":
        return make_mre(spec, loss)
    if key == "mle":
        return make_mle(spec)
    if key == "bayes-uniform":
        return make_bayes_uniform(
            spec,
            loss,
            options.get("normalizer_samples", BALL_NORMALIZER_SAMPLES),
            options.get("normalizer_seed", BALL_NORMALIZER_SEED),
        )
    if key == "bayes-rkl":
        return make_bayes_rkl(spec)
    if key == "two-step":
        return make_two_step(spec, options.get("psi_star"), options.get("r_lower_hint"))
    raise ValueError(f"Unknown estimator '{name}'. Choose from: {', '.join(ESTIMATOR_NAMES)}")


def normalization_check(
    qhat: PredictiveDensity, samples: int = LOSS_MC_SAMPLES, seed: int = 0
) -> Tuple[float, float]:
    """
    Integral of qhat and its standard error.

    p = 1 uses Gauss-Hermite quadrature under the Gaussian base (standard
    error 0); p > 1 uses Monte Carlo under the base.
    """
    if qhat.is_gaussian:
        return 1.0, 0.0
    sd = math.sqrt(qhat.variance)
    center = qhat.center
    if qhat.p == 1:
        def integrand(z):
            y = (center[0] + sd * z)[None, :, None]
            return np.exp(qhat.batch.log_weight(y))[0]

        return float(gauss_hermite_expect(integrand)), 0.0
    rng = np.random.default_rng(seed)
    y = center + sd * rng.standard_normal((samples, qhat.p))
    weights = np.exp(qhat.batch.log_weight(y[None, :, :]))[0]
    return float(weights.mean()), float(weights.std(ddof=1) / math.sqrt(samples))
