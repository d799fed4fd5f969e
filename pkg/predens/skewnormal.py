"""
Skew-Normal Module.

The generalized Balakrishnan skew-normal family SN(n, alpha0, alpha1, xi, tau)
with density

    phi((t - xi)/tau) / tau * Phi^n(alpha0 + alpha1 (t - xi)/tau) / K_n(alpha0, alpha1)

and its interval variant, where Phi^n is replaced by
{Phi(alpha0 + alpha1 z) - Phi(alpha2 + alpha1 z)}^n and K_n by J_n. These are the
exact univariate Bayes predictive densities under the uniform prior on
theta1 - theta2 >= 0 and |theta1 - theta2| <= m.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple, Union

import numpy as np

from predens.config import SAMPLER_BATCH, SAMPLER_MAX_PROPOSALS
from predens.special import (
    inverse_mills,
    j_n,
    k_n,
    log_ndtr,
    log_ndtr_diff,
    log_std_normal_pdf,
    std_normal_pdf,
    truncated_std_normal_mean,
)

__all__ = [
    "SkewNormalGB",
    "SkewNormalInterval",
    "pdf",
    "log_pdf",
    "mean",
    "interval_pdf",
    "interval_mean",
    "rejection_sample",
    "sample",
]

logger = logging.getLogger("predens.skewnormal")


def _check_common(n, xi: float, tau: float) -> None:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not (math.isfinite(tau) and tau > 0):
        raise ValueError(f"tau must be > 0, got {tau}")
    if not math.isfinite(xi):
        raise ValueError(f"xi must be finite, got {xi}")


@dataclass(frozen=True)
class SkewNormalGB:
    """
    SN(n, alpha0, alpha1, xi, tau).

    Attributes:
        n: Power of the skewing cdf (positive integer)
        alpha0: Skewing offset
        alpha1: Skewing slope
        xi: Location
        tau: Scale (> 0)
    """
    n: int
    alpha0: float
    alpha1: float
    xi: float = 0.0
    tau: float = 1.0

    def __post_init__(self):
        _check_common(self.n, self.xi, self.tau)
        if not (math.isfinite(self.alpha0) and math.isfinite(self.alpha1)):
            raise ValueError(f"alpha0/alpha1 must be finite, got {self.alpha0}, {self.alpha1}")

    @cached_property
    def normalizer(self) -> float:
        """K_n(alpha0, alpha1)."""
        return k_n(self.n, self.alpha0, self.alpha1)

    def log_acceptance(self, z: np.ndarray) -> np.ndarray:
        """n log Phi(alpha0 + alpha1 z) on the standardized scale."""
        return self.n * log_ndtr(self.alpha0 + self.alpha1 * np.asarray(z, dtype=float))

    def log_pdf(self, t):
        z = (np.asarray(t, dtype=float) - self.xi) / self.tau
        values = log_std_normal_pdf(z) - math.log(self.tau) + self.log_acceptance(z) - math.log(self.normalizer)
        return float(values) if np.ndim(t) == 0 else values

    def pdf(self, t):
        values = np.exp(self.log_pdf(t))
        return float(values) if np.ndim(t) == 0 else values

    def mean(self) -> float:
        """
        First moment xi + tau E(W).

        E(W) = n a1/s phi(a0/s) K_{n-1}(a0/s^2, a1/s) / K_n(a0, a1), s = sqrt(1 + a1^2);
        for n = 1 this is a1/s R(a0/s) with R the inverse Mills ratio.
        """
        if self.alpha1 == 0.0:
            return self.xi
        s = math.sqrt(1.0 + self.alpha1 ** 2)
        if self.n == 1:
            ew = self.alpha1 / s * inverse_mills(self.alpha0 / s)
        else:
            previous = k_n(self.n - 1, self.alpha0 / (s * s), self.alpha1 / s)
            ew = self.n * self.alpha1 / s * std_normal_pdf(self.alpha0 / s) * previous / self.normalizer
        return self.xi + self.tau * ew


@dataclass(frozen=True)
class SkewNormalInterval:
    """
    Interval variant with skewing term {Phi(alpha0 + alpha1 z) - Phi(alpha2 + alpha1 z)}^n.

    Attributes:
        n: Power (positive integer)
        alpha0, alpha2: Upper and lower offsets, alpha0 > alpha2
        alpha1: Slope
        xi, tau: Location and scale
    """
    n: int
    alpha0: float
    alpha1: float
    alpha2: float
    xi: float = 0.0
    tau: float = 1.0

    def __post_init__(self):
        _check_common(self.n, self.xi, self.tau)
        if not all(math.isfinite(a) for a in (self.alpha0, self.alpha1, self.alpha2)):
            raise ValueError("alpha0, alpha1, alpha2 must be finite")
        if not self.alpha0 > self.alpha2:
            raise ValueError(f"alpha0 must exceed alpha2, got {self.alpha0} <= {self.alpha2}")

    @cached_property
    def normalizer(self) -> float:
        """J_n(alpha0, alpha1, alpha2)."""
        return j_n(self.n, self.alpha0, self.alpha1, self.alpha2)

    def log_acceptance(self, z: np.ndarray) -> np.ndarray:
        shift = self.alpha1 * np.asarray(z, dtype=float)
        return self.n * log_ndtr_diff(self.alpha0 + shift, self.alpha2 + shift)

    def log_pdf(self, t):
        z = (np.asarray(t, dtype=float) - self.xi) / self.tau
        values = log_std_normal_pdf(z) - math.log(self.tau) + self.log_acceptance(z) - math.log(self.normalizer)
        return float(values) if np.ndim(t) == 0 else values

    def pdf(self, t):
        values = np.exp(self.log_pdf(t))
        return float(values) if np.ndim(t) == 0 else values

    def mean(self) -> float:
        """Mean for n = 1; no closed form is available for larger n."""
        if self.n != 1:
            raise NotImplementedError(f"Interval skew-normal mean is only available for n = 1, got n = {self.n}")
        s = math.sqrt(1.0 + self.alpha1 ** 2)
        inner = float(truncated_std_normal_mean(self.alpha2 / s, self.alpha0 / s))
        return self.xi - self.tau * self.alpha1 / s * inner


SkewNormal = Union[SkewNormalGB, SkewNormalInterval]


def pdf(d: SkewNormalGB, t):
    """Density of an SN(n, alpha0, alpha1, xi, tau) distribution."""
    return d.pdf(t)


def log_pdf(d: SkewNormal, t):
    return d.log_pdf(t)


def mean(d: SkewNormalGB) -> float:
    return d.mean()


def interval_pdf(d: SkewNormalInterval, t):
    return d.pdf(t)


def interval_mean(d: SkewNormalInterval) -> float:
    return d.mean()


def rejection_sample(d: SkewNormal, count: int, seed: int) -> Tuple[np.ndarray, float]:
    """
    Acceptance-rejection sampler.

    Proposes Z ~ N(0, 1) and accepts with probability exp(d.log_acceptance(Z));
    the expected acceptance rate is the normalizer.

    Args:
        d: Skew-normal distribution (either variant)
        count: Number of draws (>= 1)
        seed: Seed for numpy's default generator

    Returns:
        Tuple of (draws, empirical acceptance rate)

    Raises:
        RuntimeError: If the proposal budget is exhausted
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    rate_guess = max(d.normalizer, 1e-6)
    chunks = []
    accepted = 0
    proposed = 0
    while accepted < count:
        batch = max(SAMPLER_BATCH, int((count - accepted) / rate_guess * 1.2) + 1)
        if proposed + batch > SAMPLER_MAX_PROPOSALS:
            raise RuntimeError(
                f"Rejection sampler exceeded {SAMPLER_MAX_PROPOSALS} proposals "
                f"(acceptance rate {accepted / max(proposed, 1):.2e})"
            )
        z = rng.standard_normal(batch)
        u = rng.random(batch)
        keep = u < np.exp(d.log_acceptance(z))
        chunks.append(z[keep])
        accepted += int(keep.sum())
        proposed += batch
    draws = d.xi + d.tau * np.concatenate(chunks)[:count]
    rate = accepted / proposed
    logger.debug(f"Rejection sampler: {proposed} proposals, acceptance rate {rate:.4f}")
    return draws, rate


def sample(d: SkewNormal, count: int, seed: int) -> np.ndarray:
    """Draw count variates from d, deterministically for a given seed."""
    draws, _ = rejection_sample(d, count, seed)
    return draws
