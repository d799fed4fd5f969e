"""
Model Module.

The two-population Gaussian model X1 ~ N_p(theta1, s1 I), X2 ~ N_p(theta2, s2 I),
Y1 ~ N_p(theta1, sY I) with the additional information theta1 - theta2 in A.
Holds the constraint sets, the problem specification, the rotation
W1 = (X1 - X2)/(1 + r), W2 = (r X1 + X2)/(1 + r) and the linear reductions.

All vector arguments may carry leading batch axes: shape (..., p).
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np

from predens.special import noncentral_chi2_cdf, ndtr_diff, truncated_std_normal_mean

__all__ = [
    "ConstraintSet",
    "HalfLineProduct",
    "Interval",
    "Rectangle",
    "Ball",
    "unconstrained",
    "MisspecScheme",
    "ProblemSpec",
    "RotatedFrame",
    "rotate",
    "reduce_linear",
    "reduce_bivariate_correlated",
    "constraint_probability",
    "project_onto",
    "as_vectors",
]

logger = logging.getLogger("predens.model")

DataTransform = Callable[[np.ndarray, np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]


def as_vectors(values, p: int, name: str = "vector") -> np.ndarray:
    """
    Coerce input to an array whose last axis has length p.

    Scalars and 1-D arrays of length p are accepted; for p = 1 a 1-D array
    of any length is read as a batch of scalars.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if p == 1 and arr.shape[-1] != 1:
        arr = arr[..., None]
    if arr.shape[-1] != p:
        raise ValueError(f"{name} has dimension {arr.shape[-1]}, expected {p}")
    return arr


class ConstraintSet:
    """Base class for the additional-information set A (closed and convex)."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def is_unconstrained(self) -> bool:
        return False

    def contains(self, v, tol: float = 1e-12) -> np.ndarray:
        raise NotImplementedError

    def probability(self, mu, var: float) -> np.ndarray:
        """P(T in A) for T ~ N_p(mu, var I)."""
        raise NotImplementedError

    def project(self, v) -> np.ndarray:
        """Euclidean projection onto A."""
        raise NotImplementedError

    def truncated_mean(self, mu, var: float) -> np.ndarray:
        """E[T | T in A] for T ~ N_p(mu, var I)."""
        raise NotImplementedError

    def scaled(self, factor: float) -> "ConstraintSet":
        """The set factor * A."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


class _BoxConstraint(ConstraintSet):
    """Product of per-coordinate closed intervals, possibly unbounded."""

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    @property
    def dim(self) -> int:
        return len(self.bounds()[0])

    def contains(self, v, tol: float = 1e-12) -> np.ndarray:
        lo, hi = self.bounds()
        v = as_vectors(v, self.dim)
        return np.all((v >= lo - tol) & (v <= hi + tol), axis=-1)

    def probability(self, mu, var: float) -> np.ndarray:
        _check_var(var)
        lo, hi = self.bounds()
        mu = as_vectors(mu, self.dim, "mu")
        sd = math.sqrt(var)
        return np.prod(ndtr_diff((hi - mu) / sd, (lo - mu) / sd), axis=-1)

    def project(self, v) -> np.ndarray:
        lo, hi = self.bounds()
        return np.clip(as_vectors(v, self.dim), lo, hi)

    def truncated_mean(self, mu, var: float) -> np.ndarray:
        _check_var(var)
        lo, hi = self.bounds()
        mu = as_vectors(mu, self.dim, "mu")
        sd = math.sqrt(var)
        return mu + sd * truncated_std_normal_mean((lo - mu) / sd, (hi - mu) / sd)


@dataclass(frozen=True)
class HalfLineProduct(_BoxConstraint):
    """
    A = {t : t_i >= lower_i for every i}.

    A bound of -inf leaves its coordinate free; all bounds -inf encode A = R^p.
    """
    lower: Tuple[float, ...] = (0.0,)

    def __post_init__(self):
        lower = tuple(float(b) for b in np.atleast_1d(self.lower))
        if not lower:
            raise ValueError("HalfLineProduct needs at least one coordinate")
        if any(math.isnan(b) or b == math.inf for b in lower):
            raise ValueError(f"Lower bounds must be finite or -inf, got {lower}")
        object.__setattr__(self, "lower", lower)

    @classmethod
    def order(cls, p: int = 1, bound: float = 0.0) -> "HalfLineProduct":
        """Order constraint theta1_i - theta2_i >= bound on every coordinate."""
        return cls((float(bound),) * p)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.lower, dtype=float)
        return lo, np.full_like(lo, np.inf)

    @property
    def is_unconstrained(self) -> bool:
        return all(b == -math.inf for b in self.lower)

    @property
    def is_order(self) -> bool:
        """True when every coordinate carries a finite lower bound."""
        return all(math.isfinite(b) for b in self.lower)

    def scaled(self, factor: float) -> "HalfLineProduct":
        _check_factor(factor)
        return HalfLineProduct(tuple(b * factor for b in self.lower))

    def describe(self) -> str:
        if self.is_unconstrained:
            return f"R^{self.dim}"
        return "half-line product, lower bounds " + ", ".join(f"{b:g}" for b in self.lower)


@dataclass(frozen=True)
class Interval(_BoxConstraint):
    """A = [-m, m] for p = 1."""
    m: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m > 0):
            raise ValueError(f"Interval half-width must be > 0, got {self.m}")

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array([-self.m]), np.array([self.m])

    def scaled(self, factor: float) -> "Interval":
        _check_factor(factor)
        return Interval(self.m * factor)

    def describe(self) -> str:
        return f"interval [-{self.m:g}, {self.m:g}]"


@dataclass(frozen=True)
class Rectangle(_BoxConstraint):
    """A = product of [-m_i, m_i]."""
    m: Tuple[float, ...] = (1.0,)

    def __post_init__(self):
        m = tuple(float(v) for v in np.atleast_1d(self.m))
        if not m or not all(math.isfinite(v) and v > 0 for v in m):
            raise ValueError(f"Rectangle half-widths must be > 0, got {m}")
        object.__setattr__(self, "m", m)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        hi = np.asarray(self.m, dtype=float)
        return -hi, hi

    def scaled(self, factor: float) -> "Rectangle":
        _check_factor(factor)
        return Rectangle(tuple(v * factor for v in self.m))

    def describe(self) -> str:
        return "rectangle, half-widths " + ", ".join(f"{v:g}" for v in self.m)


@dataclass(frozen=True)
class Ball(ConstraintSet):
    """A = {t : ||t|| <= m} in dimension p."""
    m: float = 1.0
    p: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m > 0):
            raise ValueError(f"Ball radius must be > 0, got {self.m}")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"Ball dimension must be a positive integer, got {self.p}")

    @property
    def dim(self) -> int:
        return int(self.p)

    def contains(self, v, tol: float = 1e-12) -> np.ndarray:
        return np.linalg.norm(as_vectors(v, self.dim), axis=-1) <= self.m + tol

    def probability(self, mu, var: float) -> np.ndarray:
        _check_var(var)
        mu = as_vectors(mu, self.dim, "mu")
        lam = np.sum(mu * mu, axis=-1) / var
        return noncentral_chi2_cdf(self.dim, lam, np.full_like(lam, self.m ** 2 / var))

    def project(self, v) -> np.ndarray:
        v = as_vectors(v, self.dim)
        norm = np.linalg.norm(v, axis=-1, keepdims=True)
        with np.errstate(divide="ignore"):
            shrink = np.where(norm > self.m, self.m / norm, 1.0)
        return v * shrink

    def truncated_mean(self, mu, var: float) -> np.ndarray:
        """mu * F_{p+2,lam}(m^2/var) / F_{p,lam}(m^2/var), lam = ||mu||^2/var."""
        _check_var(var)
        mu = as_vectors(mu, self.dim, "mu")
        lam = np.sum(mu * mu, axis=-1) / var
        x = np.full_like(lam, self.m ** 2 / var)
        numerator = noncentral_chi2_cdf(self.dim + 2, lam, x)
        denominator = noncentral_chi2_cdf(self.dim, lam, x)
        underflow = np.asarray(denominator) <= 0.0
        if np.any(underflow):
            logger.debug("Ball truncated mean: cdf underflow, using the boundary projection")
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(underflow, 0.0, np.asarray(numerator) / np.where(underflow, 1.0, denominator))
        shrunk = mu * ratio[..., None]
        return np.where(underflow[..., None], self.project(mu), shrunk)

    def scaled(self, factor: float) -> "Ball":
        _check_factor(factor)
        return Ball(self.m * factor, self.p)

    def describe(self) -> str:
        return f"ball of radius {self.m:g} in R^{self.p}"


def unconstrained(p: int = 1) -> HalfLineProduct:
    """The sentinel A = R^p."""
    return HalfLineProduct((-math.inf,) * p)


def _check_var(var: float) -> None:
    if not (var > 0 and math.isfinite(var)):
        raise ValueError(f"Variance must be a positive finite number, got {var}")


def _check_factor(factor: float) -> None:
    if not (factor > 0 and math.isfinite(factor)):
        raise ValueError(f"Scale factor must be > 0, got {factor}")


@dataclass(frozen=True)
class MisspecScheme:
    """
    True-variance multipliers: Var X1 = a1_sq s1, Var X2 = a2_sq s2, Var Y1 = aY_sq sY.
    """
    a1_sq: float = 1.0
    a2_sq: float = 1.0
    aY_sq: float = 1.0

    def __post_init__(self):
        for name in ("a1_sq", "a2_sq", "aY_sq"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be > 0, got {value}")

    @classmethod
    def identity(cls) -> "MisspecScheme":
        return cls(1.0, 1.0, 1.0)

    @property
    def is_identity(self) -> bool:
        return self.a1_sq == 1.0 and self.a2_sq == 1.0 and self.aY_sq == 1.0


@dataclass(frozen=True)
class ProblemSpec:
    """
    Complete experiment context.

    Attributes:
        p: Dimension
        sigma1_sq: Variance of X1 (per coordinate)
        sigma2_sq: Variance of X2
        sigmaY_sq: Variance of Y1
        constraint: The set A for theta1 - theta2
        misspec: Optional true-variance multipliers used when simulating data
    """
    p: int = 1
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0
    sigmaY_sq: float = 1.0
    constraint: ConstraintSet = field(default_factory=HalfLineProduct)
    misspec: Optional[MisspecScheme] = None

    def __post_init__(self):
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p!r}")
        for name in ("sigma1_sq", "sigma2_sq", "sigmaY_sq"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be > 0, got {value}")
        if not isinstance(self.constraint, ConstraintSet):
            raise ValueError(f"constraint must be a ConstraintSet, got {self.constraint!r}")
        if self.constraint.dim != self.p:
            raise ValueError(
                f"Constraint dimension {self.constraint.dim} does not match p = {self.p}"
            )

    @property
    def r(self) -> float:
        return self.sigma2_sq / self.sigma1_sq

    @property
    def var_w1(self) -> float:
        return self.sigma1_sq / (1.0 + self.r)

    @property
    def var_w2(self) -> float:
        return self.sigma2_sq / (1.0 + self.r)

    @property
    def var_diff(self) -> float:
        """Variance of X1 - X2 per coordinate."""
        return self.sigma1_sq + self.sigma2_sq

    @property
    def true_scheme(self) -> MisspecScheme:
        return self.misspec if self.misspec is not None else MisspecScheme.identity()

    def with_changes(self, **changes) -> "ProblemSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class RotatedFrame:
    """
    Rotated coordinates of (x1, x2) and, when supplied, of (theta1, theta2).

    W1 and W2 are independent under the model with variances var_w1, var_w2.
    """
    r: float
    w1: np.ndarray
    w2: np.ndarray
    var_w1: float
    var_w2: float
    mu1: Optional[np.ndarray] = None
    mu2: Optional[np.ndarray] = None

    def reconstruct(self) -> Tuple[np.ndarray, np.ndarray]:
        """Recover (x1, x2) from (w1, w2)."""
        x1 = self.w1 + self.w2
        x2 = self.w2 * (1.0 + self.r) - self.r * x1
        return x1, x2


def rotate(x1, x2, spec: ProblemSpec, theta1=None, theta2=None) -> RotatedFrame:
    """
    Rotate data (and optionally parameters) into (W1, W2).

    Args:
        x1, x2: Arrays of shape (..., p)
        spec: Problem specification
        theta1, theta2: Optional parameters, rotated into (mu1, mu2)

    Returns:
        RotatedFrame with w1 = (x1 - x2)/(1 + r) and w2 = x1 - w1

    Raises:
        ValueError: On dimension mismatch
    """
    x1 = as_vectors(x1, spec.p, "x1")
    x2 = as_vectors(x2, spec.p, "x2")
    try:
        np.broadcast_shapes(x1.shape, x2.shape)
    except ValueError as e:
        raise ValueError(f"x1 shape {x1.shape} incompatible with x2 shape {x2.shape}") from e
    r = spec.r
    w1 = (x1 - x2) / (1.0 + r)
    w2 = x1 - w1
    mu1 = mu2 = None
    if theta1 is not None and theta2 is not None:
        t1 = as_vectors(theta1, spec.p, "theta1")
        t2 = as_vectors(theta2, spec.p, "theta2")
        mu1 = (t1 - t2) / (1.0 + r)
        mu2 = t1 - mu1
    return RotatedFrame(r, w1, w2, spec.var_w1, spec.var_w2, mu1, mu2)


def reduce_linear(c1: float, c2: float, d, spec: ProblemSpec) -> Tuple[ProblemSpec, DataTransform]:
    """
    Reduce the constraint c1 theta1 - c2 theta2 + d in A to theta1' - theta2' in A.

    Returns:
        (transformed spec, transform) where transform maps (x1, x2, y1) to
        (c1 x1, c2 x2 - d, c1 y1)
    """
    if c1 == 0 or c2 == 0:
        raise ValueError(f"Multipliers must be nonzero, got c1={c1}, c2={c2}")
    try:
        shift = np.broadcast_to(np.asarray(d, dtype=float), (spec.p,)).copy()
    except ValueError as e:
        raise ValueError(f"Shift d must be a scalar or a {spec.p}-vector, got {d!r}") from e
    new_spec = spec.with_changes(
        sigma1_sq=c1 * c1 * spec.sigma1_sq,
        sigma2_sq=c2 * c2 * spec.sigma2_sq,
        sigmaY_sq=c1 * c1 * spec.sigmaY_sq,
    )

    def transform(x1, x2, y1):
        return (
            c1 * np.asarray(x1, dtype=float),
            c2 * np.asarray(x2, dtype=float) - shift,
            c1 * np.asarray(y1, dtype=float),
        )

    return new_spec, transform


def reduce_bivariate_correlated(
    rho: float, spec: ProblemSpec
) -> Tuple[ProblemSpec, Tuple[float, float, float], DataTransform]:
    """
    Decorrelate (X1, X2) with correlation rho for p = 1.

    X2' = (X2 - rho (s2/s1) X1) / sqrt(1 + rho^2) is independent of X1 with
    variance s2 (1 - rho^2)/(1 + rho^2). Substituting theta2 = sqrt(1 + rho^2) theta2'
    + rho (s2/s1) theta1 turns theta1 - theta2 in A into c1 theta1 - c2 theta2' in A
    with c1 = 1 - rho s2/s1, c2 = sqrt(1 + rho^2), d = 0, ready for reduce_linear.

    Returns:
        (independent-coordinate spec, (c1, c2, d), transform of (x1, x2, y1))

    Raises:
        ValueError: If p != 1, rho is outside (0, 1) or rho s2 = s1 (c1 = 0)
    """
    if spec.p != 1:
        raise ValueError(f"Correlated reduction is defined for p = 1, got p = {spec.p}")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    s1 = math.sqrt(spec.sigma1_sq)
    s2 = math.sqrt(spec.sigma2_sq)
    norm = math.sqrt(1.0 + rho * rho)
    c1 = 1.0 - rho * s2 / s1
    if abs(c1) < 1e-12:
        raise ValueError(f"rho s2/s1 = 1 leaves no constraint on theta1 (rho={rho}, s1={s1:g}, s2={s2:g})")
    c2 = norm
    new_spec = spec.with_changes(sigma2_sq=spec.sigma2_sq * (1.0 - rho * rho) / (1.0 + rho * rho))

    def transform(x1, x2, y1):
        x1 = np.asarray(x1, dtype=float)
        return x1, (np.asarray(x2, dtype=float) - rho * s2 / s1 * x1) / norm, np.asarray(y1, dtype=float)

    return new_spec, (c1, c2, 0.0), transform


def constraint_probability(A: ConstraintSet, mu, var: float):
    """P(T in A) for T ~ N_p(mu, var I); float for a single mu."""
    if A.is_unconstrained:
        _check_var(var)
        probs = np.ones(as_vectors(mu, A.dim, "mu").shape[:-1])
    else:
        probs = np.asarray(A.probability(mu, var), dtype=float)
    return float(probs.reshape(-1)[0]) if probs.size == 1 and np.ndim(mu) <= 1 else probs


def project_onto(A: ConstraintSet, v) -> np.ndarray:
    """Euclidean projection of v onto A (shape preserved as (..., p))."""
    return A.project(v)
