"""
Dominance Module.

Variance expansion calculus for plug-in densities N_p(theta1_hat, c sY I):
the expansion boundary c0(s), the mean-squared-error ratios R_lower / R_upper,
the dominance and complete-subclass intervals they induce, the loss-duality
parameter maps for alpha-divergence losses and the persistence check for the
order-case Bayes density under misspecified variances.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from tqdm import tqdm

from predens.config import C0_MAX_ITER, C0_TOL, DEFAULT_MC_SAMPLES, DEFAULT_SEED, R_BOUNDS_GRID_POINTS, SE_BAND
from predens.estimators import identity_psi, restricted_mle_mu1
from predens.model import Ball, HalfLineProduct, Interval, MisspecScheme, ProblemSpec, Rectangle, rotate
from predens.risk import ThetaPoint, misspec_sigmas, point_risk_mc

__all__ = [
    "expansion_gap",
    "c0",
    "r_floor",
    "r_bounds_order",
    "default_mu1_grid",
    "r_bounds_numeric",
    "ExpansionReport",
    "expansion_report",
    "gamma0",
    "dual_reflected_scale",
    "reflected_affine_map",
    "sigma_z1",
    "PersistenceVerdict",
    "persistence_case",
    "persistence_check",
]

logger = logging.getLogger("predens.dominance")

Psi = Callable[[np.ndarray], np.ndarray]


def expansion_gap(c: float, s: float) -> float:
    """G_s(c) = (1 - 1/c) s - log c."""
    return (1.0 - 1.0 / c) * s - math.log(c)


def _log_root_excess(u: float, s: float) -> float:
    # G_s(e^u) = (1 - e^-u) (s - h(u)) with h(u) = u/(1 - e^-u) increasing from h(0+) = 1
    return u / -math.expm1(-u) - s


def c0(s: float) -> float:
    """
    Root c in (s, inf) of G_s(c) = (1 - 1/c) s - log c.

    Solved for u = log c as h(u) = u/(1 - e^-u) = s, which stays well
    conditioned as s -> 1 where G_s itself is O((s - 1)^3) on the bracket.
    The root lies in (log s, s + 1) for every s > 1.

    Raises:
        ValueError: If s <= 1
    """
    if not (math.isfinite(s) and s > 1.0):
        raise ValueError(f"c0 requires s > 1, got {s}")
    lower, upper = math.log1p(s - 1.0), s + 1.0
    u = brentq(_log_root_excess, lower, upper, args=(s,), xtol=1e-300, rtol=1e-15, maxiter=C0_MAX_ITER)
    root = math.exp(u)
    gap = expansion_gap(root, s)
    if abs(gap) >= C0_TOL:
        raise RuntimeError(f"c0({s}) root search stopped with |G| = {abs(gap):.2e}")
    logger.debug(f"c0({s:g}) = {root:.10g}")
    return root


def r_floor(spec: ProblemSpec) -> float:
    """s1 s2 / ((s1 + s2) sY), the R lower bound shared by every W2 + psi(W1) estimator."""
    return spec.sigma1_sq * spec.sigma2_sq / (spec.var_diff * spec.sigmaY_sq)


def r_bounds_order(spec: ProblemSpec) -> Tuple[float, float]:
    """
    R_lower and R_upper of the restricted mle under an order constraint.

    R_lower = s1 (s2 + s1/2) / (sY (s1 + s2)), R_upper = s1/sY.

    Raises:
        NotImplementedError: For other constraints (use r_bounds_numeric)
    """
    A = spec.constraint
    if not (isinstance(A, HalfLineProduct) and A.is_order):
        raise NotImplementedError(
            f"Closed-form R bounds need an order constraint, got {A.describe()}; use r_bounds_numeric"
        )
    s1, s2, sy = spec.sigma1_sq, spec.sigma2_sq, spec.sigmaY_sq
    return s1 * (s2 + 0.5 * s1) / (sy * (s1 + s2)), s1 / sy


def default_mu1_grid(spec: ProblemSpec, points: int = R_BOUNDS_GRID_POINTS) -> np.ndarray:
    """
    Grid of mu1 values along the first axis covering the boundary and interior of A/(1 + r).

    Remaining coordinates sit at the projection of 0 onto A/(1 + r).
    """
    A = spec.constraint.scaled(1.0 / (1.0 + spec.r))
    sd = math.sqrt(spec.var_w1)
    if isinstance(A, HalfLineProduct) and math.isfinite(A.lower[0]):
        line = A.lower[0] + np.linspace(0.0, 6.0 * sd, points)
    elif isinstance(A, Interval):
        line = np.linspace(-A.m, A.m, points)
    elif isinstance(A, Rectangle):
        line = np.linspace(-A.m[0], A.m[0], points)
    elif isinstance(A, Ball):
        line = np.linspace(-A.m, A.m, points)
    else:
        line = np.linspace(-4.0 * sd, 4.0 * sd, points)
    grid = np.tile(A.project(np.zeros(spec.p)).reshape(1, spec.p), (points, 1))
    grid[:, 0] = line
    return grid


def r_bounds_numeric(
    spec: ProblemSpec,
    psi: Optional[Psi],
    grid,
    n: int = DEFAULT_MC_SAMPLES,
    seed: int = DEFAULT_SEED,
    progress: bool = False,
) -> Tuple[float, float]:
    """
    Monte Carlo R_lower and R_upper of W2 + psi(W1) over a grid of mu1 values.

    R(mu1) = MSE/(p sY). The lower bound is reported as the smallest estimate
    minus SE_BAND standard errors, never below r_floor(spec).

    Args:
        spec: Problem specification
        psi: Estimator of mu1 from W1 (restricted mle when None)
        grid: mu1 values, shape (G,) for p = 1 or (G, p)
        n: Draws per grid point
        seed: Base seed; grid point i uses seed + i

    Raises:
        ValueError: If the grid is empty
    """
    points = np.asarray(grid, dtype=float).reshape(-1, spec.p) if np.size(grid) else np.empty((0, spec.p))
    if points.shape[0] == 0:
        raise ValueError("r_bounds_numeric needs a non-empty mu1 grid")
    if psi is None:
        def psi(w1):
            return restricted_mle_mu1(w1, spec)

    def estimate(x1s, x2s):
        frame = rotate(x1s, x2s, spec)
        return frame.w2 + psi(frame.w1)

    scale = spec.p * spec.sigmaY_sq
    lows, highs = [], []
    for i, mu1 in enumerate(tqdm(points, desc="R bounds", ncols=80, disable=not progress)):
        theta = ThetaPoint.at(spec, (1.0 + spec.r) * mu1, np.zeros(spec.p))
        risk = point_risk_mc(estimate, theta, spec, n, seed + i)
        lows.append((risk.value - SE_BAND * risk.std_error) / scale)
        highs.append(risk.value / scale)
    floor = r_floor(spec)
    r_lower = max(min(lows), floor)
    if r_lower == floor:
        logger.debug("R lower bound at its floor")
    return r_lower, max(max(highs), r_lower)


@dataclass(frozen=True)
class ExpansionReport:
    """
    Expansion intervals of a plug-in density.

    Attributes:
        r_lower: R_lower (> 0)
        r_upper: R_upper (>= r_lower)
        c0_value: c0(1 + r_lower)
        exact: False when the R bounds come from Monte Carlo
    """
    r_lower: float
    r_upper: float
    c0_value: float
    exact: bool = True

    def __post_init__(self):
        if not self.r_lower > 0:
            raise ValueError(f"r_lower must be > 0, got {self.r_lower}")
        if self.r_upper < self.r_lower:
            raise ValueError(f"r_upper {self.r_upper} below r_lower {self.r_lower}")

    @property
    def dominance_interval(self) -> Tuple[float, float]:
        """Open interval (1, c0) of expansions dominating c = 1."""
        return 1.0, self.c0_value

    @property
    def complete_subclass(self) -> Tuple[float, float]:
        """Half-open [1 + R_lower, c0)."""
        return 1.0 + self.r_lower, self.c0_value

    @property
    def minimal_complete(self) -> Tuple[float, float]:
        """Closed [1 + R_lower, 1 + R_upper]."""
        return 1.0 + self.r_lower, 1.0 + self.r_upper

    def bounds_hold(self) -> bool:
        s = 1.0 + self.r_lower
        # s^2 and c0 agree to O((s - 1)^2) as s -> 1
        return s * s < self.c0_value * (1.0 + 1e-12) and self.c0_value < math.exp(s)

    def nested(self) -> bool:
        dom_lo, dom_hi = self.dominance_interval
        comp_lo, comp_hi = self.complete_subclass
        min_lo, min_hi = self.minimal_complete
        return dom_lo <= comp_lo and comp_hi <= dom_hi and comp_lo <= min_lo and min(min_hi, dom_hi) <= comp_hi

    def to_text(self) -> str:
        """Key-value report lines."""
        s = 1.0 + self.r_lower
        lines = [
            f"r_lower = {self.r_lower:.10g}",
            f"r_upper = {self.r_upper:.10g}",
            f"exact = {str(self.exact).lower()}",
            f"c0 = {self.c0_value:.10g}",
            f"dominance_interval = ({1.0:.10g}, {self.c0_value:.10g})",
            f"complete_subclass = [{s:.10g}, {self.c0_value:.10g})",
            f"minimal_complete = [{s:.10g}, {1.0 + self.r_upper:.10g}]",
            f"bound_check = {'pass' if self.bounds_hold() else 'fail'} "
            f"({s * s:.10g} < {self.c0_value:.10g} < {math.exp(s):.10g})",
        ]
        return "\n".join(lines)


def expansion_report(
    spec: ProblemSpec,
    psi: Optional[Psi] = None,
    grid=None,
    n: int = DEFAULT_MC_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> ExpansionReport:
    """
    Expansion intervals for the plug-in at W2 + psi(W1).

    psi = None stands for the restricted mle. Exact bounds are used for the
    mle under an order constraint and for the identity under A = R^p; other
    cases estimate the bounds by Monte Carlo on grid (default_mu1_grid when None).
    """
    A = spec.constraint
    exact = True
    if A.is_unconstrained and (psi is None or psi is identity_psi):
        r_lower = r_upper = spec.sigma1_sq / spec.sigmaY_sq
    elif psi is None and isinstance(A, HalfLineProduct) and A.is_order:
        r_lower, r_upper = r_bounds_order(spec)
    else:
        exact = False
        if grid is None:
            grid = default_mu1_grid(spec)
        r_lower, r_upper = r_bounds_numeric(spec, psi, grid, n, seed)
    report = ExpansionReport(r_lower, r_upper, c0(1.0 + r_lower), exact)
    logger.info(
        f"Expansion report: R in [{r_lower:.6g}, {r_upper:.6g}], c0 = {report.c0_value:.6g}"
        + ("" if exact else " (Monte Carlo bounds)")
    )
    return report


def _check_open_alpha(alpha: float) -> None:
    if not -1.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (-1, 1), got {alpha}")


def gamma0(alpha: float, c: float, spec: ProblemSpec) -> float:
    """Reflected normal loss scale (c/(1 + alpha) + 1/(1 - alpha)) sY dual to L_alpha."""
    _check_open_alpha(alpha)
    if not c > 0:
        raise ValueError(f"c must be > 0, got {c}")
    return (c / (1.0 + alpha) + 1.0 / (1.0 - alpha)) * spec.sigmaY_sq


def dual_reflected_scale(alpha: float, c: float, spec: ProblemSpec) -> float:
    """
    Scale gamma at which the L_alpha loss of N_p(theta1_hat, c sY I) is an
    increasing affine map of 1 - exp(-||theta1_hat - theta1||^2 / (2 gamma)).

    Equals 2 gamma0(alpha, c, spec).
    """
    return 2.0 * gamma0(alpha, c, spec)


def reflected_affine_map(alpha: float, c: float, spec: ProblemSpec) -> Tuple[float, float]:
    """
    (offset, slope) with L_alpha = offset + slope * reflected_normal_loss at dual_reflected_scale.

    slope = 4 A0 / (1 - alpha^2) and offset = 4 (1 - A0) / (1 - alpha^2), A0 the
    affinity of the two Gaussians at equal centers.
    """
    _check_open_alpha(alpha)
    a = 0.5 * (1.0 + alpha)
    b = 1.0 - a
    var_hat = c * spec.sigmaY_sq
    pooled = a * spec.sigmaY_sq + b * var_hat
    affinity = math.exp(
        spec.p * (0.5 * b * math.log(var_hat) + 0.5 * a * math.log(spec.sigmaY_sq) - 0.5 * math.log(pooled))
    )
    scale = 4.0 / (1.0 - alpha ** 2)
    return scale * (1.0 - affinity), scale * affinity


def sigma_z1(alpha: float, c: float, spec: ProblemSpec) -> float:
    """
    Variance of the point-estimation problem dual to L_alpha for expanded plug-ins.

    k s1 / (k + (1 - alpha^2) s1/sY), k = (1 + alpha) + c (1 - alpha); s1 at |alpha| = 1.
    """
    if not -1.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [-1, 1], got {alpha}")
    if not c > 0:
        raise ValueError(f"c must be > 0, got {c}")
    if abs(alpha) == 1.0:
        return spec.sigma1_sq
    k = (1.0 + alpha) + c * (1.0 - alpha)
    return k * spec.sigma1_sq / (k + (1.0 - alpha ** 2) * spec.sigma1_sq / spec.sigmaY_sq)


@dataclass(frozen=True)
class PersistenceVerdict:
    holds: bool
    sigma_u_sq: float
    sigma_v_sq: float
    case: Optional[str] = None

    def to_text(self) -> str:
        case = self.case if self.case is not None else "none"
        return (
            f"holds = {str(self.holds).lower()}, sigmaU_sq = {self.sigma_u_sq:.10g}, "
            f"sigmaV_sq = {self.sigma_v_sq:.10g}, case = {case}"
        )


def persistence_case(spec: ProblemSpec, a: MisspecScheme, tol: float = 1e-12) -> Optional[str]:
    """
    Named sufficient case a scheme falls in: "i" (equal multipliers), "ii"
    (aY <= a1 = a2) or "iii" (equal nominal variances, (a2 + aY)/2 <= a1).
    """
    if abs(a.a1_sq - a.a2_sq) <= tol and abs(a.a1_sq - a.aY_sq) <= tol:
        return "i"
    if abs(a.a1_sq - a.a2_sq) <= tol and a.aY_sq <= a.a1_sq + tol:
        return "ii"
    equal_nominal = spec.sigma1_sq == spec.sigma2_sq == spec.sigmaY_sq
    if equal_nominal and 0.5 * (a.a2_sq + a.aY_sq) <= a.a1_sq + tol:
        return "iii"
    return None


def persistence_check(spec: ProblemSpec, a: MisspecScheme) -> PersistenceVerdict:
    """
    Whether dominance of the order-case Bayes density over mre survives the
    misspecification a: holds iff sigmaU_sq <= sigmaV_sq.

    Raises:
        ValueError: Unless p = 1 with an order constraint
    """
    A = spec.constraint
    if spec.p != 1 or not (isinstance(A, HalfLineProduct) and A.is_order):
        raise ValueError(f"persistence_check needs p = 1 and an order constraint, got {A.describe()}")
    sigma_u_sq, sigma_v_sq = misspec_sigmas(spec, a)
    holds = sigma_u_sq <= sigma_v_sq * (1.0 + 1e-12)
    return PersistenceVerdict(holds, sigma_u_sq, sigma_v_sq, persistence_case(spec, a))
