"""
Verification Module.

Numerical self-checks of the package: closed forms against quadrature,
quadrature against Monte Carlo, the dominance statements and the figure
claims. Level "fast" runs the quadrature-only checks, "full" adds the Monte
Carlo oracles.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from predens.config import DEFAULT_SEED, SE_BAND
from predens.curves import risk_quadrature
from predens.dominance import (
    c0,
    dual_reflected_scale,
    expansion_gap,
    expansion_report,
    gamma0,
    persistence_check,
    reflected_affine_map,
)
from predens.estimators import (
    LossSpec,
    bayes_rkl,
    bayes_t_parameters,
    make_bayes_uniform,
    make_estimator,
    make_mle,
    make_mre,
    make_plugin,
    normalization_check,
)
from predens.model import HalfLineProduct, Interval, MisspecScheme, ProblemSpec
from predens.risk import (
    ThetaPoint,
    gaussian_alpha_loss,
    kl_risk_plugin_closed,
    misspec_sigmas,
    point_risk_mc,
    risk_diff_interval,
    risk_diff_order,
    risk_difference_mc,
    risk_mc,
)
from predens.skewnormal import SkewNormalGB, SkewNormalInterval
from predens.special import (
    gauss_hermite_expect,
    inverse_mills,
    k1_closed_form,
    k_n,
    log_ndtr,
    log_ndtr_diff,
    noncentral_chi2_cdf,
)

__all__ = [
    "CheckResult",
    "FAST_CHECKS",
    "FULL_CHECKS",
    "LEVELS",
    "VerificationSummary",
    "VerifyOptions",
    "posterior_expectation",
    "posterior_moments_quadrature",
    "run_verification",
]

logger = logging.getLogger("predens.verify")

LEVELS = ("fast", "full")


@dataclass(frozen=True)
class VerifyOptions:
    """
    Attributes:
        seed: Base seed of the Monte Carlo checks
        sigma_t_sq: Replacement for the computed sigma_T^2 in the diagonal identity
            check (a corrupted value must make that check fail)
    """
    seed: int = DEFAULT_SEED
    sigma_t_sq: Optional[float] = None


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationSummary:
    level: str
    checks: Tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_text(self) -> str:
        lines = [f"level = {self.level}"]
        for check in self.checks:
            status = "pass" if check.passed else "FAIL"
            lines.append(f"{check.name} = {status}" + (f" ({check.detail})" if check.detail else ""))
        lines.append(f"summary = {len(self.checks) - len(self.failures)}/{len(self.checks)} passed")
        return "\n".join(lines)


def _result(name: str, failures: Sequence[str], detail: str = "") -> CheckResult:
    if failures:
        return CheckResult(name, False, "; ".join(failures))
    return CheckResult(name, True, detail)


def posterior_expectation(g: Callable[[np.ndarray], np.ndarray], x1: float, x2: float, spec: ProblemSpec) -> float:
    """
    E(g(theta1) | x) under the uniform prior on theta1 - theta2 in A, p = 1.

    The posterior of theta1 is proportional to phi((theta1 - x1)/s1) times
    P(theta1 - theta2 in A | theta1) for theta2 ~ N(x2, s2).

    Raises:
        ValueError: Unless p = 1 with an order or interval constraint
    """
    A = spec.constraint
    s1, s2 = math.sqrt(spec.sigma1_sq), math.sqrt(spec.sigma2_sq)
    if spec.p != 1 or not (isinstance(A, Interval) or (isinstance(A, HalfLineProduct) and A.is_order)):
        raise ValueError(f"Posterior quadrature needs p = 1 and an order or interval constraint, got {A.describe()}")

    def log_weight(theta):
        if isinstance(A, Interval):
            return log_ndtr_diff((theta + A.m - x2) / s2, (theta - A.m - x2) / s2)
        return log_ndtr((theta - A.lower[0] - x2) / s2)

    def integrand(z):
        theta = x1 + s1 * z
        w = np.exp(log_weight(theta))
        return np.stack([w * g(theta), w])

    numerator, mass = gauss_hermite_expect(integrand)
    return float(numerator / mass)


def posterior_moments_quadrature(x1: float, x2: float, spec: ProblemSpec) -> Tuple[float, float]:
    """Posterior mean and variance of theta1 by one-dimensional quadrature."""
    mean = posterior_expectation(lambda t: t, x1, x2, spec)
    var = posterior_expectation(lambda t: (t - mean) ** 2, x1, x2, spec)
    return mean, var


def check_c0(options: VerifyOptions) -> CheckResult:
    failures = []
    value = c0(1.75)
    if abs(value - 3.48066) > 1e-3:
        failures.append(f"c0(1.75) = {value:.6f}")
    if abs(c0(2.0) - 4.9215) > 1e-3:
        failures.append(f"c0(2) = {c0(2.0):.6f}")
    if abs(expansion_gap(value, 1.75)) >= 1e-12:
        failures.append("G(c0(1.75)) not zero")
    for s in (1.2, 1.75, 2.0, 3.0, 5.0):
        if not s * s < c0(s) < math.exp(s):
            failures.append(f"bounds fail at s = {s}")
    values = [c0(s) for s in np.linspace(1.1, 6.0, 40)]
    if not all(b > a for a, b in zip(values, values[1:])):
        failures.append("c0 not increasing")
    return _result("c0", failures, f"c0(1.75) = {value:.6f}")


def check_expansion_intervals(options: VerifyOptions) -> CheckResult:
    report = expansion_report(ProblemSpec())
    failures = []
    if not (report.exact and abs(report.r_lower - 0.75) < 1e-12 and abs(report.r_upper - 1.0) < 1e-12):
        failures.append(f"R bounds ({report.r_lower}, {report.r_upper})")
    if abs(report.dominance_interval[1] - 3.48066) > 1e-4:
        failures.append(f"dominance interval {report.dominance_interval}")
    if report.complete_subclass[0] != 1.75 or report.minimal_complete != (1.75, 2.0):
        failures.append(f"complete {report.complete_subclass}, minimal {report.minimal_complete}")
    if not (report.bounds_hold() and report.nested()):
        failures.append("bound or nesting check")
    return _result("expansion-intervals", failures, f"minimal complete {report.minimal_complete}")


def check_order_risk_difference(options: VerifyOptions) -> CheckResult:
    spec = ProblemSpec()

    def diff(delta):
        return risk_diff_order(ThetaPoint.from_delta(spec, delta), spec)

    grid = [diff(d) for d in np.linspace(0.0, 6.0, 25)]
    failures = []
    if min(grid) < -1e-10:
        failures.append(f"negative value {min(grid):.3e} on [0, 6]")
    if abs(diff(0.0)) > 1e-10:
        failures.append(f"value at 0 is {diff(0.0):.3e}")
    if not diff(1.0) > 1e-6:
        failures.append(f"value at 1 is {diff(1.0):.3e}")
    if abs(diff(40.0)) > 1e-8:
        failures.append(f"value at 40 is {diff(40.0):.3e}")
    if not diff(-0.5) < 0:
        failures.append("value at -0.5 not negative")
    return _result("order-risk-difference", failures, f"max {max(grid):.6f}")


def check_interval_risk_difference(options: VerifyOptions) -> CheckResult:
    failures = []
    for m in (1.0, 2.0):
        spec = ProblemSpec(constraint=Interval(m))

        def diff(delta):
            return risk_diff_interval(ThetaPoint.from_delta(spec, delta), spec)

        interior = np.linspace(-m, m, 11)[1:-1]
        values = [diff(d) for d in interior]
        if min(values) <= 0:
            failures.append(f"m = {m:g}: non-positive value {min(values):.3e}")
        asym = max(abs(diff(d) - diff(-d)) for d in interior)
        if asym > 1e-10:
            failures.append(f"m = {m:g}: asymmetry {asym:.3e}")
    wide = ProblemSpec(constraint=Interval(30.0))
    far = risk_diff_interval(ThetaPoint.from_delta(wide, 0.0), wide)
    if abs(far) > 1e-9:
        failures.append(f"m = 30 value {far:.3e}")
    return _result("interval-risk-difference", failures)


def check_special_functions(options: VerifyOptions) -> CheckResult:
    failures = []
    if abs(k_n(2, 0.0, 1.0) - 1.0 / 3.0) > 1e-6:
        failures.append(f"K_2(0, 1) = {k_n(2, 0.0, 1.0)}")
    a0, a1 = np.meshgrid(np.linspace(-3.0, 3.0, 7), np.array([0.25, 0.5, 1.0]))
    gap = float(np.max(np.abs(k_n(1, a0, a1) - k1_closed_form(a0, a1))))
    if gap > 1e-12:
        failures.append(f"K_1 closed form gap {gap:.2e}")
    if abs(inverse_mills(8.0) / 5.0523e-15 - 1.0) > 1e-3:
        failures.append(f"inverse Mills at 8 = {inverse_mills(8.0):.4e}")

    for n in (1, 2, 3):
        for alpha0 in (-1.0, 0.0, 1.5):
            d = SkewNormalGB(n, alpha0, 0.7, xi=0.3, tau=1.2)
            moment = gauss_hermite_expect(lambda z: z * ndtr(alpha0 + 0.7 * z) ** n) / d.normalizer
            if abs(d.mean() - (0.3 + 1.2 * moment)) > 1e-9:
                failures.append(f"SN mean n = {n}, alpha0 = {alpha0}")
    box = SkewNormalInterval(1, 1.0, 0.7, -1.0, xi=-0.2, tau=0.8)
    moment = gauss_hermite_expect(lambda z: z * (ndtr(1.0 + 0.7 * z) - ndtr(-1.0 + 0.7 * z))) / box.normalizer
    if abs(box.mean() - (-0.2 + 0.8 * moment)) > 1e-9:
        failures.append("interval SN mean")

    rng = np.random.default_rng(options.seed)
    draws = np.sum((rng.standard_normal((200_000, 3)) + np.array([1.0, 0.0, 0.0])) ** 2, axis=1)
    hits = float(np.mean(draws <= 4.0))
    se = math.sqrt(hits * (1.0 - hits) / draws.size)
    exact = noncentral_chi2_cdf(3, 1.0, 4.0)
    if abs(hits - exact) > 4.0 * se:
        failures.append(f"noncentral chi-square {exact:.5f} vs MC {hits:.5f}")

    kl = kl_risk_plugin_closed(0.0, 2.0, ProblemSpec()).value
    if abs(kl - 0.5 * (math.log(2.0) - 0.5)) > 1e-12:
        failures.append(f"KL plug-in identity {kl}")
    hellinger = float(gaussian_alpha_loss(1.0, 1.0, 1.0, 1, LossSpec.hellinger()))
    if abs(hellinger - 4.0 * (1.0 - math.exp(-0.125))) > 1e-12:
        failures.append(f"Hellinger loss {hellinger}")
    return _result("special-functions", failures)


def check_diagonal_identity(options: VerifyOptions) -> CheckResult:
    """sigma_T^2 + sY beta^2 + beta^2 s1 = s1 + s2 for n = 1."""
    failures = []
    for s1, s2, sy in ((1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (1.0, 3.0, 0.5), (0.7, 1.3, 2.2)):
        spec = ProblemSpec(sigma1_sq=s1, sigma2_sq=s2, sigmaY_sq=sy)
        beta, _, sigma_t = bayes_t_parameters(spec, 1)
        sigma_t_sq = sigma_t ** 2 if options.sigma_t_sq is None else options.sigma_t_sq
        lhs = sigma_t_sq + sy * beta ** 2 + beta ** 2 * s1
        if abs(lhs - (s1 + s2)) > 1e-12 * (s1 + s2):
            failures.append(f"({s1:g}, {s2:g}, {sy:g}): {lhs:.12g} != {s1 + s2:.12g}")
    return _result("diagonal-identity", failures)


def check_persistence(options: VerifyOptions) -> CheckResult:
    spec = ProblemSpec()
    rng = np.random.default_rng(options.seed)
    failures = []
    cases = {
        "i": lambda: (lambda k: MisspecScheme(k, k, k))(rng.uniform(0.1, 10.0)),
        "ii": lambda: (lambda k: MisspecScheme(k, k, k * rng.uniform(0.01, 1.0)))(rng.uniform(0.1, 10.0)),
        "iii": lambda: (lambda a2, ay: MisspecScheme(0.5 * (a2 + ay) * rng.uniform(1.0, 3.0), a2, ay))(
            rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0)
        ),
    }
    for case, draw in cases.items():
        broken = sum(not persistence_check(spec, draw()).holds for _ in range(100))
        if broken:
            failures.append(f"case ({case}): {broken}/100 schemes fail")
    sigma_u_sq, sigma_v_sq = misspec_sigmas(spec, MisspecScheme.identity())
    if sigma_u_sq != sigma_v_sq:
        failures.append(f"identity scheme gives {sigma_u_sq} != {sigma_v_sq}")
    if persistence_check(spec, MisspecScheme(1.0, 1.0, 4.0)).holds:
        failures.append("scheme (1, 1, 4) reported as holding")
    return _result("persistence", failures)


def check_normalization(options: VerifyOptions) -> CheckResult:
    failures = []
    specs = (ProblemSpec(), ProblemSpec(sigma2_sq=2.0), ProblemSpec(constraint=Interval(1.0)))
    for spec in specs:
        for loss in (LossSpec.kl(), LossSpec.hellinger()):
            estimator = make_bayes_uniform(spec, loss)
            for x1, x2 in ((0.3, -0.2), (-1.0, 1.5), (2.0, 0.0)):
                total, _ = normalization_check(estimator(x1, x2))
                if abs(total - 1.0) > 1e-8:
                    failures.append(f"{spec.constraint.describe()}, {loss.label}, x = ({x1}, {x2}): {total:.10f}")
    return _result("normalization", failures)


def _kl_risk(name: str, spec: ProblemSpec, delta: float) -> float:
    return risk_quadrature(name, spec, LossSpec.kl(), ThetaPoint.from_delta(spec, delta)).value


def check_figure_1(options: VerifyOptions) -> CheckResult:
    """mle risk gain over mre, Bayes ratio at most one, and the bayes-uniform / mle:2 crossing."""
    spec = ProblemSpec()
    failures = []
    reference = _kl_risk("mre", spec, 0.0)
    gain_0 = _kl_risk("mle", spec, 0.0) / reference - 1.0
    gain_5 = _kl_risk("mle", spec, 5.0) / reference - 1.0
    if abs(gain_0 - 0.08) > 0.02:
        failures.append(f"gain at 0 is {gain_0:.4f}")
    if abs(gain_5 - 0.44) > 0.02:
        failures.append(f"gain at 5 is {gain_5:.4f}")
    ratios = np.array([_kl_risk("bayes-uniform", spec, d) / reference for d in np.linspace(0.0, 5.0, 31)])
    if abs(ratios[0] - 1.0) > 1e-10:
        failures.append(f"bayes-uniform ratio at 0 is {ratios[0]:.12f}")
    if np.any(ratios[1:] >= 1.0):
        failures.append(f"bayes-uniform ratio reaches {ratios[1:].max():.12f}")
    crossing = brentq(lambda d: _kl_risk("bayes-uniform", spec, d) - _kl_risk("mle:2", spec, d), 0.0, 2.0, xtol=1e-8)
    if abs(crossing - 0.76) > 0.05:
        failures.append(f"crossing at {crossing:.4f}")
    return _result(
        "figure-1", failures, f"gains {gain_0:.3f} / {gain_5:.3f}, crossing {crossing:.4f}" if not failures else ""
    )


def check_interval_figures(options: VerifyOptions) -> CheckResult:
    failures = []
    wide = ProblemSpec(constraint=Interval(2.0))
    for d in (-1.0, -0.5, 0.0, 0.5, 1.0):
        if not _kl_risk("mre", wide, d) < _kl_risk("mle", wide, d):
            failures.append(f"m = 2, delta = {d}: mle not worse than mre")
    narrow = ProblemSpec(constraint=Interval(1.0))
    for d in (-0.5, -0.25, 0.0, 0.25, 0.5):
        if not _kl_risk("mle", narrow, d) < _kl_risk("mre", narrow, d):
            failures.append(f"m = 1, delta = {d}: mle not better than mre")
    return _result("interval-figures", failures)


def check_dominance_audit(options: VerifyOptions) -> CheckResult:
    spec = ProblemSpec()
    failures = []
    for c in (1.2, 1.75, 3.4):
        for d in np.linspace(0.0, 3.0, 7):
            if not _kl_risk(f"mle:{c:g}", spec, d) < _kl_risk("mle", spec, d):
                failures.append(f"c = {c:g}, delta = {d:g}")
    return _result("dominance-audit", failures)


def check_rkl_perturbation(options: VerifyOptions) -> CheckResult:
    """The reverse-KL Bayes density minimizes the posterior expected loss among plug-ins N(center, c sY)."""
    rng = np.random.default_rng(options.seed)
    rkl = LossSpec.rkl()
    failures = []
    for k in range(5):
        s1, s2, sy = rng.uniform(0.5, 2.0, size=3)
        if k % 2:
            m = float(rng.uniform(0.5, 2.0))
            spec = ProblemSpec(sigma1_sq=s1, sigma2_sq=s2, sigmaY_sq=sy, constraint=Interval(m))
            diff = float(rng.uniform(-1.5 * m, 1.5 * m))
        else:
            spec = ProblemSpec(sigma1_sq=s1, sigma2_sq=s2, sigmaY_sq=sy)
            diff = float(rng.uniform(-1.5, 2.0)) * math.sqrt(spec.var_diff)
        x1 = float(rng.normal(0.0, 1.0))
        x2 = x1 - diff
        mean, var = posterior_moments_quadrature(x1, x2, spec)
        center = float(bayes_rkl(x1, x2, spec).center[0])
        if abs(center - mean) > 1e-6 * max(1.0, abs(mean)):
            failures.append(f"instance {k}: center {center:.8f} vs posterior mean {mean:.8f}")

        def expected_loss(point, c):
            return posterior_expectation(
                lambda t: gaussian_alpha_loss(c * sy, (point - t) ** 2, sy, 1, rkl), x1, x2, spec
            )

        best = expected_loss(center, 1.0)
        step = 0.1 * math.sqrt(var)
        for point, c in ((center + step, 1.0), (center - step, 1.0), (center, 0.9), (center, 1.1)):
            if not expected_loss(point, c) > best:
                failures.append(f"instance {k}: perturbation ({point - center:+.3f}, c = {c}) not worse")
    return _result("rkl-perturbation", failures)


def check_order_mc(options: VerifyOptions) -> CheckResult:
    spec = ProblemSpec()
    kl = LossSpec.kl()
    mre_est, bayes = make_mre(spec, kl), make_bayes_uniform(spec, kl)
    failures = []
    for i, d in enumerate((0.5, 1.0, 2.0)):
        theta = ThetaPoint.from_delta(spec, d)
        estimate = risk_difference_mc(mre_est, bayes, theta, kl, spec, 1_000_000, options.seed + i)
        exact = risk_diff_order(theta, spec)
        if not estimate.within(exact, SE_BAND):
            failures.append(f"delta = {d}: MC {estimate.value:.6f} +- {estimate.std_error:.1e} vs {exact:.6f}")
    return _result("order-risk-difference-mc", failures)


def check_kl_plugin_mc(options: VerifyOptions) -> CheckResult:
    spec = ProblemSpec()
    kl = LossSpec.kl()
    failures = []
    combos = [(d, c) for d in (0.0, 1.0, 3.0) for c in (1.0, 2.0)]
    for i, (d, c) in enumerate(combos):
        name = "mle" if c == 1.0 else f"mle:{c:g}"
        theta = ThetaPoint.from_delta(spec, d)
        exact = risk_quadrature(name, spec, kl, theta).value
        estimate = risk_mc(make_mle(spec, c), theta, kl, spec, 200_000, options.seed + i)
        if not estimate.within(exact, SE_BAND):
            failures.append(f"delta = {d}, c = {c}: MC {estimate.value:.6f} vs {exact:.6f}")
    return _result("kl-plugin-mc", failures)


def check_gamma0_duality(options: VerifyOptions) -> CheckResult:
    """alpha-risk differences of two plug-ins equal a positive multiple of reflected normal risk differences."""
    spec = ProblemSpec()
    c = 1.5
    first, second = make_mle(spec, c), make_plugin(spec, c)
    failures = []
    for i, alpha in enumerate((-0.5, 0.0, 0.5)):
        loss = LossSpec(alpha)
        gamma = dual_reflected_scale(alpha, c, spec)
        _, slope = reflected_affine_map(alpha, c, spec)
        for j, d in enumerate((0.0, 1.0, 3.0)):
            seed = options.seed + 10 * i + j
            theta = ThetaPoint.from_delta(spec, d)
            dens = risk_difference_mc(first, second, theta, loss, spec, 1_000_000, seed)
            point = (
                point_risk_mc(first.centers, theta, spec, 1_000_000, seed, gamma).value
                - point_risk_mc(second.centers, theta, spec, 1_000_000, seed, gamma).value
            )
            if abs(dens.value - slope * point) > 1e-9:
                failures.append(f"alpha = {alpha}, delta = {d}: {dens.value:.3e} vs {slope * point:.3e}")
            elif abs(dens.value) > SE_BAND * dens.std_error and np.sign(dens.value) != np.sign(point):
                failures.append(f"alpha = {alpha}, delta = {d}: signs differ")
    return _result("gamma0-duality", failures, f"gamma0(0, {c}) = {gamma0(0.0, c, spec):g}")


def check_interval_mc(options: VerifyOptions) -> CheckResult:
    kl = LossSpec.kl()
    failures = []
    for m, points, mle_worse in ((2.0, (-1.0, -0.5, 0.0, 0.5, 1.0), True), (1.0, (-0.5, -0.25, 0.0, 0.25, 0.5), False)):
        spec = ProblemSpec(constraint=Interval(m))
        mle_est, mre_est = make_estimator("mle", spec, kl), make_mre(spec, kl)
        for i, d in enumerate(points):
            est = risk_difference_mc(mle_est, mre_est, ThetaPoint.from_delta(spec, d), kl, spec, 100_000, options.seed + i)
            band = SE_BAND * est.std_error
            ok = est.value - band > 0 if mle_worse else est.value + band < 0
            if not ok:
                failures.append(f"m = {m:g}, delta = {d}: mle - mre = {est.value:.5f} +- {est.std_error:.1e}")
    return _result("interval-figures-mc", failures)


def check_dominance_audit_mc(options: VerifyOptions) -> CheckResult:
    spec = ProblemSpec()
    kl = LossSpec.kl()
    base = make_mle(spec)
    failures = []
    for i, c in enumerate((1.2, 1.75, 3.4)):
        expanded = make_mle(spec, c)
        for j, d in enumerate(np.linspace(0.0, 3.0, 7)):
            est = risk_difference_mc(expanded, base, ThetaPoint.from_delta(spec, d), kl, spec, 200_000, options.seed + 10 * i + j)
            if est.value > SE_BAND * est.std_error:
                failures.append(f"c = {c:g}, delta = {d:g}: difference {est.value:.5f} +- {est.std_error:.1e}")
    return _result("dominance-audit-mc", failures)


FAST_CHECKS: Dict[str, Callable[[VerifyOptions], CheckResult]] = {
    "c0": check_c0,
    "expansion-intervals": check_expansion_intervals,
    "order-risk-difference": check_order_risk_difference,
    "interval-risk-difference": check_interval_risk_difference,
    "special-functions": check_special_functions,
    "diagonal-identity": check_diagonal_identity,
    "persistence": check_persistence,
    "normalization": check_normalization,
    "figure-1": check_figure_1,
    "interval-figures": check_interval_figures,
    "dominance-audit": check_dominance_audit,
    "rkl-perturbation": check_rkl_perturbation,
}

FULL_CHECKS: Dict[str, Callable[[VerifyOptions], CheckResult]] = {
    **FAST_CHECKS,
    "order-risk-difference-mc": check_order_mc,
    "kl-plugin-mc": check_kl_plugin_mc,
    "gamma0-duality": check_gamma0_duality,
    "interval-figures-mc": check_interval_mc,
    "dominance-audit-mc": check_dominance_audit_mc,
}


def run_verification(
    level: str = "fast",
    seed: int = DEFAULT_SEED,
    sigma_t_sq: Optional[float] = None,
    only: Optional[Sequence[str]] = None,
) -> VerificationSummary:
    """
    Run the verification checks of a level.

    Args:
        level: "fast" (quadrature checks) or "full" (adds Monte Carlo oracles)
        seed: Base seed of the randomized checks
        sigma_t_sq: Corrupted sigma_T^2 for the diagonal identity negative control
        only: Restrict to these check names

    Raises:
        ValueError: For an unknown level or check name
    """
    if level not in LEVELS:
        raise ValueError(f"Unknown verification level '{level}'. Choose from: {', '.join(LEVELS)}")
    checks = FULL_CHECKS if level == "full" else FAST_CHECKS
    if only is not None:
        unknown = [name for name in only if name not in checks]
        if unknown:
            raise ValueError(f"Unknown check(s) for level {level}: {', '.join(unknown)}")
        checks = {name: fn for name, fn in checks.items() if name in only}

    options = VerifyOptions(seed, sigma_t_sq)
    results = []
    for name, check in checks.items():
        logger.info(f"Running {name}")
        try:
            result = check(options)
        except Exception as e:
            logger.debug(f"{name} raised", exc_info=True)
            result = CheckResult(name, False, f"raised {e!r}")
        if result.passed:
            logger.info(f"{name}: pass")
        else:
            logger.error(f"{name}: FAIL ({result.detail})")
        results.append(result)
    summary = VerificationSummary(level, tuple(results))
    logger.info(f"Verification {level}: {len(results) - len(summary.failures)}/{len(results)} checks passed")
    return summary
