"""
Risk Curves Module.

Evaluates the risks of a set of predictive densities along a line of
parameter points theta1 = Delta e1, theta2 = 0, together with their ratios
to the minimum risk equivariant density, and writes them as CSV.

Risks come from closed forms and one-dimensional quadrature where those
exist (Gaussian plug-ins under Kullback-Leibler and reverse Kullback-Leibler
losses, the Bayes densities of box constraints under Kullback-Leibler loss);
every other combination is simulated.
"""

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from predens.config import CSV_HEADER, CSV_SIGNIFICANT_DIGITS
from predens.estimators import Estimator, LossSpec, make_estimator, mre_scale, two_step_scale
from predens.experiment import ExperimentConfig, figure_configs
from predens.model import HalfLineProduct, Interval, ProblemSpec, Rectangle, _BoxConstraint, rotate
from predens.risk import (
    CLOSED_FORM,
    QUADRATURE,
    RiskEstimate,
    ThetaPoint,
    gaussian_alpha_loss,
    kl_risk_plugin_closed,
    mse_clipped_normal,
    mse_decomposed,
    risk_diff_interval,
    risk_diff_order,
    risk_mc,
)
from predens.special import QuadratureError, gauss_hermite_expect, truncated_std_normal_mean

__all__ = [
    "CurveRow",
    "format_curve_csv",
    "format_plot_data",
    "risk_curve",
    "risk_quadrature",
    "run_figure",
    "write_curve_csv",
    "write_plot_data",
]

logger = logging.getLogger("predens.curves")

REFERENCE = "mre"


@dataclass(frozen=True)
class CurveRow:
    """One (delta, estimator) point of a risk curve."""
    delta: float
    estimator: str
    risk: float
    std_error: float
    ratio_vs_mre: float
    method: str = CLOSED_FORM


def _parse_name(name: str) -> Tuple[str, float]:
    key, _, arg = name.strip().partition(":")
    return key, float(arg) if arg else 1.0


def _misspecified(spec: ProblemSpec) -> bool:
    return spec.misspec is not None and not spec.misspec.is_identity


def _plugin_risk(mse: float, c: float, spec: ProblemSpec, loss: LossSpec) -> RiskEstimate:
    """Risk of N_p(center, c sY I) from the center's mean squared error (KL and RKL are linear in it)."""
    if loss.is_kl and not _misspecified(spec):
        return kl_risk_plugin_closed(mse, c, spec)
    var_y = spec.sigmaY_sq * spec.true_scheme.aY_sq
    return RiskEstimate(float(gaussian_alpha_loss(c * spec.sigmaY_sq, mse, var_y, spec.p, loss)))


def _box_bounds_w1(spec: ProblemSpec) -> Tuple[np.ndarray, np.ndarray]:
    A = spec.constraint
    if not isinstance(A, _BoxConstraint):
        raise NotImplementedError(f"No quadrature risk for constraint {A.describe()}")
    lo, hi = A.bounds()
    return lo / (1.0 + spec.r), hi / (1.0 + spec.r)


def _truncated_mean_mse(mu: float, var: float, lo: float, hi: float) -> float:
    """E(psi(W) - mu)^2 with psi the mean of N(W, var) truncated to [lo, hi], W ~ N(mu, var)."""
    sd = math.sqrt(var)

    def integrand(z):
        w = mu + sd * z
        estimate = w + sd * truncated_std_normal_mean((lo - w) / sd, (hi - w) / sd)
        return (estimate - mu) ** 2

    return float(gauss_hermite_expect(integrand))


def _bayes_uniform_kl(spec: ProblemSpec, theta: ThetaPoint, reference: float) -> float:
    """mre risk minus the coordinatewise risk differences of a box constraint."""
    A = spec.constraint
    if A.is_unconstrained:
        return reference
    if isinstance(A, HalfLineProduct):
        difference = 0.0
        for i, bound in enumerate(A.lower):
            if math.isinf(bound):
                continue
            line = spec.with_changes(p=1, constraint=HalfLineProduct((bound,)))
            difference += risk_diff_order(ThetaPoint.at(line, theta.theta1[i], theta.theta2[i]), line)
        return reference - difference
    if isinstance(A, (Interval, Rectangle)):
        if _misspecified(spec):
            raise NotImplementedError("No quadrature risk for interval Bayes densities under misspecification")
        widths = (A.m,) if isinstance(A, Interval) else A.m
        difference = 0.0
        for i, m in enumerate(widths):
            line = spec.with_changes(p=1, constraint=Interval(m), misspec=None)
            difference += risk_diff_interval(ThetaPoint.at(line, theta.theta1[i], theta.theta2[i]), line)
        return reference - difference
    raise NotImplementedError(f"No quadrature risk for bayes-uniform under {A.describe()}")


def risk_quadrature(name: str, spec: ProblemSpec, loss: LossSpec, theta: ThetaPoint) -> RiskEstimate:
    """
    Closed-form or quadrature risk of a named estimator at theta.

    Supported: mre and plugin:<c> (KL, RKL, any misspecification); mle, mle:<c>,
    bayes-rkl and two-step (KL, RKL, box constraints, nominal variances);
    bayes-uniform (KL, box constraints; intervals need nominal variances).

    Raises:
        NotImplementedError: For combinations without a closed form or quadrature
        ValueError: For unknown estimator names
    """
    key, c = _parse_name(name)
    if not (loss.is_kl or loss.is_rkl):
        raise NotImplementedError(f"No quadrature risk under {loss.label} loss")
    scheme = spec.true_scheme

    if key in ("mre", "plugin"):
        scale = mre_scale(spec, loss) if key == "mre" else c
        return _plugin_risk(spec.p * spec.sigma1_sq * scheme.a1_sq, scale, spec, loss)

    if key == "bayes-uniform":
        if not loss.is_kl:
            raise NotImplementedError("Quadrature risk of bayes-uniform needs Kullback-Leibler loss")
        reference = _plugin_risk(spec.p * spec.sigma1_sq * scheme.a1_sq, mre_scale(spec, loss), spec, loss).value
        return RiskEstimate(_bayes_uniform_kl(spec, theta, reference), method=QUADRATURE)

    if key not in ("mle", "bayes-rkl", "two-step"):
        raise ValueError(f"Unknown estimator '{name}'")
    if _misspecified(spec):
        raise NotImplementedError(f"No quadrature risk for {name} under misspecified variances")
    lo, hi = _box_bounds_w1(spec)
    mu1 = rotate(theta.theta1, theta.theta2, spec, theta.theta1, theta.theta2).mu1.reshape(spec.p)

    if key == "mle":
        psi_mse = float(np.sum(mse_clipped_normal(mu1, spec.var_w1, lo, hi)))
        return _plugin_risk(mse_decomposed(psi_mse, spec, theta), c, spec, loss)

    psi_mse = sum(_truncated_mean_mse(float(mu1[i]), spec.var_w1, float(lo[i]), float(hi[i])) for i in range(spec.p))
    scale = 1.0 if key == "bayes-rkl" else two_step_scale(spec)
    risk = _plugin_risk(mse_decomposed(psi_mse, spec, theta), scale, spec, loss)
    return RiskEstimate(risk.value, method=QUADRATURE)


def _ordered_names(config: ExperimentConfig) -> List[str]:
    names = [REFERENCE]
    for name in config.estimators:
        name = name.strip()
        if name not in names:
            names.append(name)
    return names


def _evaluate_point(
    index: int,
    delta: float,
    config: ExperimentConfig,
    estimators: Dict[str, Estimator],
) -> Tuple[float, Dict[str, RiskEstimate], Dict[str, str]]:
    theta = ThetaPoint.from_delta(config.spec, delta)
    seed = config.seed + index
    results: Dict[str, RiskEstimate] = {}
    fallbacks: Dict[str, str] = {}
    for name, estimator in estimators.items():
        if config.method == "quadrature":
            try:
                results[name] = risk_quadrature(name, config.spec, config.loss, theta)
                continue
            except (NotImplementedError, QuadratureError) as e:
                fallbacks[name] = str(e)
        results[name] = risk_mc(estimator, theta, config.loss, config.spec, config.mc_samples, seed)
    return delta, results, fallbacks


def risk_curve(config: ExperimentConfig, progress: bool = False) -> List[CurveRow]:
    """
    Risks of config.estimators (and mre) on every grid value of Delta.

    Grid point i uses seed config.seed + i, so the rows do not depend on the
    number of workers; they are returned sorted by (delta, estimator).

    Raises:
        ValueError: For unknown estimator names or unsupported estimator/loss pairs
    """
    names = _ordered_names(config)
    estimators = {name: make_estimator(name, config.spec, config.loss) for name in names}
    deltas = config.delta_grid.values()
    logger.info(
        f"Risk curve: {len(names)} estimators x {len(deltas)} points, {config.loss.label} loss, "
        f"method {config.method}, A = {config.spec.constraint.describe()}"
    )

    evaluated = []
    fallbacks: Dict[str, str] = {}
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = [
            executor.submit(_evaluate_point, i, float(delta), config, estimators)
            for i, delta in enumerate(deltas)
        ]
        for future in tqdm(as_completed(futures), total=len(futures), desc="Risk curve", ncols=80, disable=not progress):
            delta, results, failed = future.result()
            evaluated.append((delta, results))
            fallbacks.update(failed)

    for name in sorted(fallbacks):
        logger.warning(f"Quadrature unavailable for {name} ({fallbacks[name]}); used Monte Carlo")

    suffix = f"[{config.tag}]" if config.tag else ""
    rows = []
    for delta, results in evaluated:
        reference = results[REFERENCE].value
        for name, estimate in results.items():
            rows.append(
                CurveRow(
                    delta=delta,
                    estimator=f"{name}{suffix}",
                    risk=estimate.value,
                    std_error=estimate.std_error,
                    ratio_vs_mre=estimate.value / reference,
                    method=estimate.method,
                )
            )
    rows.sort(key=lambda row: (row.delta, row.estimator))
    return rows


def run_figure(
    figure_id: int,
    method: str = "quadrature",
    mc_samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    progress: bool = False,
) -> List[CurveRow]:
    """Rows of every preset experiment of a figure, merged and sorted."""
    options = {"method": method}
    for key, value in (("mc_samples", mc_samples), ("seed", seed), ("workers", workers)):
        if value is not None:
            options[key] = value
    rows: List[CurveRow] = []
    for config in figure_configs(figure_id, **options):
        rows.extend(risk_curve(config, progress))
    rows.sort(key=lambda row: (row.delta, row.estimator))
    return rows


def _fmt(value: float) -> str:
    return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"


def format_curve_csv(rows: Iterable[CurveRow]) -> str:
    """CSV text with header delta,estimator,risk,std_error,ratio_vs_mre."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(row.delta), row.estimator, _fmt(row.risk), _fmt(row.std_error), _fmt(row.ratio_vs_mre)])
    return buffer.getvalue()


def format_plot_data(rows: Sequence[CurveRow]) -> str:
    """Wide CSV of risk ratios: one line per delta, one column per estimator."""
    names = sorted({row.estimator for row in rows})
    table: Dict[float, Dict[str, float]] = {}
    for row in rows:
        table.setdefault(row.delta, {})[row.estimator] = row.ratio_vs_mre
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["delta"] + names)
    for delta in sorted(table):
        writer.writerow([_fmt(delta)] + [_fmt(table[delta][n]) if n in table[delta] else "" for n in names])
    return buffer.getvalue()


def _write(text: str, path) -> Path:
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return output


def write_curve_csv(rows: Iterable[CurveRow], path) -> Path:
    """Write curve rows to path (parent folders are created)."""
    output = _write(format_curve_csv(rows), path)
    logger.info(f"Wrote risk curve to {output}")
    return output


def write_plot_data(rows: Sequence[CurveRow], path) -> Path:
    output = _write(format_plot_data(rows), path)
    logger.info(f"Wrote plot data to {output}")
    return output
