"""
Command-Line Interface for predens.

Risk curves, figure presets, dominance reports, density tabulation and the
verification suite.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from predens.config import (
    CSV_SIGNIFICANT_DIGITS,
    DEFAULT_SEED,
    EXIT_OK,
    EXIT_VALIDATION_ERROR,
    EXIT_VERIFICATION_FAILED,
)
from predens.curves import format_curve_csv, risk_curve, run_figure, write_curve_csv, write_plot_data
from predens.dominance import (
    dual_reflected_scale,
    expansion_report,
    gamma0,
    persistence_check,
    sigma_z1,
)
from predens.estimators import ESTIMATOR_NAMES, identity_psi, make_estimator, psi_uniform
from predens.experiment import FIGURE_IDS, METHODS, ConfigError, ExperimentConfig, load_config, read_config_file
from predens.model import HalfLineProduct, MisspecScheme
from predens.verify import LEVELS, run_verification

__all__ = ["main", "parse_args"]


# Configure logging with simple tags
class ModuleFormatter(logging.Formatter):
    """Custom formatter that extracts module name from logger name."""
    def format(self, record):
        # "predens.estimators" -> "estimators"
        logger_name = record.name
        if logger_name.startswith('predens.'):
            module = logger_name.split('.')[-1]
            tag_map = {
                'skewnormal': 'skew',
                'estimators': 'estimators',
                'experiment': 'config',
            }
            record.name = tag_map.get(module, module)
        return super().format(record)


# stdout carries CSV and report output
handler = logging.StreamHandler(sys.stderr)
handler.setFormatter(ModuleFormatter("[%(name)s] %(message)s"))
logging.basicConfig(level=logging.INFO, handlers=[handler])

logger = logging.getLogger("predens.cli")


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from e


def _scheme(text: str) -> List[float]:
    values = _floats(text)
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected a1_sq,a2_sq,aY_sq, got '{text}'")
    return values


def _add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("problem (override spec.* keys of --config)")
    group.add_argument("--config", default=None, help="TOML experiment file with dotted keys (optional)")
    group.add_argument("--p", type=int, default=None, help="Dimension (default: 1)")
    group.add_argument("--sigma1-sq", type=float, default=None, help="Variance of X1 (default: 1.0)")
    group.add_argument("--sigma2-sq", type=float, default=None, help="Variance of X2 (default: 1.0)")
    group.add_argument("--sigmaY-sq", type=float, default=None, help="Variance of Y1 (default: 1.0)")
    group.add_argument(
        "--constraint",
        choices=["order", "interval", "rectangle", "ball", "none"],
        default=None,
        help="Constraint set A for theta1 - theta2 (default: order)",
    )
    group.add_argument("--m", type=_floats, default=None, help="Half-width(s) or radius of A (default: 1.0)")
    group.add_argument("--lower", type=_floats, default=None, help="Lower bound(s) of the order constraint (default: 0)")
    group.add_argument("--alpha", type=float, default=None, help="alpha-divergence index in [-1, 1] (default: -1, KL)")
    group.add_argument("--a1-sq", type=float, default=None, help="True-variance multiplier of X1 (optional)")
    group.add_argument("--a2-sq", type=float, default=None, help="True-variance multiplier of X2 (optional)")
    group.add_argument("--aY-sq", type=float, default=None, help="True-variance multiplier of Y1 (optional)")


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", choices=METHODS, default=None, help="Risk evaluation method (default: quadrature)")
    parser.add_argument("--mc-samples", type=int, default=None, help="Monte Carlo draws per grid point (default: 100000)")
    parser.add_argument("--seed", type=int, default=None, help=f"Base random seed (default: {DEFAULT_SEED})")
    parser.add_argument("--workers", type=int, default=None, help="Threads over grid points (default: 1)")
    parser.add_argument("--output", default=None, help="Output CSV path (default: stdout)")
    parser.add_argument("--plot-data", default=None, help="Also write a wide ratio table for plotting (optional)")
    parser.add_argument("--progress", action="store_true", help="Show progress bars")


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command-line arguments.

    Returns:
        Namespace object with parsed arguments
    """
    parser = argparse.ArgumentParser(
        description="predens - predictive density estimation under additional information",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--verbose", action="store_true", help="Log numerical detail (DEBUG level)")

    subparsers = parser.add_subparsers(dest="command", help="Command to run")
    subparsers.required = True

    curve_parser = subparsers.add_parser(
        "risk-curve",
        help="Risks and risk ratios against mre along theta1 - theta2 = Delta",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Kullback-Leibler risks for the order constraint, unit variances
  python -m predens.cli risk-curve --estimators mre,mle,mle:2,bayes-uniform --output fig1.csv

  # Interval constraint, Hellinger loss, Monte Carlo on 4 threads
  python -m predens.cli risk-curve --constraint interval --m 2 --alpha 0 \\
    --estimators mre,mle,bayes-uniform --method mc --workers 4

  # Everything from a config file, seed overridden
  python -m predens.cli risk-curve --config experiment.toml --seed 7
        """,
    )
    _add_spec_arguments(curve_parser)
    curve_parser.add_argument(
        "--estimators",
        default=None,
        help=f"Comma-separated estimator names among {', '.join(ESTIMATOR_NAMES)} (default: mre,mle,mle:2,bayes-uniform)",
    )
    curve_parser.add_argument("--grid-min", type=float, default=None, help="Smallest Delta (default: 0)")
    curve_parser.add_argument("--grid-max", type=float, default=None, help="Largest Delta (default: 5)")
    curve_parser.add_argument("--grid-steps", type=int, default=None, help="Number of Delta values (default: 31)")
    _add_run_arguments(curve_parser)

    figure_parser = subparsers.add_parser(
        "figure",
        help="Reproduce the risk-ratio curves of a preset figure",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Figure 1 (order constraint, unit variances)
  python -m predens.cli figure 1 --output figures/fig1.csv --plot-data figures/fig1_plot.csv

  # Figure 4 by simulation
  python -m predens.cli figure 4 --method mc --mc-samples 100000
        """,
    )
    figure_parser.add_argument("id", type=int, choices=FIGURE_IDS, help="Figure number")
    figure_parser.add_argument("--config", default=None, help="TOML file; only run.* keys are used (optional)")
    _add_run_arguments(figure_parser)

    dominance_parser = subparsers.add_parser(
        "dominance",
        help="Variance expansion report, dual-loss parameters and persistence verdicts",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Expansion intervals of the mle plug-in, order constraint, unit variances
  python -m predens.cli dominance

  # Persistence of the Bayes density under two misspecification schemes
  python -m predens.cli dominance --scheme 2,1,1 --scheme 1,1,4 --output report.txt
        """,
    )
    _add_spec_arguments(dominance_parser)
    dominance_parser.add_argument(
        "--psi",
        choices=["mle", "identity", "bayes"],
        default="mle",
        help="Estimator of mu1 in W2 + psi(W1) (default: mle)",
    )
    dominance_parser.add_argument("--alphas", type=_floats, default=None, help="alpha values for gamma0 (default: -0.5,0,0.5)")
    dominance_parser.add_argument("--c", type=float, default=None, help="Expansion factor for gamma0 (default: 1.5)")
    dominance_parser.add_argument(
        "--scheme", type=_scheme, action="append", default=None, help="Misspecification a1_sq,a2_sq,aY_sq (repeatable)"
    )
    dominance_parser.add_argument("--mc-samples", type=int, default=None, help="Draws per grid point for numeric R bounds (default: 100000)")
    dominance_parser.add_argument("--seed", type=int, default=None, help=f"Random seed (default: {DEFAULT_SEED})")
    dominance_parser.add_argument("--output", default=None, help="Report file (default: stdout)")

    density_parser = subparsers.add_parser(
        "density-eval",
        help="Tabulate a predictive density on a grid of y values",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Bayes density for the order constraint at x1 = 0.5, x2 = 0
  python -m predens.cli density-eval --estimator bayes-uniform --x1 0.5 --x2 0 --output density.csv
        """,
    )
    _add_spec_arguments(density_parser)
    density_parser.add_argument("--estimator", required=True, help=f"One of {', '.join(ESTIMATOR_NAMES)}")
    density_parser.add_argument("--x1", type=_floats, required=True, help="Observed X1 (comma-separated for p > 1)")
    density_parser.add_argument("--x2", type=_floats, required=True, help="Observed X2 (comma-separated for p > 1)")
    density_parser.add_argument("--y-min", type=float, default=-5.0, help="Smallest y1 (first coordinate) (default: -5)")
    density_parser.add_argument("--y-max", type=float, default=5.0, help="Largest y1 (first coordinate) (default: 5)")
    density_parser.add_argument("--y-steps", type=int, default=101, help="Number of y values (default: 101)")
    density_parser.add_argument("--output", default=None, help="Output CSV path (default: stdout)")

    verify_parser = subparsers.add_parser(
        "verify",
        help="Run the numerical verification suite",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m predens.cli verify
  python -m predens.cli verify --level full --seed 11
        """,
    )
    verify_parser.add_argument("--level", choices=LEVELS, default="fast", help="fast: quadrature checks, full: adds Monte Carlo (default: fast)")
    verify_parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"Base seed (default: {DEFAULT_SEED})")
    verify_parser.add_argument("--output", default=None, help="Summary file (optional)")

    return parser.parse_args(argv)


def _single(values: Optional[List[float]]):
    if values is None:
        return None
    return values[0] if len(values) == 1 else values


def _spec_overrides(args) -> Dict[str, Any]:
    return {
        "spec.p": args.p,
        "spec.sigma1_sq": args.sigma1_sq,
        "spec.sigma2_sq": args.sigma2_sq,
        "spec.sigmaY_sq": args.sigmaY_sq,
        "spec.constraint": args.constraint,
        "spec.m": _single(args.m),
        "spec.lower": _single(args.lower),
        "loss.alpha": args.alpha,
        "misspec.a1_sq": args.a1_sq,
        "misspec.a2_sq": args.a2_sq,
        "misspec.aY_sq": args.aY_sq,
    }


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {output}")


def _write_rows(rows, output: Optional[str], plot_data: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(format_curve_csv(rows))
    else:
        write_curve_csv(rows, output)
    if plot_data:
        write_plot_data(rows, plot_data)


def handle_risk_curve_command(args) -> None:
    """Handle the risk-curve subcommand."""
    overrides = _spec_overrides(args)
    overrides.update(
        {
            "run.estimators": args.estimators,
            "run.method": args.method,
            "run.mc_samples": args.mc_samples,
            "run.seed": args.seed,
            "run.workers": args.workers,
            "run.output": args.output,
            "grid.min": args.grid_min,
            "grid.max": args.grid_max,
            "grid.steps": args.grid_steps,
        }
    )
    config: ExperimentConfig = load_config(args.config, overrides)
    logger.info(f"Estimators: {', '.join(config.estimators)}")
    logger.info(f"Constraint: {config.spec.constraint.describe()}, loss {config.loss.label}")
    rows = risk_curve(config, progress=args.progress)
    _write_rows(rows, config.output, args.plot_data)
    logger.info(f"Risk curve completed: {len(rows)} rows")


def handle_figure_command(args) -> None:
    """Handle the figure subcommand."""
    values = read_config_file(args.config) if args.config else {}

    def pick(flag, key):
        return flag if flag is not None else values.get(key)

    method = pick(args.method, "run.method") or "quadrature"
    output = pick(args.output, "run.output")
    logger.info(f"Figure {args.id}, method {method}")
    rows = run_figure(
        args.id,
        method=method,
        mc_samples=pick(args.mc_samples, "run.mc_samples"),
        seed=pick(args.seed, "run.seed"),
        workers=pick(args.workers, "run.workers"),
        progress=args.progress,
    )
    _write_rows(rows, output, args.plot_data)
    logger.info(f"Figure {args.id} completed: {len(rows)} rows")


def _psi_for(name: str, spec):
    if name == "mle":
        return None
    if name == "identity":
        return identity_psi

    def psi(w1):
        return psi_uniform(w1, spec.var_w1, spec.constraint, 1.0 + spec.r)

    return psi


def _fmt(value: float) -> str:
    return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"


def build_dominance_report(config: ExperimentConfig, psi_name: str = "mle") -> str:
    """Key-value text of the dominance command."""
    spec = config.spec
    settings = config.dominance
    lines = [
        f"spec = p {spec.p}, sigma1_sq {_fmt(spec.sigma1_sq)}, sigma2_sq {_fmt(spec.sigma2_sq)}, "
        f"sigmaY_sq {_fmt(spec.sigmaY_sq)}, A {spec.constraint.describe()}",
        f"psi = {psi_name}",
    ]
    report = expansion_report(spec, _psi_for(psi_name, spec), n=config.mc_samples, seed=config.seed)
    lines.append(report.to_text())

    for alpha in settings.alphas:
        entry = f"alpha = {alpha:g}: sigma_z1_sq = {_fmt(sigma_z1(alpha, settings.c, spec))}"
        if abs(alpha) < 1.0:
            entry += (
                f", gamma0 = {_fmt(gamma0(alpha, settings.c, spec))}"
                f", dual_scale = {_fmt(dual_reflected_scale(alpha, settings.c, spec))}"
            )
        lines.append(f"{entry} (c = {settings.c:g})")

    schemes = list(settings.schemes)
    if spec.misspec is not None:
        schemes.append(spec.misspec)
    if schemes:
        A = spec.constraint
        if spec.p == 1 and isinstance(A, HalfLineProduct) and A.is_order:
            for a in schemes:
                verdict = persistence_check(spec, a)
                lines.append(f"persistence ({a.a1_sq:g}, {a.a2_sq:g}, {a.aY_sq:g}) = {verdict.to_text()}")
        else:
            logger.warning(f"Persistence verdicts need p = 1 and an order constraint, got {A.describe()}; skipped")
    return "\n".join(lines) + "\n"


def handle_dominance_command(args) -> None:
    """Handle the dominance subcommand."""
    overrides = _spec_overrides(args)
    overrides.update(
        {
            "dominance.alphas": args.alphas,
            "dominance.c": args.c,
            "dominance.schemes": args.scheme,
            "run.mc_samples": args.mc_samples,
            "run.seed": args.seed,
        }
    )
    config = load_config(args.config, overrides)
    logger.info(f"Dominance report for {config.spec.constraint.describe()}")
    _emit(build_dominance_report(config, args.psi), args.output)


def handle_density_eval_command(args) -> None:
    """Handle the density-eval subcommand."""
    if args.y_steps < 2:
        raise ValueError(f"--y-steps must be >= 2, got {args.y_steps}")
    config = load_config(args.config, _spec_overrides(args))
    spec = config.spec
    estimator = make_estimator(args.estimator, spec, config.loss)
    qhat = estimator(np.asarray(args.x1), np.asarray(args.x2))
    ys = np.linspace(args.y_min, args.y_max, args.y_steps)
    points = np.tile(qhat.center.reshape(1, spec.p), (args.y_steps, 1))
    points[:, 0] = ys
    values = np.atleast_1d(qhat.density(points))
    lines = ["y,density"] + [f"{_fmt(y)},{_fmt(v)}" for y, v in zip(ys, values)]
    logger.info(f"Tabulated {qhat.kind} density on {args.y_steps} points")
    _emit("\n".join(lines) + "\n", args.output)


def handle_verify_command(args) -> bool:
    """Handle the verify subcommand; returns whether every check passed."""
    summary = run_verification(args.level, args.seed)
    text = summary.to_text() + "\n"
    if args.output:
        _emit(text, args.output)
    else:
        sys.stdout.write(text)
    return summary.passed


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point for the CLI."""
    try:
        try:
            args = parse_args(argv)
        except SystemExit as e:
            # argparse exits with 2 on usage errors; 2 is reserved for failed verification
            if e.code not in (0, None):
                sys.exit(EXIT_VALIDATION_ERROR)
            raise
        if args.verbose:
            logging.getLogger().setLevel(logging.DEBUG)

        if args.command == "risk-curve":
            handle_risk_curve_command(args)
        elif args.command == "figure":
            handle_figure_command(args)
        elif args.command == "dominance":
            handle_dominance_command(args)
        elif args.command == "density-eval":
            handle_density_eval_command(args)
        elif args.command == "verify":
            if not handle_verify_command(args):
                logger.error("Verification failed")
                sys.exit(EXIT_VERIFICATION_FAILED)
        else:
            logger.error(f"Unknown command: {args.command}")
            sys.exit(EXIT_VALIDATION_ERROR)

    except KeyboardInterrupt:
        logger.info("\nInterrupted by user")
        sys.exit(EXIT_VALIDATION_ERROR)
    except (ConfigError, ValueError, FileNotFoundError) as e:
        logger.error(f"ERROR: {e}")
        sys.exit(EXIT_VALIDATION_ERROR)
    except Exception as e:
        logger.error(f"ERROR: {repr(e)}", exc_info=True)
        sys.exit(EXIT_VALIDATION_ERROR)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
