"""
Experiment Configuration Module.

Experiment settings for risk curves and dominance reports, loaded from TOML
files with dotted keys (spec.sigma1_sq = 1.0, grid.steps = 31, ...) and
overridden by command-line flags, plus the figure presets 1-4.
"""

import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from predens.config import DEFAULT_DELTA_GRID, DEFAULT_ESTIMATORS, DEFAULT_MC_SAMPLES, DEFAULT_SEED, DEFAULT_WORKERS
from predens.estimators import LossSpec
from predens.model import (
    Ball,
    ConstraintSet,
    HalfLineProduct,
    Interval,
    MisspecScheme,
    ProblemSpec,
    Rectangle,
    unconstrained,
)

__all__ = [
    "ConfigError",
    "DeltaGrid",
    "DominanceSettings",
    "ExperimentConfig",
    "FIGURE_IDS",
    "METHODS",
    "build_config",
    "figure_configs",
    "flatten",
    "load_config",
    "read_config_file",
]

logger = logging.getLogger("predens.experiment")

METHODS = ("quadrature", "mc")
CONSTRAINT_KINDS = ("order", "interval", "rectangle", "ball", "none")
FIGURE_IDS = (1, 2, 3, 4)
MIN_CURVE_MC_SAMPLES = 1000

KNOWN_KEYS = (
    "spec.p",
    "spec.sigma1_sq",
    "spec.sigma2_sq",
    "spec.sigmaY_sq",
    "spec.constraint",
    "spec.m",
    "spec.lower",
    "loss.alpha",
    "run.estimators",
    "run.method",
    "run.mc_samples",
    "run.seed",
    "run.workers",
    "run.output",
    "grid.min",
    "grid.max",
    "grid.steps",
    "misspec.a1_sq",
    "misspec.a2_sq",
    "misspec.aY_sq",
    "dominance.alphas",
    "dominance.c",
    "dominance.schemes",
)


class ConfigError(ValueError):
    """Invalid experiment setting; the message starts with the dotted key path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class DeltaGrid:
    """Equally spaced Delta = theta1 - theta2 values, steps >= 2 points."""
    min: float = DEFAULT_DELTA_GRID[0]
    max: float = DEFAULT_DELTA_GRID[1]
    steps: int = DEFAULT_DELTA_GRID[2]

    def __post_init__(self):
        if isinstance(self.steps, bool) or int(self.steps) != self.steps or self.steps < 2:
            raise ConfigError("grid.steps", f"must be an integer >= 2, got {self.steps!r}")
        if not (math.isfinite(self.min) and math.isfinite(self.max) and self.max > self.min):
            raise ConfigError("grid.max", f"must exceed grid.min, got [{self.min}, {self.max}]")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, int(self.steps))


@dataclass(frozen=True)
class DominanceSettings:
    """Inputs of the dominance report beyond the problem spec."""
    alphas: Tuple[float, ...] = (-0.5, 0.0, 0.5)
    c: float = 1.5
    schemes: Tuple[MisspecScheme, ...] = ()


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One risk-curve or dominance experiment.

    Attributes:
        spec: Problem specification (its misspec drives data simulation)
        loss: Loss
        estimators: Estimator names (mre, mle, mle:<c>, plugin:<c>, bayes-uniform, bayes-rkl, two-step)
        delta_grid: Delta values; theta1 = Delta e1, theta2 = 0
        method: "quadrature" (Monte Carlo fallback where unavailable) or "mc"
        mc_samples: Draws per grid point for Monte Carlo
        seed: Base seed; grid point i uses seed + i
        workers: Threads evaluating grid points
        output: CSV path, or None for stdout
        dominance: Dominance report settings
        tag: Label appended to estimator names in combined outputs
    """
    spec: ProblemSpec = field(default_factory=ProblemSpec)
    loss: LossSpec = field(default_factory=LossSpec.kl)
    estimators: Tuple[str, ...] = DEFAULT_ESTIMATORS
    delta_grid: DeltaGrid = field(default_factory=DeltaGrid)
    method: str = "quadrature"
    mc_samples: int = DEFAULT_MC_SAMPLES
    seed: int = DEFAULT_SEED
    workers: int = DEFAULT_WORKERS
    output: Optional[str] = None
    dominance: DominanceSettings = field(default_factory=DominanceSettings)
    tag: str = ""

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError("run.method", f"must be one of {', '.join(METHODS)}, got {self.method!r}")
        if self.method == "mc" and self.mc_samples < MIN_CURVE_MC_SAMPLES:
            raise ConfigError("run.mc_samples", f"must be >= {MIN_CURVE_MC_SAMPLES} for method mc, got {self.mc_samples}")
        if self.workers < 1:
            raise ConfigError("run.workers", f"must be >= 1, got {self.workers}")
        if not self.estimators:
            raise ConfigError("run.estimators", "must name at least one estimator")

    @property
    def misspec(self) -> Optional[MisspecScheme]:
        return self.spec.misspec

    def with_changes(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


def flatten(document: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Nested TOML tables to dotted keys."""
    flat: Dict[str, Any] = {}
    for key, value in document.items():
        path = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten(value, f"{path}."))
        else:
            flat[path] = value
    return flat


def read_config_file(path) -> Dict[str, Any]:
    """
    Read a TOML experiment file into a flat dotted-key dict.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: On TOML syntax errors (parser line/column kept) or unknown keys
    """
    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    try:
        with open(config_path, "rb") as f:
            document = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(str(path), f"invalid TOML ({e})") from e
    flat = flatten(document)
    for key in flat:
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
    logger.debug(f"Read {len(flat)} settings from {path}")
    return flat


def _number(values: Mapping[str, Any], key: str, default: Optional[float] = None) -> Optional[float]:
    value = values.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"must be a number, got {value!r}")
    return float(value)


def _integer(values: Mapping[str, Any], key: str, default: int) -> int:
    value = values.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(key, f"must be an integer, got {value!r}")
    return value


def _numbers(values: Mapping[str, Any], key: str, default) -> Tuple[float, ...]:
    value = values.get(key, default)
    items = value if isinstance(value, (list, tuple)) else [value]
    if not items or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in items):
        raise ConfigError(key, f"must be a number or a list of numbers, got {value!r}")
    return tuple(float(v) for v in items)


def _constraint(values: Mapping[str, Any], p: int) -> ConstraintSet:
    kind = values.get("spec.constraint", "order")
    if kind not in CONSTRAINT_KINDS:
        raise ConfigError("spec.constraint", f"must be one of {', '.join(CONSTRAINT_KINDS)}, got {kind!r}")
    try:
        if kind == "none":
            return unconstrained(p)
        if kind == "order":
            lower = _numbers(values, "spec.lower", 0.0)
            return HalfLineProduct(lower * p if len(lower) == 1 else lower)
        if kind == "interval":
            if p != 1:
                raise ConfigError("spec.constraint", f"interval needs spec.p = 1, got {p}")
            return Interval(_number(values, "spec.m", 1.0))
        if kind == "rectangle":
            m = _numbers(values, "spec.m", 1.0)
            return Rectangle(m * p if len(m) == 1 else m)
        return Ball(_number(values, "spec.m", 1.0), p)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("spec.m" if kind != "order" else "spec.lower", str(e)) from e


def _misspec(values: Mapping[str, Any]) -> Optional[MisspecScheme]:
    keys = ("misspec.a1_sq", "misspec.a2_sq", "misspec.aY_sq")
    if not any(k in values for k in keys):
        return None
    try:
        return MisspecScheme(*(_number(values, k, 1.0) for k in keys))
    except ValueError as e:
        raise ConfigError("misspec", str(e)) from e


def _schemes(values: Mapping[str, Any]) -> Tuple[MisspecScheme, ...]:
    raw = values.get("dominance.schemes", [])
    if not isinstance(raw, list):
        raise ConfigError("dominance.schemes", f"must be a list of [a1_sq, a2_sq, aY_sq] triples, got {raw!r}")
    schemes = []
    for i, triple in enumerate(raw):
        path = f"dominance.schemes[{i}]"
        if not isinstance(triple, list) or len(triple) != 3:
            raise ConfigError(path, f"must be [a1_sq, a2_sq, aY_sq], got {triple!r}")
        try:
            schemes.append(MisspecScheme(*(float(v) for v in triple)))
        except (TypeError, ValueError) as e:
            raise ConfigError(path, str(e)) from e
    return tuple(schemes)


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    """
    Build an ExperimentConfig from flat dotted-key settings.

    Raises:
        ConfigError: With the dotted path of the first invalid setting
    """
    p = _integer(values, "spec.p", 1)
    if p < 1:
        raise ConfigError("spec.p", f"must be >= 1, got {p}")
    constraint = _constraint(values, p)
    variances = {}
    for name in ("sigma1_sq", "sigma2_sq", "sigmaY_sq"):
        key = f"spec.{name}"
        variances[name] = _number(values, key, 1.0)
        if not variances[name] > 0:
            raise ConfigError(key, f"must be > 0, got {variances[name]}")
    spec = ProblemSpec(p=p, constraint=constraint, misspec=_misspec(values), **variances)

    try:
        loss = LossSpec(_number(values, "loss.alpha", -1.0))
    except ValueError as e:
        raise ConfigError("loss.alpha", str(e)) from e

    names = values.get("run.estimators", list(DEFAULT_ESTIMATORS))
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    if not isinstance(names, (list, tuple)) or not all(isinstance(n, str) for n in names):
        raise ConfigError("run.estimators", f"must be a list of names, got {names!r}")

    output = values.get("run.output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("run.output", f"must be a path string, got {output!r}")

    grid = DeltaGrid(
        _number(values, "grid.min", DEFAULT_DELTA_GRID[0]),
        _number(values, "grid.max", DEFAULT_DELTA_GRID[1]),
        _integer(values, "grid.steps", DEFAULT_DELTA_GRID[2]),
    )
    dominance = DominanceSettings(
        alphas=_numbers(values, "dominance.alphas", list(DominanceSettings.alphas)),
        c=_number(values, "dominance.c", DominanceSettings.c),
        schemes=_schemes(values),
    )
    if not dominance.c > 0:
        raise ConfigError("dominance.c", f"must be > 0, got {dominance.c}")
    return ExperimentConfig(
        spec=spec,
        loss=loss,
        estimators=tuple(names),
        delta_grid=grid,
        method=values.get("run.method", "quadrature"),
        mc_samples=_integer(values, "run.mc_samples", DEFAULT_MC_SAMPLES),
        seed=_integer(values, "run.seed", DEFAULT_SEED),
        workers=_integer(values, "run.workers", DEFAULT_WORKERS),
        output=output,
        dominance=dominance,
    )


def load_config(path=None, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Load an experiment from an optional TOML file with flag overrides.

    Args:
        path: TOML file, or None for defaults
        overrides: Dotted-key values from command-line flags; None values are ignored
    """
    values: Dict[str, Any] = read_config_file(path) if path else {}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        values[key] = value
    return build_config(values)


def figure_configs(
    figure_id: int,
    method: str = "quadrature",
    mc_samples: int = DEFAULT_MC_SAMPLES,
    seed: int = DEFAULT_SEED,
    workers: int = DEFAULT_WORKERS,
) -> List[ExperimentConfig]:
    """
    Preset experiments of figures 1-4 (KL loss, p = 1, sigma1_sq = sigmaY_sq = 1).

    1: A = [0, inf), sigma2_sq = 1, Delta in [0, 5]
    2: A = [0, inf), sigma2_sq in {1, 2, 4} (tagged sigma2_sq=<v>)
    3, 4: A = [-m, m] with m = 1, 2, Delta in [-1.5 m, 1.5 m]

    Raises:
        ConfigError: For an unknown figure id
    """
    if figure_id not in FIGURE_IDS:
        raise ConfigError("figure", f"must be one of {', '.join(map(str, FIGURE_IDS))}, got {figure_id!r}")
    base = ExperimentConfig(method=method, mc_samples=mc_samples, seed=seed, workers=workers)
    if figure_id == 1:
        configs = [base]
    elif figure_id == 2:
        configs = [
            base.with_changes(spec=ProblemSpec(sigma2_sq=s2), tag=f"sigma2_sq={s2:g}")
            for s2 in (1.0, 2.0, 4.0)
        ]
    else:
        m = 1.0 if figure_id == 3 else 2.0
        configs = [
            base.with_changes(spec=ProblemSpec(constraint=Interval(m)), delta_grid=DeltaGrid(-1.5 * m, 1.5 * m, 31))
        ]
    logger.info(f"Figure {figure_id}: {len(configs)} preset experiment(s)")
    return configs
