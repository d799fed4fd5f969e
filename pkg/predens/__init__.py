"""
predens - predictive density estimation with additional information.

Predictive densities for Y1 ~ N_p(theta1, sigmaY_sq I) from X1 and X2 when
theta1 - theta2 is known to lie in a set A, with their frequentist risks
under Kullback-Leibler and alpha-divergence losses.
"""

__version__ = "0.1.0"

__all__ = [
    "ProblemSpec",
    "MisspecScheme",
    "HalfLineProduct",
    "Interval",
    "Rectangle",
    "Ball",
    "unconstrained",
    "LossSpec",
    "PredictiveDensity",
    "make_estimator",
    "ThetaPoint",
    "RiskEstimate",
    "risk_mc",
    "expansion_report",
    "persistence_check",
    "ExperimentConfig",
    "ConfigError",
    "load_config",
    "risk_curve",
    "run_figure",
    "run_verification",
]

from predens.model import Ball, HalfLineProduct, Interval, MisspecScheme, ProblemSpec, Rectangle, unconstrained
from predens.estimators import LossSpec, PredictiveDensity, make_estimator
from predens.risk import RiskEstimate, ThetaPoint, risk_mc
from predens.dominance import expansion_report, persistence_check
from predens.experiment import ConfigError, ExperimentConfig, load_config
from predens.curves import risk_curve, run_figure
from predens.verify import run_verification
