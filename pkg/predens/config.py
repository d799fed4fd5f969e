"""
Configuration constants for predens.

This module centralizes the numerical defaults, tolerances and output
settings used across the package, so that accuracy targets live in one place.
"""

from typing import Tuple

# Quadrature defaults
QUADRATURE_ORDERS: Tuple[int, ...] = (64, 128, 256)  # escalation ladder, failure beyond the last
QUADRATURE_TOL = 1e-10  # agreement required between successive orders
LEGENDRE_ORDERS: Tuple[int, ...] = (32, 64, 128, 256)

# Normal tail handling
MILLS_LOG_SPACE_BELOW = -8.0  # inverse Mills ratio computed as exp(log phi - log Phi)

# Noncentral chi-square series
POISSON_TAIL_TOL = 1e-14  # stop once the remaining Poisson mass is below this
POISSON_MAX_TERMS = 20000

# Variance expansion root finding
C0_TOL = 1e-12  # |G_s(c0)| target
C0_MAX_ITER = 400

# Monte Carlo defaults
DEFAULT_SEED = 20240101
DEFAULT_MC_SAMPLES = 100_000
MIN_MC_SAMPLES = 100
MC_CHUNK_SIZE = 10_000  # draws per vectorized chunk
LOSS_MC_SAMPLES = 4096  # Y1 draws per density for p > 1 non-Gaussian losses
BALL_NORMALIZER_SAMPLES = 1_000_000
BALL_NORMALIZER_SEED = 7
SAMPLER_BATCH = 4096  # minimum proposal batch for rejection sampling
SAMPLER_MAX_PROPOSALS = 50_000_000
SE_BAND = 3.0  # acceptance band in standard errors

# Risk curve defaults
DEFAULT_DELTA_GRID: Tuple[float, float, int] = (0.0, 5.0, 31)  # min, max, steps
DEFAULT_ESTIMATORS: Tuple[str, ...] = ("mre", "mle", "mle:2", "bayes-uniform")
DEFAULT_WORKERS = 1
R_BOUNDS_GRID_POINTS = 41

# Output format
CSV_HEADER: Tuple[str, ...] = ("delta", "estimator", "risk", "std_error", "ratio_vs_mre")
CSV_SIGNIFICANT_DIGITS = 10

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION_ERROR = 1
EXIT_VERIFICATION_FAILED = 2
