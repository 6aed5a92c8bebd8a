"""Exact and asymptotic analysis of balanced additive two-color urns.

The model: an urn holding black and white balls evolves by drawing a ball
uniformly, returning it, and adding 2*alpha black + beta white (black draw)
or alpha black + (alpha+beta) white (white draw).  This package computes the
exact distribution of the black-ball count by dynamic programming over
histories, checks the algebraic equation satisfied by the counting series,
extracts coefficients by numerical contour integration, and measures the
convergence rates of the Gaussian, local, and large-deviation limit laws.
"""

from ._threads import set_thread_cap, thread_cap
from .asymptotics import (
    LimitParams,
    RateFunction,
    empirical_tail_exponent,
    error_ladder,
    gaussian_cdf_error,
    limit_params,
    local_limit_error,
    mean_correction_coefficient,
    mean_variance_expansion,
    quasi_power_modulus,
    quasi_power_pn,
    rate_function_closed_form,
    rate_function_eval,
)
from .errors import (
    CapacityExceeded,
    ContourCrossesPole,
    EmptyTail,
    EmptyUrn,
    NonPositiveParameter,
    OracleTooLarge,
    OrderExceedsTable,
    OutOfInterval,
    PoleHit,
    QuadratureNotConverged,
    RowMissing,
    UnsupportedInitialConfig,
    UrnlabError,
)
from .histories import (
    ExactDistribution,
    HistoryTable,
    LogHistoryTable,
    brute_force_histories,
    build_history_table,
    build_log_table,
    exact_distribution,
    exact_moments,
    total_histories,
)
from .montecarlo import SimulationRun, simulate
from .saddle import (
    ContourResult,
    ContourSpec,
    Integrand,
    SaddleSet,
    auto_contour,
    coefficient_auto,
    contour_coefficient,
    contour_samples,
    eval_integrand,
    find_saddle_points,
    hx_power_residual,
    integrand_poles,
    power_residual_scale,
    sector_validity,
)
from .series import (
    AlgebraicEquation,
    TruncatedSeries,
    algebraic_residual,
    closed_form_x1_coefficient,
    series_from_table,
    x1_asymptotic_ratio,
)
from .urn import UrnSpec, validate_urn

__version__ = "0.1.0"

__all__ = [
    "AlgebraicEquation",
    "CapacityExceeded",
    "ContourCrossesPole",
    "ContourResult",
    "ContourSpec",
    "EmptyTail",
    "EmptyUrn",
    "ExactDistribution",
    "HistoryTable",
    "Integrand",
    "LimitParams",
    "LogHistoryTable",
    "NonPositiveParameter",
    "OracleTooLarge",
    "OrderExceedsTable",
    "OutOfInterval",
    "PoleHit",
    "QuadratureNotConverged",
    "RateFunction",
    "RowMissing",
    "SaddleSet",
    "SimulationRun",
    "TruncatedSeries",
    "UnsupportedInitialConfig",
    "UrnSpec",
    "UrnlabError",
    "algebraic_residual",
    "auto_contour",
    "brute_force_histories",
    "build_history_table",
    "build_log_table",
    "closed_form_x1_coefficient",
    "coefficient_auto",
    "contour_coefficient",
    "contour_samples",
    "empirical_tail_exponent",
    "error_ladder",
    "eval_integrand",
    "exact_distribution",
    "exact_moments",
    "find_saddle_points",
    "gaussian_cdf_error",
    "hx_power_residual",
    "integrand_poles",
    "limit_params",
    "local_limit_error",
    "mean_correction_coefficient",
    "mean_variance_expansion",
    "power_residual_scale",
    "quasi_power_modulus",
    "quasi_power_pn",
    "rate_function_closed_form",
    "rate_function_eval",
    "sector_validity",
    "series_from_table",
    "set_thread_cap",
    "simulate",
    "thread_cap",
    "total_histories",
    "validate_urn",
    "x1_asymptotic_ratio",
]
