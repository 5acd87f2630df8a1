"""Weibull Birnbaum-Saunders lifetime distribution toolkit.

Exact evaluation, simulation, series-expansion diagnostics,
maximum-likelihood fitting with analytic derivatives, and
goodness-of-fit comparison against related BS-family models.
"""

from .bs import BsParams, bs_cdf, bs_fractional_moment, bs_pdf, bs_quantile, bs_v
from .errors import DataError, DomainError, NonConvergenceError, OverflowSignal
from .gof import GofReport, TttCurve, empirical_cdf, info_criteria, ks_test, ttt
from .mle import FitOptions, FitResult, Sample, confint, fit, loglik, score
from .series import EbsParams, SeriesTruncation
from .wbs import (
    RngSeed,
    WbsParams,
    wbs_cdf,
    wbs_hazard,
    wbs_pdf,
    wbs_quantile,
    wbs_sample,
    wbs_sf,
)

__version__ = "0.1.0"

__all__ = [
    "BsParams",
    "WbsParams",
    "EbsParams",
    "SeriesTruncation",
    "RngSeed",
    "Sample",
    "FitOptions",
    "FitResult",
    "GofReport",
    "TttCurve",
    "DomainError",
    "DataError",
    "NonConvergenceError",
    "OverflowSignal",
    "bs_v",
    "bs_cdf",
    "bs_pdf",
    "bs_quantile",
    "bs_fractional_moment",
    "wbs_cdf",
    "wbs_pdf",
    "wbs_sf",
    "wbs_hazard",
    "wbs_quantile",
    "wbs_sample",
    "loglik",
    "score",
    "fit",
    "confint",
    "info_criteria",
    "ks_test",
    "ttt",
    "empirical_cdf",
    "__version__",
]
