"""Baseline two-parameter Birnbaum-Saunders (BS) fatigue-life distribution.

CDF is Phi(v) with v = (sqrt(t/beta) - sqrt(beta/t)) / alpha; the scale
beta is the median.  The normalising constant of the density is kept in
log space so that small alpha (where exp(alpha^-2) overflows) stays
representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sc

from .errors import DomainError, OverflowSignal

__all__ = [
    "BsParams",
    "bs_v",
    "bs_cdf",
    "bs_pdf",
    "bs_log_pdf",
    "bs_quantile",
    "bs_fractional_moment",
]


@dataclass(frozen=True)
class BsParams:
    """Shape alpha > 0 and scale beta > 0 (time units)."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0.0):
                raise DomainError(f"BsParams.{name} must be finite and > 0, got {val}")


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0.0):
        raise DomainError("lifetime t must be finite and > 0")
    return t


def _as_scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def bs_v(t, p: BsParams):
    """Standardised argument v = (sqrt(t/beta) - sqrt(beta/t)) / alpha."""
    t = _check_t(t)
    s = np.sqrt(t / p.beta)
    return _as_scalar((s - 1.0 / s) / p.alpha)


def bs_cdf(t, p: BsParams):
    """BS distribution function Phi(v)."""
    return _as_scalar(sc.ndtr(bs_v(t, p)))


def bs_log_pdf(t, p: BsParams):
    """log of the BS density, stable for extreme alpha and t."""
    t = _check_t(t)
    log_kappa = (
        p.alpha**-2.0
        - math.log(2.0 * p.alpha)
        - 0.5 * math.log(2.0 * math.pi * p.beta)
    )
    z = t / p.beta
    return _as_scalar(
        log_kappa
        - 1.5 * np.log(t)
        + np.log(t + p.beta)
        - (z + 1.0 / z) / (2.0 * p.alpha**2)
    )


def bs_pdf(t, p: BsParams):
    """BS density."""
    return _as_scalar(np.exp(bs_log_pdf(t, p)))


def _quantile_from_normal(x, beta: float):
    """Map x = alpha * Phi^-1(u) to the BS quantile (beta/4)(x + sqrt(x^2+4))^2.

    The x < 0 branch is rewritten as 4/(sqrt(x^2+4) - x) to avoid
    cancellation in the lower tail.
    """
    x = np.asarray(x, dtype=float)
    root = np.sqrt(x * x + 4.0)
    y = np.where(x >= 0.0, x + root, 4.0 / (root - x))
    return 0.25 * beta * y * y


def bs_quantile(u, p: BsParams):
    """Inverse of :func:`bs_cdf` on (0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)) or np.any(u <= 0.0) or np.any(u >= 1.0):
        raise DomainError("bs_quantile requires 0 < u < 1")
    return _as_scalar(_quantile_from_normal(p.alpha * sc.ndtri(u), p.beta))


def bs_fractional_moment(k: float, p: BsParams) -> float:
    """E(T^k) = beta^k (K_{k+1/2}(z) + K_{k-1/2}(z)) / (2 K_{1/2}(z)), z = alpha^-2.

    Uses the exponentially scaled Bessel kve so the e^{-z} factors cancel
    exactly; valid for any real k.
    """
    z = p.alpha**-2.0
    if not np.isfinite(z):
        raise OverflowSignal(f"alpha = {p.alpha} is too extreme for the moment formula")
    ratio = (sc.kve(k + 0.5, z) + sc.kve(k - 0.5, z)) / (2.0 * sc.kve(0.5, z))
    out = p.beta**k * ratio
    if not np.isfinite(out):
        raise OverflowSignal(
            f"fractional moment of order {k} overflows at alpha={p.alpha}, beta={p.beta}"
        )
    return float(out)
