"""Model-selection statistics and diagnostic transforms.

Information criteria, the two-sided Kolmogorov-Smirnov statistic with
its asymptotic p-value, the empirical CDF, and the scaled total time on
test (TTT) transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError
from .mle import Sample

__all__ = [
    "GofReport",
    "TttCurve",
    "EmpiricalCdf",
    "info_criteria",
    "ks_test",
    "ttt",
    "empirical_cdf",
    "build_report",
]


@dataclass(frozen=True)
class GofReport:
    """Fit-quality statistics for one fitted model."""

    neg2loglik: float
    aic: float
    bic: float
    caic: float
    ks_stat: float
    ks_pvalue: float
    k_params: int
    n_obs: int


@dataclass(frozen=True)
class TttCurve:
    """Scaled total-time-on-test curve: points (i/n, T_i/T_n), i = 0..n."""

    points: tuple[tuple[float, float], ...]

    @property
    def abscissae(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def ordinates(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def info_criteria(neg2ll: float, k: int, n: int) -> tuple[float, float, float]:
    """AIC, BIC and CAIC from -2 * max log-likelihood, k parameters, n observations."""
    if n <= k + 1:
        raise DomainError("CAIC requires n > k + 1")
    aic = neg2ll + 2.0 * k
    bic = neg2ll + k * math.log(n)
    caic = neg2ll + 2.0 * k * n / (n - k - 1.0)
    return aic, bic, caic


def _kolmogorov_pvalue(d: float, n: int) -> float:
    """Asymptotic two-sided K-S p-value 2 sum (-1)^{j-1} exp(-2 j^2 n d^2)."""
    lam2 = n * d * d
    total = 0.0
    for j in range(1, 1000):
        term = math.exp(-2.0 * j * j * lam2)
        total += term if j % 2 == 1 else -term
        if term < 1e-12:
            break
    return min(max(2.0 * total, 0.0), 1.0)


def ks_test(s: Sample, cdf) -> tuple[float, float]:
    """Two-sided K-S statistic of the sample against a fitted CDF, with p-value.

    ``cdf`` is called on the ascending sample (vectorized call attempted
    first, scalar fallback otherwise) and must be nondecreasing there.
    """
    ts = s.sorted_values
    try:
        f = np.asarray(cdf(ts), dtype=float)
        if f.shape != ts.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.array([float(cdf(t)) for t in ts])
    if np.any(np.isnan(f)) or np.any(f < -1e-12) or np.any(f > 1.0 + 1e-12):
        raise DataError("cdf returned values outside [0, 1]")
    if np.any(np.diff(f) < -1e-12):
        raise DataError("cdf is not monotone on the sample range")
    n = s.n
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - f)), float(np.max(f - (i - 1) / n)))
    d = min(max(d, 0.0), 1.0)
    return d, _kolmogorov_pvalue(d, n)


def ttt(s: Sample) -> TttCurve:
    """Scaled TTT transform; convexity/concavity diagnoses the hazard shape."""
    if s.n < 2:
        raise DataError("TTT transform requires at least 2 observations")
    ts = s.sorted_values
    n = s.n
    csum = np.cumsum(ts)
    total = csum[-1]
    i = np.arange(1, n + 1)
    ordinates = (csum + (n - i) * ts) / total
    points = [(0.0, 0.0)] + [
        (float(ii) / n, float(o)) for ii, o in zip(i, ordinates)
    ]
    return TttCurve(points=tuple(points))


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous staircase i/n at the i-th order statistic."""

    sorted_values: np.ndarray

    def __call__(self, t):
        n = len(self.sorted_values)
        idx = np.searchsorted(self.sorted_values, np.asarray(t, dtype=float), side="right")
        out = idx / n
        return float(out) if np.ndim(t) == 0 else out


def empirical_cdf(s: Sample) -> EmpiricalCdf:
    return EmpiricalCdf(sorted_values=s.sorted_values)


def build_report(neg2ll: float, k: int, n: int, s: Sample, cdf) -> GofReport:
    """Assemble a GofReport for one fitted model."""
    aic, bic, caic = info_criteria(neg2ll, k, n)
    d, pval = ks_test(s, cdf)
    return GofReport(
        neg2loglik=neg2ll,
        aic=aic,
        bic=bic,
        caic=caic,
        ks_stat=d,
        ks_pvalue=pval,
        k_params=k,
        n_obs=n,
    )
