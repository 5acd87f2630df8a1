"""Mixture-representation machinery and derived quantities.

The WBS density can be expanded as a signed double series of
exponentiated-BS (EBS) densities,

    f(t) = sum_{k,j} w_{k,j} h_{b(k+1)+j}(t),

which is useful for verification but has a limited convergence region in
(a, b, t).  The exact closed forms stay authoritative; every routine
here either certifies its truncation error or raises
NonConvergenceError.  Moments, partial means, order statistics and
stress-strength reliability are computed by adaptive quadrature with
Monte-Carlo cross-checks living in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sc

from ._quad import integrate_lifetime
from .bs import BsParams, _as_scalar, _check_t, bs_log_pdf, bs_pdf
from .errors import DomainError, NonConvergenceError, OverflowSignal
from .specfun import _MAX_LOG
from .wbs import (
    WbsParams,
    _log_weibull_exponent,
    _v_and_tails,
    wbs_cdf,
    wbs_log_pdf,
    wbs_pdf,
    wbs_quantile,
)

__all__ = [
    "EbsParams",
    "SeriesTruncation",
    "ebs_pdf",
    "ebs_cdf",
    "mixture_weight",
    "pdf_series",
    "cdf_series",
    "sr_coefficient",
    "dr_coefficient",
    "moment",
    "moment_summary",
    "pwm",
    "incomplete_first_moment",
    "mean_deviations",
    "bonferroni",
    "lorenz",
    "order_stat_pdf",
    "stress_strength",
]


@dataclass(frozen=True)
class EbsParams:
    """Exponentiated-BS parameters: BS (alpha, beta) plus the CDF power."""

    alpha: float
    beta: float
    power: float

    def __post_init__(self):
        for name in ("alpha", "beta", "power"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0.0):
                raise DomainError(f"EbsParams.{name} must be finite and > 0, got {val}")

    @property
    def bs(self) -> BsParams:
        return BsParams(self.alpha, self.beta)


@dataclass(frozen=True)
class SeriesTruncation:
    """Truncation orders and tolerance for all series evaluations."""

    k_max: int = 25
    j_max: int = 150
    r_max: int = 60
    tol: float = 1e-9

    def __post_init__(self):
        if self.k_max < 1 or self.j_max < 1 or self.r_max < 1:
            raise DomainError("truncation orders must be >= 1")
        if self.tol < 0.0:
            raise DomainError("truncation tolerance must be >= 0")


def ebs_pdf(t, p: EbsParams):
    """EBS density power * g(t) * Phi(v)^(power-1); power=1 is exactly BS."""
    t = _check_t(t)
    phi_v = sc.ndtr((np.sqrt(t / p.beta) - np.sqrt(p.beta / t)) / p.alpha)
    return _as_scalar(p.power * bs_pdf(t, p.bs) * phi_v ** (p.power - 1.0))


def ebs_cdf(t, p: EbsParams):
    """EBS distribution function Phi(v)^power."""
    t = _check_t(t)
    phi_v = sc.ndtr((np.sqrt(t / p.beta) - np.sqrt(p.beta / t)) / p.alpha)
    return _as_scalar(phi_v**p.power)


def mixture_weight(k: int, j: int, a: float, b: float) -> float:
    """Signed weight w_{k,j} of the EBS mixture expansion.

    w_{k,j} = (-1)^k b a^{k+1} Gamma(b(k+1)+1+j)
              / (k! j! (b(k+1)+j) Gamma(b(k+1)+1)),

    evaluated in log space with the sign carried separately.
    """
    if k < 0 or j < 0:
        raise DomainError("mixture_weight requires k, j >= 0")
    if a <= 0.0 or b <= 0.0:
        raise DomainError("mixture_weight requires a, b > 0")
    m0 = b * (k + 1)
    log_mag = (
        math.log(b)
        + (k + 1) * math.log(a)
        + math.lgamma(m0 + 1 + j)
        - math.lgamma(k + 1)
        - math.lgamma(j + 1)
        - math.log(m0 + j)
        - math.lgamma(m0 + 1)
    )
    if log_mag > _MAX_LOG:
        raise OverflowSignal(f"mixture_weight({k}, {j}) overflows: log|w| = {log_mag:.1f}")
    return (-1.0) ** k * math.exp(log_mag)


def _mixture_series(t: float, p: WbsParams, tr: SeriesTruncation, kind: str) -> float:
    """Shared engine for the truncated EBS mixture of the pdf or cdf.

    The inner j-sum (all positive terms, asymptotic ratio Phi(v)) is
    certified by a geometric tail bound; the outer k-sum stops after
    three successive partial-sum deltas below tolerance.
    """
    t = float(t)
    _, lp, _ = _v_and_tails(t, p)
    log_g = bs_log_pdf(t, p.bs) if kind == "pdf" else 0.0
    js = np.arange(tr.j_max + 1, dtype=float)
    lgamma_j = sc.gammaln(js + 1.0)

    total = 0.0
    tail_budget = 0.0
    small_run = 0
    for k in range(tr.k_max + 1):
        m0 = p.b * (k + 1)
        base = (
            math.log(p.b)
            + (k + 1) * math.log(p.a)
            - math.lgamma(k + 1)
            - math.lgamma(m0 + 1)
        )
        if kind == "pdf":
            logs = base + sc.gammaln(m0 + 1.0 + js) - lgamma_j + log_g + (m0 + js - 1.0) * lp
        else:
            logs = base + sc.gammaln(m0 + 1.0 + js) - lgamma_j - np.log(m0 + js) + (m0 + js) * lp
        inner = math.exp(sc.logsumexp(logs))
        # geometric bound on the truncated j-tail
        ratio = math.exp(logs[-1] - logs[-2]) if tr.j_max >= 1 else math.inf
        if ratio < 1.0:
            tail_budget += math.exp(logs[-1]) * ratio / (1.0 - ratio)
        else:
            tail_budget = math.inf
        term = inner if k % 2 == 0 else -inner
        total += term
        if abs(term) <= tr.tol * max(1.0, abs(total)):
            small_run += 1
            if small_run >= 3:
                break
        else:
            small_run = 0
    else:
        raise NonConvergenceError(
            f"EBS mixture {kind} series did not settle within k_max={tr.k_max} "
            f"terms at t={t} (a={p.a}, b={p.b})"
        )
    if not np.isfinite(total) or tail_budget > 100.0 * tr.tol * max(1.0, abs(total)):
        raise NonConvergenceError(
            f"EBS mixture {kind} series j-truncation ({tr.j_max}) insufficient "
            f"at t={t} (a={p.a}, b={p.b})"
        )
    return total


def pdf_series(t, p: WbsParams, tr: SeriesTruncation = SeriesTruncation()) -> float:
    """Truncated mixture evaluation of the WBS density (verification route)."""
    return _mixture_series(t, p, tr, "pdf")


def cdf_series(t, p: WbsParams, tr: SeriesTruncation = SeriesTruncation()) -> float:
    """Truncated mixture evaluation of the WBS distribution function."""
    return _mixture_series(t, p, tr, "cdf")


def sr_coefficient(r: int, m: float, l_max: int = 500, tol: float = 1e-12) -> float:
    """Coefficient s_r(m) of Phi^r in the power-reduction of Phi^m.

    s_r(m) = sum_{l >= r} (-1)^{l+r} C(m, l) C(l, r) with generalized
    binomials.  For integer m the sum terminates exactly at l = m; for
    non-integer m it is truncated once three successive terms fall below
    tolerance, and failure to settle within l_max terms is reported.
    """
    if r < 0:
        raise DomainError("sr_coefficient requires r >= 0")
    if m <= 0.0:
        raise DomainError("sr_coefficient requires m > 0")
    # generalized binomial C(m, r) by incremental product
    c_ml = 1.0
    for i in range(1, r + 1):
        c_ml *= (m - i + 1) / i
    c_lr = 1.0  # C(l, r) at l = r
    total = 0.0
    small_run = 0
    sign = 1.0  # (-1)^(l+r) at l = r
    for step in range(l_max + 1):
        l = r + step
        term = sign * c_ml * c_lr
        total += term
        if abs(term) <= tol * max(1.0, abs(total)):
            small_run += 1
            if small_run >= 3:
                return total
        else:
            small_run = 0
        # advance l -> l+1
        c_ml *= (m - l) / (l + 1)
        c_lr *= (l + 1) / (l + 1 - r)
        sign = -sign
    raise NonConvergenceError(
        f"s_{r}({m}) did not settle within {l_max} terms"
    )


def dr_coefficient(r: int, p: WbsParams, tr: SeriesTruncation = SeriesTruncation()) -> float:
    """Coefficient d_r = sum_{k,j} w_{k,j} s_r(b(k+1)+j) of the Phi^r expansion."""
    if r < 0:
        raise DomainError("dr_coefficient requires r >= 0")
    cache: dict[float, float] = {}
    total = 0.0
    for k in range(tr.k_max + 1):
        m0 = p.b * (k + 1)
        for j in range(tr.j_max + 1):
            m = m0 + j
            s = cache.get(m)
            if s is None:
                s = sr_coefficient(r, m, l_max=max(tr.r_max, 500), tol=tr.tol)
                cache[m] = s
            if s != 0.0:
                total += mixture_weight(k, j, p.a, p.b) * s
    return total


def moment(s: int, p: WbsParams) -> float:
    """Raw moment E(T^s) by adaptive quadrature of t^s f(t)."""
    if s < 1:
        raise DomainError("moment requires order s >= 1")
    return integrate_lifetime(lambda t: t**s * wbs_pdf(t, p), p.beta)


def moment_summary(p: WbsParams) -> dict[str, float]:
    """First four raw moments plus variance, skewness and kurtosis."""
    mu = [moment(s, p) for s in (1, 2, 3, 4)]
    m1, m2, m3, m4 = mu
    var = m2 - m1 * m1
    c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1**3
    c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1**4
    return {
        "mu1": m1,
        "mu2": m2,
        "mu3": m3,
        "mu4": m4,
        "variance": var,
        "skewness": c3 / var**1.5,
        "kurtosis": c4 / (var * var),
    }


def pwm(p_ord: int, r: int, bsp: BsParams) -> float:
    """BS probability weighted moment tau_{p,r} = int t^p g(t) Phi^r(v) dt."""
    if p_ord < 0 or r < 0:
        raise DomainError("pwm requires p_ord, r >= 0")

    def fn(t):
        phi_v = sc.ndtr((math.sqrt(t / bsp.beta) - math.sqrt(bsp.beta / t)) / bsp.alpha)
        return t**p_ord * bs_pdf(t, bsp) * phi_v**r

    return integrate_lifetime(fn, bsp.beta)


def incomplete_first_moment(q: float, p: WbsParams) -> float:
    """Partial mean J(q) = int_0^q t f(t) dt; J(inf) is the mean."""
    if q <= 0.0:
        raise DomainError("incomplete_first_moment requires q > 0")
    return integrate_lifetime(lambda t: t * wbs_pdf(t, p), p.beta, upper=q)


def mean_deviations(p: WbsParams) -> tuple[float, float]:
    """Mean absolute deviations about the mean and about the median.

    delta1 = 2 mu F(mu) - 2 J(mu) and delta2 = mu - 2 J(m) with
    J the partial mean, mu the mean and m the median.
    """
    mu = moment(1, p)
    med = wbs_quantile(0.5, p)
    delta1 = 2.0 * mu * wbs_cdf(mu, p) - 2.0 * incomplete_first_moment(mu, p)
    delta2 = mu - 2.0 * incomplete_first_moment(med, p)
    return delta1, delta2


def _check_fraction(p_frac: float) -> float:
    if not (0.0 < p_frac < 1.0):
        raise DomainError("curve fraction must lie in (0, 1)")
    return float(p_frac)


def lorenz(p_frac: float, p: WbsParams) -> float:
    """Lorenz curve L(p) = J(Q(p)) / mu."""
    p_frac = _check_fraction(p_frac)
    q = wbs_quantile(p_frac, p)
    return incomplete_first_moment(q, p) / moment(1, p)


def bonferroni(p_frac: float, p: WbsParams) -> float:
    """Bonferroni curve B(p) = L(p) / p."""
    return lorenz(p_frac, p) / _check_fraction(p_frac)


def order_stat_pdf(t, i: int, n: int, p: WbsParams):
    """Density of the i-th of n order statistics.

    Evaluated in the unexpanded closed form
    n!/((i-1)!(n-i)!) f F^{i-1} (1-F)^{n-i} for numerical stability.
    """
    if not (1 <= i <= n):
        raise DomainError("order_stat_pdf requires 1 <= i <= n")
    t = _check_t(t)
    _, lp, lpc = _v_and_tails(t, p)
    w = np.exp(_log_weibull_exponent(lp, lpc, p))
    out = (
        math.lgamma(n + 1)
        - math.lgamma(i)
        - math.lgamma(n - i + 1)
        + wbs_log_pdf(t, p)
    )
    if i > 1:
        with np.errstate(divide="ignore"):
            log_cdf = np.log(-np.expm1(-w))  # -inf where F underflows
        out = out + (i - 1) * log_cdf
    if n > i:
        out = out - (n - i) * w  # log survival = -w
    return _as_scalar(np.exp(out))


def stress_strength(p1: WbsParams, p2: WbsParams) -> float:
    """Reliability R = P(T2 < T1) = int f1(t) F2(t) dt for independent laws."""
    return integrate_lifetime(
        lambda t: wbs_pdf(t, p1) * wbs_cdf(t, p2), p1.beta
    )
