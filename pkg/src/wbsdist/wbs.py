"""The Weibull Birnbaum-Saunders (WBS) distribution.

Four parameters: BS shape alpha and scale beta, plus Weibull shape
parameters a (scale-like) and b (power).  With G = Phi(v) the BS
distribution function, the WBS survival function is

    S(t) = exp(-a * [G/(1-G)]^b),

i.e. the BS odds ratio pushed through a Weibull law.  Everything
likelihood-facing is evaluated in log space: log Phi and log(1 - Phi)
come from the complementary normal log-CDF, so fits that push Phi(v)
towards 0 or 1 do not lose the tail.

Saturation thresholds: the CDF returns exactly 0 once
log(a) + b*log_odds < log(min_subnormal) (~ -745) and exactly 1 once the
exponent w = a*odds^b exceeds -log(eps)/2 (~ 36.7), the point where
1 - e^{-w} rounds to 1 in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special as sc

from .bs import BsParams, _as_scalar, _check_t, _quantile_from_normal, bs_log_pdf
from .errors import DomainError

__all__ = [
    "WbsParams",
    "RngSeed",
    "wbs_cdf",
    "wbs_pdf",
    "wbs_log_pdf",
    "wbs_sf",
    "wbs_hazard",
    "wbs_quantile",
    "wbs_sample",
]

# above this, exp() in the Weibull exponent would overflow; the survival
# function is then exactly 0 and the CDF exactly 1
_EXP_CLIP = 700.0


@dataclass(frozen=True)
class WbsParams:
    """Parameter vector (alpha, beta, a, b), all strictly positive."""

    alpha: float
    beta: float
    a: float
    b: float

    def __post_init__(self):
        for name in ("alpha", "beta", "a", "b"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0.0):
                raise DomainError(f"WbsParams.{name} must be finite and > 0, got {val}")

    @property
    def bs(self) -> BsParams:
        return BsParams(self.alpha, self.beta)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.a, self.b)


@dataclass(frozen=True)
class RngSeed:
    """Seed for the sampler's counter-based generator (64-bit unsigned)."""

    seed: int

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("RngSeed must fit in an unsigned 64-bit integer")


def _v_and_tails(t, p: WbsParams):
    """v, log Phi(v), log(1 - Phi(v)) for validated positive t."""
    t = _check_t(t)
    s = np.sqrt(t / p.beta)
    v = (s - 1.0 / s) / p.alpha
    return v, sc.log_ndtr(v), sc.log_ndtr(-v)


def _log_weibull_exponent(log_phi, log_phic, p: WbsParams):
    """log(a * odds^b) with odds = Phi/(1-Phi), clipped against exp overflow."""
    return np.minimum(np.log(p.a) + p.b * (log_phi - log_phic), _EXP_CLIP)


def wbs_cdf(t, p: WbsParams):
    """WBS distribution function 1 - exp(-a * odds^b)."""
    _, lp, lpc = _v_and_tails(t, p)
    w = np.exp(_log_weibull_exponent(lp, lpc, p))
    return _as_scalar(-np.expm1(-w))


def wbs_sf(t, p: WbsParams):
    """Survival function exp(-a * odds^b), computed without cancellation."""
    _, lp, lpc = _v_and_tails(t, p)
    w = np.exp(_log_weibull_exponent(lp, lpc, p))
    return _as_scalar(np.exp(-w))


def wbs_log_pdf(t, p: WbsParams):
    """log of the WBS density; -inf where the density underflows to 0."""
    t = _check_t(t)
    _, lp, lpc = _v_and_tails(t, p)
    w = np.exp(_log_weibull_exponent(lp, lpc, p))
    return _as_scalar(
        np.log(p.a)
        + np.log(p.b)
        + bs_log_pdf(t, p.bs)
        + (p.b - 1.0) * lp
        - (p.b + 1.0) * lpc
        - w
    )


def wbs_pdf(t, p: WbsParams):
    """WBS density; returns 0 (not an error) where it underflows."""
    return _as_scalar(np.exp(wbs_log_pdf(t, p)))


def wbs_hazard(t, p: WbsParams):
    """Failure rate a*b*g(t)*Phi^{b-1}/(1-Phi)^{b+1}.

    The exp(-a*odds^b) factor cancels between density and survival, so the
    hazard is evaluated from the closed form and stays positive even where
    both pdf and sf underflow.
    """
    t = _check_t(t)
    _, lp, lpc = _v_and_tails(t, p)
    return _as_scalar(
        np.exp(
            np.log(p.a)
            + np.log(p.b)
            + bs_log_pdf(t, p.bs)
            + (p.b - 1.0) * lp
            - (p.b + 1.0) * lpc
        )
    )


def wbs_quantile(u, p: WbsParams):
    """Inverse of :func:`wbs_cdf` on (0, 1).

    Inverts the Weibull layer to the target BS probability
    q = r/(1+r) with r = (-(1/a) log(1-u))^(1/b), then delegates to the
    BS quantile.  The normal quantile is taken through the complementary
    probability 1/(1+r), which is exact in both tails.
    """
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)) or np.any(u <= 0.0) or np.any(u >= 1.0):
        raise DomainError("wbs_quantile requires 0 < u < 1")
    # log r, with log(-log(1-u)) stable near both endpoints
    log_r = (np.log(-np.log1p(-u)) - np.log(p.a)) / p.b
    upper = sc.expit(-log_r)  # 1 - q = 1/(1+r)
    x = -sc.ndtri(upper)  # Phi^{-1}(q)
    return _as_scalar(_quantile_from_normal(p.alpha * x, p.beta))


def wbs_sample(n: int, p: WbsParams, seed) -> np.ndarray:
    """n inverse-transform draws, deterministic for a given seed.

    The uniform stream comes from numpy's Philox generator (counter-based
    and splittable); each draw is wbs_quantile(U_i).
    """
    if n < 1:
        raise DomainError("wbs_sample requires n >= 1")
    raw = seed.seed if isinstance(seed, RngSeed) else int(seed)
    rng = np.random.Generator(np.random.Philox(raw))
    u = rng.random(n)
    # random() yields [0, 1); nudge an exact 0 into the open interval
    u[u == 0.0] = 2.0**-64
    return np.atleast_1d(wbs_quantile(u, p))
