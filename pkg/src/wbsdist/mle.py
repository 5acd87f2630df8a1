"""Maximum-likelihood estimation for the WBS distribution.

The log-likelihood and score vector are analytic and evaluated in log
space (see :mod:`wbsdist.wbs`); the observed information matrix comes in
two flavours: a numeric one (central differences of the analytic score,
authoritative for covariances) and an analytic one implementing the
published second-derivative elements verbatim, shipped as a cross-check
report because hand-derived Hessians of this size routinely carry
transcription slips.

Optimization runs over eta = log(alpha, beta, a, b) so positivity is
structural.  Each start is climbed by a damped Newton method (finite
difference Hessian of the analytic score, ridge-safeguarded, Armijo
line search) with a Nelder-Mead fallback when Newton stalls; the best of
all starts wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
import scipy.optimize
import scipy.special as sc

from .errors import DataError, DomainError
from .wbs import WbsParams, _EXP_CLIP, wbs_log_pdf


def wbs_log_pdf_values(s: "Sample", p: WbsParams) -> np.ndarray:
    """Per-observation log densities (used by the degeneracy guard)."""
    return np.atleast_1d(wbs_log_pdf(s.as_array, p))

__all__ = [
    "Sample",
    "FitOptions",
    "FitResult",
    "InfoCrosscheck",
    "loglik",
    "score",
    "observed_info_numeric",
    "observed_info_analytic",
    "info_crosscheck",
    "fit",
    "confint",
]

_PARAM_NAMES = ("alpha", "beta", "a", "b")


@dataclass(frozen=True)
class Sample:
    """A validated sequence of positive lifetimes."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise DataError("a sample needs at least one observation")
        arr = np.asarray(self.values, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
            raise DataError("all observations must be finite and > 0")

    @classmethod
    def from_values(cls, values) -> "Sample":
        return cls(tuple(float(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.values)

    @cached_property
    def as_array(self) -> np.ndarray:
        arr = np.asarray(self.values, dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def sorted_values(self) -> np.ndarray:
        arr = np.sort(self.as_array)
        arr.flags.writeable = False
        return arr


@dataclass(frozen=True)
class FitOptions:
    """Controls for the multi-start optimizer."""

    max_iterations: int = 500
    grad_tol: float = 1e-6
    step_tol: float = 1e-8
    n_starts: int = 16
    seed: int = 0
    algorithm: str = "newton-with-fallback"  # or "derivative-free"

    def __post_init__(self):
        if self.max_iterations < 1 or self.n_starts < 1:
            raise DomainError("max_iterations and n_starts must be >= 1")
        if self.grad_tol <= 0.0 or self.step_tol <= 0.0:
            raise DomainError("tolerances must be > 0")
        if self.algorithm not in ("newton-with-fallback", "derivative-free"):
            raise DomainError(f"unknown algorithm {self.algorithm!r}")


@dataclass(frozen=True)
class FitResult:
    """Outcome of a WBS maximum-likelihood fit."""

    params: WbsParams
    loglik: float
    score_norm: float
    covariance: np.ndarray | None
    converged: bool
    iterations: int
    starts_tried: int

    @property
    def neg2loglik(self) -> float:
        return -2.0 * self.loglik

    @property
    def stderr(self) -> np.ndarray | None:
        if self.covariance is None:
            return None
        return np.sqrt(np.diag(self.covariance))


def _terms(s: Sample, p: WbsParams):
    """Per-observation ingredients shared by loglik, score and information."""
    t = s.as_array
    sq = np.sqrt(t / p.beta)
    v = (sq - 1.0 / sq) / p.alpha
    lp = sc.log_ndtr(v)
    lpc = sc.log_ndtr(-v)
    log_phi = -0.5 * v * v - 0.5 * math.log(2.0 * math.pi)
    lodds = lp - lpc
    odds_b = np.exp(np.minimum(p.b * lodds, _EXP_CLIP))
    return t, sq, v, lp, lpc, log_phi, lodds, odds_b


def loglik(s: Sample, p: WbsParams) -> float:
    """Total WBS log-likelihood; -inf where the sample is impossible."""
    t, sq, v, lp, lpc, _, lodds, odds_b = _terms(s, p)
    n = s.n
    log_kappa = (
        p.alpha**-2.0
        - math.log(2.0 * p.alpha)
        - 0.5 * math.log(2.0 * math.pi * p.beta)
    )
    tau = sq * sq + 1.0 / (sq * sq)
    out = (
        n * (math.log(p.a) + math.log(p.b) + log_kappa)
        - 1.5 * np.sum(np.log(t))
        + np.sum(np.log(t + p.beta))
        - np.sum(tau) / (2.0 * p.alpha**2)
        + (p.b - 1.0) * np.sum(lp)
        - (p.b + 1.0) * np.sum(lpc)
        - p.a * np.sum(odds_b)
    )
    return float(out) if np.isfinite(out) else -math.inf


def score(s: Sample, p: WbsParams) -> np.ndarray:
    """Analytic score (d loglik / d alpha, beta, a, b)."""
    t, sq, v, lp, lpc, log_phi, lodds, odds_b = _terms(s, p)
    n, alpha, beta, a, b = s.n, p.alpha, p.beta, p.a, p.b
    mills_lo = np.exp(log_phi - lp)  # phi/Phi
    mills_hi = np.exp(log_phi - lpc)  # phi/(1-Phi)
    wgt = np.exp(log_phi + (b - 1.0) * lp - (b + 1.0) * lpc)
    tau = sq * sq + 1.0 / (sq * sq)
    tau_s = sq + 1.0 / sq

    u_alpha = (
        -(n / alpha) * (1.0 + 2.0 / alpha**2)
        + np.sum(tau) / alpha**3
        - ((b - 1.0) / alpha) * np.sum(v * mills_lo)
        - ((b + 1.0) / alpha) * np.sum(v * mills_hi)
        + (a * b / alpha) * np.sum(v * wgt)
    )
    u_beta = (
        -n / (2.0 * beta)
        + np.sum(1.0 / (t + beta))
        + np.sum(sq * sq - 1.0 / (sq * sq)) / (2.0 * beta * alpha**2)
        - ((b - 1.0) / (2.0 * beta * alpha)) * np.sum(tau_s * mills_lo)
        - ((b + 1.0) / (2.0 * beta * alpha)) * np.sum(tau_s * mills_hi)
        + (a * b / (2.0 * beta * alpha)) * np.sum(tau_s * wgt)
    )
    u_a = n / a - np.sum(odds_b)
    u_b = n / b + np.sum(lp) - np.sum(lpc) - a * np.sum(odds_b * lodds)
    return np.array([u_alpha, u_beta, u_a, u_b])


def observed_info_numeric(s: Sample, p: WbsParams, rel_step: float = 1e-5) -> np.ndarray:
    """Observed information -Hessian(loglik) by central differences of the score."""
    theta = np.array(p.as_tuple())
    h = rel_step * np.maximum(np.abs(theta), 1e-3)
    jac = np.empty((4, 4))
    for i in range(4):
        up = theta.copy()
        dn = theta.copy()
        up[i] += h[i]
        dn[i] -= h[i]
        jac[:, i] = (score(s, WbsParams(*up)) - score(s, WbsParams(*dn))) / (2.0 * h[i])
    return -0.5 * (jac + jac.T)


def observed_info_analytic(s: Sample, p: WbsParams) -> np.ndarray:
    """Observed information from the published second-derivative elements.

    The elements are transcribed verbatim; where they disagree with the
    numeric Hessian beyond tolerance, :func:`info_crosscheck` flags the
    entry instead of silently patching it.  The numeric matrix remains
    authoritative for covariances.
    """
    t, sq, v, lp, lpc, log_phi, lodds, odds_b = _terms(s, p)
    n, alpha, beta, a, b = s.n, p.alpha, p.beta, p.a, p.b
    phi = np.exp(log_phi)
    cphi = np.exp(lp)  # Phi
    sphi = np.exp(lpc)  # 1 - Phi
    mills_lo = np.exp(log_phi - lp)
    mills_hi = np.exp(log_phi - lpc)
    wgt = np.exp(log_phi + (b - 1.0) * lp - (b + 1.0) * lpc)  # phi Phi^{b-1}/(1-Phi)^{b+1}
    tau = sq * sq + 1.0 / (sq * sq)
    tau_s = sq + 1.0 / sq

    l_alpha_alpha = (
        n / alpha**2
        + 6.0 * n / alpha**4
        - 3.0 * np.sum(tau) / alpha**4
        + (2.0 * (b - 1.0) / alpha**2) * np.sum(v * mills_lo)
        - (2.0 * (b + 1.0) / alpha**2) * np.sum(v * mills_hi)
        + ((b - 1.0) / alpha**3)
        * np.sum(v**4 * mills_lo - alpha * v**2 * mills_lo**2)
        - ((b + 1.0) / alpha**3)
        * np.sum(v**4 * mills_hi - alpha * v**2 * mills_hi**2)
        + (a * b / alpha**2) * np.sum(v * wgt)
        + (a * b / alpha**2) * np.sum(v * (v**2 - 1.0) * wgt)
        + (b - 1.0) * np.sum(v * phi * wgt / cphi)
        + (b + 1.0) * np.sum(v * phi * wgt / sphi)
    )
    l_alpha_beta = (
        -np.sum(sq * sq - 1.0 / (sq * sq)) / (alpha**3 * beta)
        + ((b - 1.0) / (2.0 * beta * alpha**2))
        * np.sum(alpha * v * mills_lo + v**4 * mills_lo - alpha * v**2 * mills_lo**2)
        - ((b - 1.0) / (2.0 * beta * alpha**2))
        * np.sum(alpha * v * mills_hi + v**4 * mills_hi - alpha * v**2 * mills_hi**2)
        + (a * b / (2.0 * beta * alpha**2))
        * np.sum(tau_s * (v**2 * phi - 1.0) * wgt)
        - (a * b * (b - 1.0) / (2.0 * beta * alpha**2))
        * np.sum(tau_s * wgt / cphi)
        - (a * b * (b + 1.0) / (2.0 * beta * alpha**2))
        * np.sum(tau_s * v * phi * wgt / sphi)
    )
    l_beta_beta = (
        n / (2.0 * beta**2)
        - np.sum(1.0 / (t + beta) ** 2)
        - np.sum(t) / (alpha**2 * beta**3)
        + ((b - 1.0) / (2.0 * alpha * beta**2)) * np.sum(tau_s * mills_lo)
        - ((b - 1.0) / (4.0 * alpha * beta**2))
        * np.sum(
            -alpha * v * mills_lo
            + v * tau_s**2 * mills_lo / alpha
            + v * tau_s**2 * mills_lo**2 / alpha
        )
        + ((b + 1.0) / (4.0 * alpha * beta**2))
        * np.sum(
            -alpha * v * mills_hi
            + v * tau_s**2 * mills_hi / alpha
            - v * tau_s**2 * mills_hi**2 / alpha
        )
        - (a * b / (2.0 * alpha * beta**2)) * np.sum(tau_s * wgt)
        - ((b + 1.0) / (2.0 * alpha * beta**2)) * np.sum(tau_s * mills_hi)
        + (a * b / (2.0 * alpha**2 * beta**2))
        * np.sum(wgt * (tau_s**2 * v * phi - (sq - 1.0 / sq)))
        - (a * b * (b - 1.0) / (2.0 * alpha**2 * beta**2))
        * np.sum(tau_s**2 * phi * wgt)
        + (a * b * (b + 1.0) / (2.0 * alpha**2 * beta**2))
        * np.sum(tau_s**2 * phi * wgt / sphi)
    )
    brace = 1.0 + b * lodds
    l_beta_b = (
        np.sum(tau_s * mills_lo) / (2.0 * beta * alpha)
        + np.sum(tau_s * mills_hi) / (2.0 * beta * alpha)
        - np.sum(tau_s * wgt * brace) / (2.0 * beta * alpha)
    )
    l_alpha_b = (
        np.sum(v * mills_lo) / alpha
        + np.sum(v * mills_hi) / alpha
        - (a / alpha) * np.sum(v * wgt * brace)
    )
    l_beta_a = (b / (2.0 * beta * alpha)) * np.sum(tau_s * wgt)
    l_alpha_a = (b / alpha) * np.sum(v * wgt)
    l_b_b = -n / b**2 - a * np.sum(odds_b * lodds**2)
    l_a_a = -n / a**2
    l_a_b = -np.sum(odds_b * lodds)

    ell = np.array(
        [
            [l_alpha_alpha, l_alpha_beta, l_alpha_a, l_alpha_b],
            [l_alpha_beta, l_beta_beta, l_beta_a, l_beta_b],
            [l_alpha_a, l_beta_a, l_a_a, l_a_b],
            [l_alpha_b, l_beta_b, l_a_b, l_b_b],
        ]
    )
    return -ell


@dataclass(frozen=True)
class InfoCrosscheck:
    """Per-element comparison of analytic vs numeric observed information."""

    analytic: np.ndarray
    numeric: np.ndarray
    rel_err: np.ndarray

    def flagged(self, tol: float = 1e-3) -> list[str]:
        """Element labels whose relative disagreement exceeds tol."""
        out = []
        for i in range(4):
            for j in range(i, 4):
                if self.rel_err[i, j] > tol:
                    out.append(f"J[{_PARAM_NAMES[i]},{_PARAM_NAMES[j]}]")
        return out

    def summary(self, tol: float = 1e-3) -> str:
        lines = ["element            analytic        numeric        rel_err"]
        for i in range(4):
            for j in range(i, 4):
                label = f"J[{_PARAM_NAMES[i]},{_PARAM_NAMES[j]}]"
                mark = "  *" if self.rel_err[i, j] > tol else ""
                lines.append(
                    f"{label:<14} {self.analytic[i, j]:>14.6g} "
                    f"{self.numeric[i, j]:>14.6g} {self.rel_err[i, j]:>12.3e}{mark}"
                )
        return "\n".join(lines)


def info_crosscheck(s: Sample, p: WbsParams) -> InfoCrosscheck:
    """Diagnostic comparison of the published Hessian elements vs finite differences."""
    analytic = observed_info_analytic(s, p)
    numeric = observed_info_numeric(s, p)
    scale = np.maximum(np.abs(numeric), 1e-8)
    rel = np.abs(analytic - numeric) / scale
    return InfoCrosscheck(analytic=analytic, numeric=numeric, rel_err=rel)


# ---------------------------------------------------------------------------
# optimizer internals (shared with wbsdist.competitors)


def _fd_gradient(fun, x, rel=1e-7):
    g = np.empty(len(x))
    for i in range(len(x)):
        h = rel * max(abs(x[i]), 1e-8)
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return g


def _newton_descend(fun, grad, x0, max_iter, grad_tol, step_tol):
    """Damped Newton minimization with FD Hessian of grad and Armijo search.

    Returns (x, f, iterations, converged).
    """
    x = np.asarray(x0, dtype=float)
    f = fun(x)
    if not np.isfinite(f):
        return x, f, 0, False
    n = len(x)
    it = 0
    for it in range(1, max_iter + 1):
        g = grad(x)
        if not np.all(np.isfinite(g)):
            return x, f, it, False
        if np.max(np.abs(g)) <= grad_tol * max(1.0, abs(f)):
            return x, f, it, True
        # FD Hessian of the gradient, symmetrized
        hess = np.empty((n, n))
        hstep = 5e-6 * np.maximum(np.abs(x), 1.0)
        for i in range(n):
            xp = x.copy()
            xm = x.copy()
            xp[i] += hstep[i]
            xm[i] -= hstep[i]
            hess[:, i] = (grad(xp) - grad(xm)) / (2.0 * hstep[i])
        hess = 0.5 * (hess + hess.T)
        # ridge until positive definite
        lam = 0.0
        eye = np.eye(n)
        for _ in range(30):
            try:
                chol = np.linalg.cholesky(hess + lam * eye)
                break
            except np.linalg.LinAlgError:
                lam = max(2.0 * lam, 1e-8 * max(np.trace(np.abs(hess)), 1.0))
        else:
            return x, f, it, False
        d = -np.linalg.solve(chol.T, np.linalg.solve(chol, g))
        slope = g @ d
        step = 1.0
        accepted = False
        for _ in range(40):
            xn = x + step * d
            fn = fun(xn)
            if np.isfinite(fn) and fn <= f + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return x, f, it, False
        moved = np.max(np.abs(step * d))
        x, f = xn, fn
        if moved <= step_tol:
            g = grad(x)
            return x, f, it, bool(np.max(np.abs(g)) <= grad_tol * max(1.0, abs(f)))
    return x, f, it, False


def _nelder_mead(fun, x0, max_iter):
    res = scipy.optimize.minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options=dict(maxiter=max_iter, xatol=1e-10, fatol=1e-12),
    )
    return res.x, res.fun, res.nit


def _climb(fun, grad, eta0, opts: FitOptions):
    """One start: Newton with Nelder-Mead fallback (or pure derivative-free)."""
    if opts.algorithm == "derivative-free":
        x, f, nit = _nelder_mead(fun, eta0, 40 * opts.max_iterations)
        return x, f, nit, True
    x, f, nit, ok = _newton_descend(
        fun, grad, eta0, opts.max_iterations, opts.grad_tol, opts.step_tol
    )
    if not ok:
        x2, f2, nit2 = _nelder_mead(fun, x if np.isfinite(f) else eta0, 2000)
        nit += nit2
        if np.isfinite(f2) and f2 <= f:
            x, f = x2, f2
        x, f, nit3, ok = _newton_descend(
            fun, grad, x, opts.max_iterations, opts.grad_tol, opts.step_tol
        )
        nit += nit3
    return x, f, nit, ok


def bs_moment_start(values: np.ndarray) -> tuple[float, float]:
    """Classical BS modified-moment start.

    With s the sample mean and r the mean reciprocal, E(T) = beta(1 + alpha^2/2)
    and E(1/T) = (1 + alpha^2/2)/beta give beta0 = sqrt(s/r) and
    alpha0 = sqrt(2(sqrt(s r) - 1)); s*r >= 1 by the AM-HM inequality.
    """
    s_mean = float(np.mean(values))
    r_mean = float(np.mean(1.0 / values))
    beta0 = math.sqrt(s_mean / r_mean)
    alpha0 = math.sqrt(2.0 * max(math.sqrt(s_mean * r_mean) - 1.0, 1e-4))
    return alpha0, beta0


def _wbs_starts(s: Sample, opts: FitOptions) -> list[tuple[float, float, float, float]]:
    alpha0, beta0 = bs_moment_start(s.as_array)
    grid = [
        (alpha0, beta0, a0, b0)
        for a0 in (0.1, 0.5, 1.0, 2.0)
        for b0 in (0.1, 0.5, 1.0, 2.0)
    ]
    if opts.n_starts <= len(grid):
        return grid[: opts.n_starts]
    rng = np.random.Generator(np.random.Philox(opts.seed))
    extra = []
    base = np.log(np.array([alpha0, beta0, 1.0, 1.0]))
    for _ in range(opts.n_starts - len(grid)):
        extra.append(tuple(np.exp(base + rng.normal(scale=1.5, size=4))))
    return grid + extra


def _spd_covariance(info: np.ndarray) -> np.ndarray | None:
    """Inverse of a positive-definite information matrix, else None."""
    if not np.all(np.isfinite(info)):
        return None
    try:
        if np.all(np.linalg.eigvalsh(info) > 0.0):
            cov = np.linalg.inv(info)
            return 0.5 * (cov + cov.T)
    except np.linalg.LinAlgError:
        pass
    return None


def fit(s: Sample, opts: FitOptions = FitOptions()) -> FitResult:
    """Multi-start maximum-likelihood fit of the WBS distribution.

    The WBS likelihood can be unbounded on samples with heavy ties (a
    joint alpha -> 0, b -> 0 escape inflates the density on a cluster of
    observations without bound), so the reported estimate is the best
    *admissible* landing: parameters inside a wide sanity box, no
    single-observation density spike, and a positive-definite numeric
    observed information (a genuine interior maximum with finite
    standard errors).  If no landing is admissible the best point found
    is returned with ``converged=False``.
    """
    if s.n < 5:
        raise DataError("fit requires at least 5 observations")
    if np.ptp(s.as_array) == 0.0:
        raise DataError("degenerate sample: all observations are identical")

    def fun(eta):
        if not np.all(np.isfinite(eta)) or np.max(np.abs(eta)) > 40.0:
            return math.inf
        val = loglik(s, WbsParams(*np.exp(eta)))
        return -val if np.isfinite(val) else math.inf

    def grad(eta):
        if not np.all(np.isfinite(eta)) or np.max(np.abs(eta)) > 40.0:
            return np.full(4, np.nan)
        theta = np.exp(eta)
        return -score(s, WbsParams(*theta)) * theta

    med = float(np.median(s.as_array))
    box_lo = np.array([1e-3, med * 1e-3, 1e-3, 1e-3])
    box_hi = np.array([1e3, med * 1e3, 1e3, 1e3])
    spike_cap = math.log(1e3) - math.log(med)

    candidates = []
    total_iter = 0
    starts = _wbs_starts(s, opts)
    for start in starts:
        eta0 = np.log(np.asarray(start))
        if not np.isfinite(fun(eta0)):
            continue
        x, f, nit, ok = _climb(fun, grad, eta0, opts)
        total_iter += nit
        if np.isfinite(f):
            candidates.append((float(f), x))
    if not candidates:
        raise DataError("no start produced a finite likelihood")

    candidates.sort(key=lambda c: c[0])
    chosen = None
    covariance = None
    admissible = False
    seen: list[np.ndarray] = []
    for f, eta in candidates:
        if any(np.max(np.abs(eta - e)) < 1e-5 for e in seen):
            continue
        seen.append(eta)
        theta = np.exp(eta)
        if np.any(theta <= box_lo) or np.any(theta >= box_hi):
            continue
        params = WbsParams(*theta)
        if float(np.max(wbs_log_pdf_values(s, params))) > spike_cap:
            continue
        cov = _spd_covariance(observed_info_numeric(s, params))
        if cov is None:
            continue
        chosen = (f, params)
        covariance = cov
        admissible = True
        break
    if chosen is None:
        f, eta = candidates[0]
        chosen = (f, WbsParams(*np.exp(eta)))
        covariance = _spd_covariance(observed_info_numeric(s, chosen[1]))

    neg_ll, params = chosen
    u = score(s, params)
    score_norm = float(np.max(np.abs(u)))
    ll = float(-neg_ll)
    converged = admissible and score_norm <= 1e-5 * max(1.0, abs(ll))
    return FitResult(
        params=params,
        loglik=ll,
        score_norm=score_norm,
        covariance=covariance,
        converged=converged,
        iterations=total_iter,
        starts_tried=len(starts),
    )


def confint(f: FitResult, level: float) -> tuple[tuple[float, float], ...]:
    """Wald confidence intervals estimate +- z * stderr at the given level."""
    if not (0.0 < level < 1.0):
        raise DomainError("confidence level must lie in (0, 1)")
    if f.covariance is None:
        raise DomainError("fit has no positive-semidefinite covariance")
    eigs = np.linalg.eigvalsh(f.covariance)
    if np.any(eigs < -1e-10 * max(1.0, float(np.max(np.abs(eigs))))):
        raise DomainError("covariance is not positive semidefinite")
    z = float(sc.ndtri(0.5 + level / 2.0))
    theta = np.array(f.params.as_tuple())
    half = z * f.stderr
    return tuple((float(t - h), float(t + h)) for t, h in zip(theta, half))
