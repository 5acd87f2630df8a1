"""Adaptive quadrature over (0, inf) for lifetime integrands.

Gauss-Kronrod (QUADPACK) after the substitution t = scale * e^x, which
maps the positive half-line to the whole real line and concentrates
nodes around the distribution's scale.  Failures are reported as
NonConvergenceError instead of returning an uncertified value.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import NonConvergenceError

_EPSABS = 1e-10
_EPSREL = 1e-8


def integrate_lifetime(fn, scale: float, lower: float = 0.0, upper: float = math.inf,
                       epsabs: float = _EPSABS, epsrel: float = _EPSREL) -> float:
    """Integral of fn(t) dt over (lower, upper) within (0, inf)."""
    if scale <= 0.0:
        raise ValueError("integration scale must be positive")
    if upper <= lower:
        return 0.0

    def integrand(x):
        t = scale * math.exp(x)
        val = fn(t) * t
        return val if np.isfinite(val) else 0.0

    x_lo = -math.inf if lower <= 0.0 else math.log(lower / scale)
    x_hi = math.inf if math.isinf(upper) else math.log(upper / scale)

    # split at the scale point so QUADPACK anchors on the mass region
    pieces = []
    if x_lo < 0.0 < x_hi:
        pieces = [(x_lo, 0.0), (0.0, x_hi)]
    else:
        pieces = [(x_lo, x_hi)]

    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        for a, b in pieces:
            try:
                val, abserr = quad(integrand, a, b, epsabs=epsabs, epsrel=epsrel,
                                   limit=200)
            except IntegrationWarning as exc:
                # retry once with the roundoff-tolerant path before reporting
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", IntegrationWarning)
                    val, abserr = quad(integrand, a, b, epsabs=epsabs,
                                       epsrel=epsrel, limit=400)
                if not np.isfinite(val) or abserr > 10.0 * max(
                    epsabs, epsrel * abs(val)
                ):
                    raise NonConvergenceError(
                        f"quadrature failed on ({a}, {b}): {exc}"
                    ) from exc
            total += val
            err += abserr
    if not np.isfinite(total):
        raise NonConvergenceError("quadrature produced a non-finite value")
    return total
