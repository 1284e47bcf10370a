"""Maximal operators over the canonical ball family.

All suprema run over the canonical family (every realized set at both its
tight and wide radius), so values agree with the supremum over arbitrary
balls for the dilation factors used here.
"""

from __future__ import annotations

import numpy as np

from ._family import (
    family_table,
    oscillation_values,
    pair_sweep,
    pointwise_max_over_balls,
)
from .operators import as_function
from .space import Space

__all__ = [
    "maximal_mean",
    "doubling_maximal",
    "fractional_maximal",
    "sharp_maximal",
]


def _prefix_power_sums(space: Space, g: np.ndarray) -> np.ndarray:
    """Per canonical ball: sum of g over the realized set (g already includes w)."""
    t = family_table(space)
    out = np.empty(len(t.center))
    for c in range(space.n):
        lo, hi = t.slices[c]
        ix = space.index(c)
        cum = np.concatenate(([0.0], np.cumsum(g[ix.order])))
        out[lo:hi] = cum[t.end[lo:hi]]
    return out


def _dilated_mass(space: Space, rho: float) -> np.ndarray:
    t = family_table(space)
    out = np.empty(len(t.center))
    for c in range(space.n):
        lo, hi = t.slices[c]
        ix = space.index(c)
        out[lo:hi] = ix.cumw0[np.searchsorted(ix.sdist, rho * t.radius[lo:hi], side="left")]
    return out


def maximal_mean(space: Space, f, r: float = 1.0, rho: float = 1.0) -> np.ndarray:
    """M f(x) = sup over balls Q containing x of [(1/mu(rho Q)) sum_Q |f|^r w]^(1/r)."""
    if r < 1:
        raise ValueError("integrability exponent r must be at least 1")
    if rho <= 0:
        raise ValueError("dilation rho must be positive")
    f = as_function(space, f)
    sums = _prefix_power_sums(space, np.abs(f) ** r * space.w)
    vals = (sums / _dilated_mass(space, rho)) ** (1.0 / r)
    return pointwise_max_over_balls(space, vals)


def fractional_maximal(space: Space, f, p: float, rho: float, alpha: float) -> np.ndarray:
    """M f(x) = sup over Q of [mu(rho Q)^-(1 - alpha p) sum_Q |f|^p w]^(1/p)."""
    if p < 1:
        raise ValueError("exponent p must be at least 1")
    if alpha * p >= 1:
        raise ValueError("fractional maximal operator needs alpha * p < 1")
    if rho <= 0:
        raise ValueError("dilation rho must be positive")
    f = as_function(space, f)
    sums = _prefix_power_sums(space, np.abs(f) ** p * space.w)
    vals = (sums * _dilated_mass(space, rho) ** (alpha * p - 1.0)) ** (1.0 / p)
    return pointwise_max_over_balls(space, vals)


def doubling_maximal(space: Space, f) -> np.ndarray:
    """N f(x) = sup over doubling balls Q containing x of the plain average of |f|.

    The tight singleton ball at each point is always doubling and its average
    is |f(x)| exactly, so the pointwise domination |f| <= N f holds with
    equality free of rounding.
    """
    f = as_function(space, f)
    t = family_table(space)
    sums = _prefix_power_sums(space, np.abs(f) * space.w)
    vals = sums / t.mass
    return np.maximum(pointwise_max_over_balls(space, vals, eligible=t.doubling), np.abs(f))


def sharp_maximal(space: Space, f, alpha: float = 0.0) -> np.ndarray:
    """Oscillation-measuring maximal function.

    Sum of (a) the max over balls B containing x of the mean deviation of f
    from its doubling-dilate mean, against mu(6B), and (b) the max over
    doubling pairs Q within R, x in Q, of |mean_Q f - mean_R f| divided by the
    nesting coefficient: the shell-integral one at alpha = 0, the fractional
    six-adic one for alpha > 0.
    """
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    f = as_function(space, f)
    term_a = pointwise_max_over_balls(space, oscillation_values(space, f, rho=6.0))
    divisor = "gap" if alpha == 0.0 else ("shell", alpha)
    term_b = pair_sweep(space, f, divisor, pointwise=True)
    return term_a + term_b
