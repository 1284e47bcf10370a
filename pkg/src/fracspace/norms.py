"""Function-space norms: Lebesgue, weak, Orlicz-Luxemburg, RBMO, exp-oscillation.

Orlicz functions are convex, vanish at zero and increase to infinity; the
Luxemburg norm is solved by bisection on the monotone level function.  The
RBMO estimate uses the computable characterization: mean oscillation against
a dilated ball plus the mean-jump term across nested doubling balls divided
by the nesting coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._family import exp_oscillation_values, family_table, oscillation_values, pair_sweep
from .operators import as_function
from .space import Ball, Space

__all__ = [
    "Power",
    "ZygmundLog",
    "TabulatedOrlicz",
    "zygmund_function",
    "lp_norm",
    "weak_lp",
    "luxemburg_norm",
    "orlicz_indices",
    "target_orlicz",
    "ball_mean",
    "RbmoEstimate",
    "rbmo_norm",
    "osc_exp_norm",
]


def zygmund_function(t, s: float):
    """t * log^s(2 + t); the endpoint weight, defined for t >= 0 and s >= 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("zygmund_function is defined for t >= 0")
    if s < 0:
        raise ValueError("exponent s must be non-negative")
    out = t * np.log(2.0 + t) ** s
    return float(out) if out.ndim == 0 else out


def _check_convex(phi, lo=1e-6, hi=1e6, points=129):
    ts = np.geomspace(lo, hi, points)
    mids = 0.5 * (ts[:-1] + ts[1:])
    lhs = phi.value(mids)
    rhs = 0.5 * (phi.value(ts[:-1]) + phi.value(ts[1:]))
    if np.any(lhs > rhs * (1 + 1e-9)):
        raise ValueError("orlicz function fails the secant convexity test")
    vals = phi.value(ts)
    if np.any(np.diff(vals) <= 0):
        raise ValueError("orlicz function must be strictly increasing")


@dataclass(frozen=True)
class Power:
    """phi(t) = t**p."""

    p: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("power orlicz function needs p >= 1")

    def value(self, t):
        return np.asarray(t, dtype=float) ** self.p

    def deriv(self, t):
        return self.p * np.asarray(t, dtype=float) ** (self.p - 1.0)

    def inverse(self, t):
        return np.asarray(t, dtype=float) ** (1.0 / self.p)


@dataclass(frozen=True)
class ZygmundLog:
    """phi(t) = t * log^s(2 + t)."""

    s: float

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("zygmund orlicz function needs s > 0")
        _check_convex(self)

    def value(self, t):
        return zygmund_function(t, self.s)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        lg = np.log(2.0 + t)
        return lg ** self.s + self.s * t * lg ** (self.s - 1.0) / (2.0 + t)

    def inverse(self, t):
        t = np.asarray(t, dtype=float)
        lo = np.full_like(t, 1e-300)
        hi = np.maximum(t, 1.0)
        while np.any(self.value(hi) < t):
            hi = np.where(self.value(hi) < t, hi * 8.0, hi)
        for _ in range(200):
            mid = np.sqrt(lo * hi)
            low = self.value(mid) < t
            lo = np.where(low, mid, lo)
            hi = np.where(low, hi, mid)
        out = np.sqrt(lo * hi)
        return float(out) if out.ndim == 0 else out


class TabulatedOrlicz:
    """Monotone convex samples, interpolated linearly in log-log coordinates."""

    def __init__(self, ts, values):
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if np.any(ts <= 0) or np.any(values <= 0):
            raise ValueError("tabulated orlicz samples must be positive")
        if np.any(np.diff(ts) <= 0) or np.any(np.diff(values) <= 0):
            raise ValueError("tabulated orlicz samples must be strictly increasing")
        self.log_t = np.log(ts)
        self.log_v = np.log(values)
        self._lo_slope = (self.log_v[1] - self.log_v[0]) / (self.log_t[1] - self.log_t[0])
        self._hi_slope = (self.log_v[-1] - self.log_v[-2]) / (self.log_t[-1] - self.log_t[-2])
        _check_convex(self, lo=float(ts[0]), hi=float(ts[-1]))

    def _interp(self, logs, xs, ys, lo_slope, hi_slope):
        out = np.interp(logs, xs, ys)
        below = logs < xs[0]
        above = logs > xs[-1]
        out = np.where(below, ys[0] + (logs - xs[0]) * lo_slope, out)
        out = np.where(above, ys[-1] + (logs - xs[-1]) * hi_slope, out)
        return out

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        with np.errstate(divide="ignore"):
            logs = np.log(t[pos])
        out[pos] = np.exp(self._interp(logs, self.log_t, self.log_v, self._lo_slope, self._hi_slope))
        return float(out) if out.ndim == 0 else out

    def deriv(self, t, h: float = 1e-6):
        t = np.asarray(t, dtype=float)
        return (self.value(t * (1 + h)) - self.value(t * (1 - h))) / (2 * t * h)

    def inverse(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        with np.errstate(divide="ignore"):
            logs = np.log(t[pos])
        out[pos] = np.exp(
            self._interp(logs, self.log_v, self.log_t, 1.0 / self._lo_slope, 1.0 / self._hi_slope)
        )
        return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# scalar norms


def lp_norm(space: Space, f, p: float) -> float:
    f = as_function(space, f)
    if p == math.inf:
        return float(np.max(np.abs(f))) if len(f) else 0.0
    if p < 1:
        raise ValueError("lp_norm needs p >= 1")
    return float(np.sum(np.abs(f) ** p * space.w) ** (1.0 / p))


def weak_lp(space: Space, f, p: float) -> float:
    """sup_t t * mu(|f| > t)^(1/p), attained at the jump points of |f|."""
    if p < 1:
        raise ValueError("weak_lp needs p >= 1")
    f = np.abs(as_function(space, f))
    order = np.argsort(-f, kind="stable")
    fs = f[order]
    cum = np.cumsum(space.w[order])
    pos = fs > 0
    if not np.any(pos):
        return 0.0
    # mu(|f| >= t_k) for each sorted value; the max over duplicates is the last one
    return float(np.max(fs[pos] * cum[pos] ** (1.0 / p)))


def luxemburg_norm(space: Space, f, phi, tol: float = 1e-10, max_iter: int = 200) -> float:
    """inf{t > 0 : sum phi(|f|/t) w <= 1} by bisection in log t."""
    f = np.abs(as_function(space, f))
    fmax = float(np.max(f)) if len(f) else 0.0
    if fmax == 0.0:
        return 0.0
    mass = space.total_mass
    expand = 1e6

    def level(t: float) -> float:
        return float(np.sum(phi.value(f / t) * space.w))

    lo = fmax / max(float(phi.inverse(mass * expand)), 1e-300)
    hi = fmax * expand
    while level(hi) > 1.0:
        hi *= 16.0
    while level(lo) <= 1.0 and lo > 1e-300:
        lo /= 16.0
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        if level(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * hi:
            break
    return hi


def orlicz_indices(phi, lo: float = 1e-6, hi: float = 1e6, points: int = 1024):
    """(inf, sup) of t phi'(t) / phi(t) over a log grid; interpolation indices."""
    ts = np.geomspace(lo, hi, points)
    ratio = ts * np.asarray(phi.deriv(ts), dtype=float) / np.asarray(phi.value(ts), dtype=float)
    return float(np.min(ratio)), float(np.max(ratio))


def target_orlicz(phi, alpha: float, lo: float = 1e-12, hi: float = 1e12, points: int = 4801):
    """Orlicz function whose generalized inverse is phi^-1(t) * t^-alpha.

    This is the natural image space of an order-alpha operator acting on the
    phi-Orlicz space.  Construction is refused when the prescribed inverse is
    not strictly increasing on the grid.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    ts = np.geomspace(lo, hi, points)
    u = np.asarray(phi.inverse(ts), dtype=float) * ts ** (-alpha)
    if np.any(np.diff(u) <= 0):
        j = int(np.argmax(np.diff(u) <= 0))
        raise ValueError(
            f"prescribed inverse is not increasing near t={ts[j]:.3g}; "
            "no orlicz function has this inverse"
        )
    return TabulatedOrlicz(u, ts)


# ---------------------------------------------------------------------------
# oscillation norms


def ball_mean(space: Space, f, ball: Ball) -> float:
    """Weighted mean of f over the realized set of the ball."""
    f = as_function(space, f)
    members = space.ball_members(ball)
    wsum = float(np.sum(space.w[members]))
    return float(np.sum(f[members] * space.w[members]) / wsum)


@dataclass
class RbmoEstimate:
    value: float
    rho: float
    oscillation: float
    regularity: float
    ball_witness: tuple | None
    pair_witness: tuple | None


def rbmo_norm(space: Space, f, rho: float = 2.0) -> RbmoEstimate:
    """Computable RBMO estimate: oscillation term max regularity term.

    Term one: max over canonical balls B of the mean of |f - m(tilde B)| against
    mu(rho B).  Term two: max over nested doubling pairs of the mean jump over
    the shell-integral nesting coefficient.
    """
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    f = as_function(space, f)
    t = family_table(space)
    osc = oscillation_values(space, f, rho)
    j = int(np.argmax(osc))
    term_a = float(osc[j])
    ball_witness = (int(t.center[j]), float(t.radius[j]))
    term_b, pair_witness = pair_sweep(space, f, "gap", pointwise=False)
    return RbmoEstimate(max(term_a, term_b), rho, term_a, term_b, ball_witness, pair_witness)


def osc_exp_norm(space: Space, f, r: float = 1.0) -> float:
    """Exponential-oscillation norm estimate of order r (r >= 1).

    Term one replaces the mean deviation by the exp-L^r Luxemburg value of
    |f - m(tilde B)| on B against mu(2B); term two is the same doubling-pair
    regularity term as the RBMO estimate.
    """
    if r < 1:
        raise ValueError("osc_exp_norm needs r >= 1")
    f = as_function(space, f)
    term_a = float(np.max(exp_oscillation_values(space, f, r)))
    term_b, _ = pair_sweep(space, f, "gap", pointwise=False)
    return max(term_a, term_b)
