"""Optional compiled kernels for the doubling-pair sweeps and ball bisections.

Pure-numpy fallbacks live next to the call sites; these fused loops only
change the constant factor, never the arithmetic (no fastmath, IEEE order).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def deco(fn):
            return fn

        return deco if not (args and callable(args[0])) else args[0]


@njit(cache=True)
def gap_pair_maxima(e_bound, x_r, anchor_r, rel_r, e_q, own_q, anchor_q, rel_q, out):
    """Per inner ball: max over admissible outer balls of |mean jump| / gap divisor.

    e_bound[i]: largest inner-prefix length the outer ball i still contains;
    x_r[i]: shell-integral prefix at the doubled outer ball; own_q[q]: same
    prefix at the inner ball itself.
    """
    for q in range(len(e_q)):
        eq = e_q[q]
        best = -1.0
        for i in range(len(e_bound)):
            if e_bound[i] < eq:
                continue
            diff = (anchor_r[i] - anchor_q[q]) + (rel_r[i] - rel_q[q])
            if diff < 0.0:
                diff = -diff
            div = 1.0 + (x_r[i] - own_q[q])
            if div < 1.0:
                div = 1.0
            val = diff / div
            if val > best:
                best = val
        out[q] = best


@njit(cache=True)
def shell_pair_maxima(
    e_bound, r_r, anchor_r, rel_r, e_q, anchor_q, rel_q, bounds, cums, nb, out
):
    """Same sweep with the fractional six-adic divisor looked up per shell count."""
    for q in range(len(e_q)):
        eq = e_q[q]
        best = -1.0
        for i in range(len(e_bound)):
            if e_bound[i] < eq:
                continue
            diff = (anchor_r[i] - anchor_q[q]) + (rel_r[i] - rel_q[q])
            if diff < 0.0:
                diff = -diff
            n_sh = 0
            top = nb[q]
            while n_sh < top and bounds[q, n_sh] < r_r[i]:
                n_sh += 1
            if n_sh >= top:
                n_sh = top - 1
            val = diff / (1.0 + cums[q, n_sh])
            if val > best:
                best = val
        out[q] = best


@njit(cache=True)
def exp_ball_values(g_ord, w_ord, rel, ends, cap, r, iters, out):
    """Per ball: inf{s : sum_B exp((|g - rel|/s)^r) w <= cap} by log bisection."""
    for j in range(len(ends)):
        e = ends[j]
        m = rel[j]
        maxdev = 0.0
        for i in range(e):
            d = g_ord[i] - m
            if d < 0.0:
                d = -d
            if d > maxdev:
                maxdev = d
        if maxdev <= 0.0:
            out[j] = 0.0
            continue
        mass = 0.0
        for i in range(e):
            mass += w_ord[i]
        ratio = cap[j] / mass
        if ratio <= 1.0:
            ratio = 1.000000001
        s_hi = maxdev / np.log(ratio) ** (1.0 / r)
        s_lo = maxdev * 1e-9
        if s_lo >= s_hi:
            s_lo = s_hi * 1e-9
        lo = np.log(s_lo)
        hi = np.log(s_hi)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            s = np.exp(mid)
            tot = 0.0
            for i in range(e):
                d = g_ord[i] - m
                if d < 0.0:
                    d = -d
                u = (d / s) ** r
                if u > 700.0:
                    tot = cap[j] + 1.0
                    break
                tot += np.exp(u) * w_ord[i]
                if tot > cap[j]:
                    break
            if tot > cap[j]:
                lo = mid
            else:
                hi = mid
        out[j] = np.exp(hi)
