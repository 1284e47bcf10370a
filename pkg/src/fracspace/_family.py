"""Flattened canonical-ball tables shared by maximal operators and norms.

Everything here is internal.  The family table lists every canonical ball
(center, prefix length into the center's distance order, radius), flags the
mass-doubling ones, and locates each ball's smallest doubling six-adic dilate.
Pair sweeps (doubling ball inside doubling ball) are evaluated center-block by
center-block with dense numpy masks.
"""

from __future__ import annotations

import numpy as np

from .space import Space

_DOUBLING_ETA = 6.0


class FamilyTable:
    __slots__ = (
        "center",
        "end",
        "radius",
        "mass",
        "doubling",
        "tilde_end",
        "tilde_radius",
        "slices",
        "beta6",
    )


def family_table(space: Space) -> FamilyTable:
    cache = space.__dict__.setdefault("_cache", {})
    if "family" in cache:
        return cache["family"]
    beta6 = space.beta6
    centers, ends, radii = [], [], []
    slices = []
    for c in range(space.n):
        ix = space.index(c)
        start = len(centers)
        m = len(ix.dvals) - 1
        for k in range(m + 1):
            centers.append(c)
            ends.append(ix.ends[k])
            radii.append(ix.inner[k])
            if k < m:
                centers.append(c)
                ends.append(ix.ends[k])
                radii.append(ix.outer[k])
        slices.append((start, len(centers)))
    t = FamilyTable()
    t.center = np.asarray(centers, dtype=np.int64)
    t.end = np.asarray(ends, dtype=np.int64)
    t.radius = np.asarray(radii, dtype=float)
    t.beta6 = beta6
    B = len(t.center)
    t.mass = np.empty(B)
    mass6 = np.empty(B)
    t.tilde_end = np.empty(B, dtype=np.int64)
    t.tilde_radius = np.empty(B)
    for c in range(space.n):
        lo, hi = slices[c]
        ix = space.index(c)
        r = t.radius[lo:hi]
        t.mass[lo:hi] = ix.cumw0[t.end[lo:hi]]
        mass6[lo:hi] = ix.cumw0[np.searchsorted(ix.sdist, _DOUBLING_ETA * r, side="left")]
        # smallest doubling dilate 6^j B, j >= 0
        cur_r = r.copy()
        cur_m = t.mass[lo:hi].copy()
        cur_m6 = mass6[lo:hi].copy()
        pending = cur_m6 > beta6 * cur_m
        while np.any(pending):
            cur_r[pending] *= _DOUBLING_ETA
            cur_m[pending] = cur_m6[pending]
            cur_m6[pending] = ix.cumw0[
                np.searchsorted(ix.sdist, _DOUBLING_ETA * cur_r[pending], side="left")
            ]
            pending = cur_m6 > beta6 * cur_m
        t.tilde_radius[lo:hi] = cur_r
        t.tilde_end[lo:hi] = np.searchsorted(ix.sdist, cur_r, side="left")
    t.doubling = mass6 <= beta6 * t.mass
    t.slices = slices
    cache["family"] = t
    return t


def _relative_means(space: Space, c: int, f: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Prefix means of f - f[c] in center c's order (exactly zero on constants)."""
    ix = space.index(c)
    g = f[ix.order] - f[c]
    cumgw = np.concatenate(([0.0], np.cumsum(g * space.w[ix.order])))
    return cumgw[ends] / ix.cumw0[ends]


def oscillation_values(space: Space, f: np.ndarray, rho: float) -> np.ndarray:
    """Per canonical ball: (1 / mu(rho B)) * sum_B |f - mean_{tilde B} f| w.

    Deviations are formed in the frame centered at f(ball center), so constant
    functions give exact zeros and exact translations cancel bitwise.
    """
    t = family_table(space)
    out = np.empty(len(t.center))
    for c in range(space.n):
        lo, hi = t.slices[c]
        ix = space.index(c)
        g_ord = f[ix.order] - f[c]
        w_ord = space.w[ix.order]
        rel = _relative_means(space, c, f, t.tilde_end[lo:hi])
        e = t.end[lo:hi]
        dev = np.abs(g_ord[None, :] - rel[:, None]) * w_ord[None, :]
        mask = np.arange(space.n)[None, :] < e[:, None]
        sums = np.sum(dev * mask, axis=1)
        denom = ix.cumw0[np.searchsorted(ix.sdist, rho * t.radius[lo:hi], side="left")]
        out[lo:hi] = sums / denom
    return out


def exp_oscillation_values(
    space: Space, f: np.ndarray, r: float, iters: int = 60
) -> np.ndarray:
    """Per canonical ball: the exp-L^r Luxemburg-type oscillation value.

    Solves inf{s > 0 : sum_B exp((|f - m_tilde|/s)^r) w <= 2 mu(2B)} by
    bisection in log s; the upper bracket sum_B <= mass * exp((maxdev/s)^r)
    makes the starting bracket provable.
    """
    from ._fastpath import exp_ball_values

    t = family_table(space)
    out = np.zeros(len(t.center))
    for c in range(space.n):
        lo, hi = t.slices[c]
        ix = space.index(c)
        g_ord = f[ix.order] - f[c]
        w_ord = space.w[ix.order]
        rel = _relative_means(space, c, f, t.tilde_end[lo:hi])
        cap = 2.0 * ix.cumw0[np.searchsorted(ix.sdist, 2.0 * t.radius[lo:hi], side="left")]
        vals = np.zeros(hi - lo)
        exp_ball_values(g_ord, w_ord, rel, t.end[lo:hi], cap, float(r), iters, vals)
        out[lo:hi] = vals
    return out


def pointwise_max_over_balls(space: Space, values: np.ndarray, eligible=None) -> np.ndarray:
    """out[x] = max over canonical balls containing x of values[ball]."""
    t = family_table(space)
    vals = values if eligible is None else np.where(eligible, values, -np.inf)
    out = np.full(space.n, -np.inf)
    for c in range(space.n):
        lo, hi = t.slices[c]
        ix = space.index(c)
        v = vals[lo:hi]
        e = t.end[lo:hi]
        # suffix max over balls ordered by end (ends are non-decreasing in k)
        order = np.argsort(e, kind="stable")
        e_sorted = e[order]
        v_sorted = v[order]
        suffix = np.maximum.accumulate(v_sorted[::-1])[::-1]
        pos = np.empty(space.n, dtype=np.int64)
        pos[ix.order] = np.arange(space.n)
        k0 = np.searchsorted(e_sorted, pos + 1, side="left")
        valid = k0 < len(e_sorted)
        cand = np.where(valid, suffix[np.minimum(k0, len(e_sorted) - 1)], -np.inf)
        out = np.maximum(out, cand)
    return out


# ---------------------------------------------------------------------------
# doubling-pair sweeps


def _gap_prefix(space: Space, c: int) -> list[np.ndarray]:
    """cums[c2][j] = sum over the first j points of c2's order of w/lambda(c, d(., c))."""
    from .space import dominating_at

    vals = np.empty(space.n)
    d_row = space.D[c].copy()
    pos = d_row > 0
    vals[pos] = space.w[pos] / np.asarray(dominating_at(space, c, d_row[pos]), dtype=float)
    vals[~pos] = 0.0  # the center itself never contributes to a shell difference
    out = []
    for c2 in range(space.n):
        ordv = vals[space.index(c2).order]
        out.append(np.concatenate(([0.0], np.cumsum(ordv))))
    return out


def _shell_tables(space: Space, ball_idx: np.ndarray, alpha: float):
    """Padded per-ball tables: six-adic radii and partial sums of shell terms."""
    from .space import dominating_at

    t = family_table(space)
    r_max = float(np.max(t.radius))
    rows_b, rows_c = [], []
    for j in ball_idx:
        c = int(t.center[j])
        r = float(t.radius[j])
        ix = space.index(c)
        rs, v = [r], r
        while v < r_max:
            v *= 6.0
            rs.append(v)
        rs = np.asarray(rs)
        if len(rs) > 1:
            masses = ix.cumw0[np.searchsorted(ix.sdist, rs[1:], side="left")]
            lams = np.asarray(dominating_at(space, c, rs[1:]), dtype=float)
            terms = (masses / lams) ** (1.0 - alpha)
            rows_c.append(np.concatenate(([0.0], np.cumsum(terms))))
        else:
            rows_c.append(np.zeros(1))
        rows_b.append(rs)
    width = max(len(r) for r in rows_b)
    bounds = np.full((len(ball_idx), width), np.inf)
    cums = np.zeros((len(ball_idx), width))
    nb = np.empty(len(ball_idx), dtype=np.int64)
    for i, (rb, rc) in enumerate(zip(rows_b, rows_c)):
        bounds[i, : len(rb)] = rb
        cums[i, : len(rc)] = rc
        nb[i] = len(rb)
    return bounds, cums, nb


def _runmax_to_center(space: Space, c: int) -> np.ndarray:
    """RM[c2, e] = max distance from c2 to the first e points of c's order (e >= 1)."""
    order = space.index(c).order
    return np.maximum.accumulate(space.D[:, order], axis=1)


def _outer_candidates(space: Space) -> dict:
    """Doubling outer-ball candidates, one per realized set: the smallest doubling
    radius variant has the smallest divisor, so pruning the other keeps the sup."""
    cache = space.__dict__.setdefault("_cache", {})
    if "outer_candidates" in cache:
        return cache["outer_candidates"]
    t = family_table(space)
    by_key: dict[tuple, int] = {}
    for j in np.flatnonzero(t.doubling):
        key = (int(t.center[j]), int(t.end[j]))
        prev = by_key.get(key)
        if prev is None or t.radius[j] < t.radius[prev]:
            by_key[key] = int(j)
    keep = np.asarray(sorted(by_key.values()), dtype=np.int64)
    out = {
        "idx": keep,
        "center": t.center[keep],
        "end": t.end[keep],
        "radius": t.radius[keep],
    }
    cache["outer_candidates"] = out
    return out


def pair_sweep(space: Space, f: np.ndarray, divisor, pointwise: bool):
    """Max of |mean_Q f - mean_R f| / divisor over doubling pairs Q within R.

    divisor is "gap" for the shell-integral coefficient or ("shell", alpha)
    for the fractional six-adic one.  Returns (scalar max, witness) or, when
    pointwise, the per-point max over pairs whose inner ball contains x.
    """
    from ._fastpath import gap_pair_maxima, shell_pair_maxima

    t = family_table(space)
    if not np.any(t.doubling):
        return np.zeros(space.n) if pointwise else (0.0, None)
    cand = _outer_candidates(space)
    # anchored means: differences of (anchor, rel) pairs cancel exact translations
    anchor = f[t.center]
    rel = np.empty(len(t.center))
    for c in range(space.n):
        lo, hi = t.slices[c]
        rel[lo:hi] = _relative_means(space, c, f, t.end[lo:hi])
    r_idx = cand["idx"]
    r_center, r_radius = cand["center"], cand["radius"]
    anchor_r, rel_r = anchor[r_idx], rel[r_idx]

    use_shell = divisor != "gap"
    best, witness = 0.0, None
    per_ball = np.zeros(len(t.center))
    for c in range(space.n):
        lo, hi = t.slices[c]
        block = np.arange(lo, hi)
        if use_shell:
            q_idx = block[t.doubling[lo:hi]]  # variants differ through their radii
        else:
            # the gap divisor sees only the realized set: one entry per set,
            # eligible when either radius variant is doubling
            ends_blk = t.end[lo:hi]
            q_list = []
            for e in np.unique(ends_blk):
                sel = block[ends_blk == e]
                if np.any(t.doubling[sel]):
                    q_list.append(sel[0])
            q_idx = np.asarray(q_list, dtype=np.int64)
        if len(q_idx) == 0:
            continue

        # E[i] = longest prefix of c's order still inside outer ball i
        RM = _runmax_to_center(space, c)
        e_bound = np.empty(len(r_idx), dtype=np.int64)
        for c2 in np.unique(r_center):
            sel = r_center == c2
            e_bound[sel] = np.searchsorted(RM[int(c2)], r_radius[sel], side="left")

        e_q = t.end[q_idx]
        out = np.empty(len(q_idx))
        if use_shell:
            bounds, cums, nb = _shell_tables(space, q_idx, divisor[1])
            shell_pair_maxima(
                e_bound, r_radius, anchor_r, rel_r, e_q, anchor[q_idx], rel[q_idx],
                bounds, cums, nb, out,
            )
        else:
            gp = _gap_prefix(space, c)
            x_r = np.empty(len(r_idx))
            for c2 in np.unique(r_center):
                sel = r_center == c2
                e2 = np.searchsorted(space.index(int(c2)).sdist, 2.0 * r_radius[sel], side="left")
                x_r[sel] = gp[int(c2)][e2]
            own_q = gp[c][e_q]
            gap_pair_maxima(
                e_bound, x_r, anchor_r, rel_r, e_q, own_q, anchor[q_idx], rel[q_idx], out
            )

        vals = np.maximum(out, 0.0)
        if use_shell:
            per_ball[q_idx] = vals
        else:
            # fan the per-set value back out to both radius variants
            for qi, q in enumerate(q_idx):
                same = block[t.end[lo:hi] == t.end[q]]
                per_ball[same] = vals[qi]
        j = int(np.argmax(vals))
        if vals[j] > best:
            best = float(vals[j])
            i = _witness_scan(
                e_bound, r_radius, anchor_r, rel_r, float(anchor[q_idx[j]]),
                float(rel[q_idx[j]]), int(e_q[j]), best,
                None if use_shell else (x_r, float(own_q[j])),
                None if not use_shell else (bounds[j], cums[j], int(nb[j])),
            )
            witness = (
                (c, float(t.radius[q_idx[j]])),
                (int(r_center[i]), float(r_radius[i])) if i is not None else None,
            )
    if pointwise:
        eligible = np.zeros(len(t.center), dtype=bool)
        eligible[per_ball > 0] = True
        eligible |= t.doubling
        return np.maximum(pointwise_max_over_balls(space, per_ball, eligible), 0.0)
    return best, witness


def _witness_scan(e_bound, r_radius, anchor_r, rel_r, a_q, rel_q, e_q, target, gap, shell):
    """First outer ball attaining the recorded maximum for the winning inner ball."""
    for i in range(len(e_bound)):
        if e_bound[i] < e_q:
            continue
        diff = abs((anchor_r[i] - a_q) + (rel_r[i] - rel_q))
        if gap is not None:
            x_r, own = gap
            div = 1.0 + max(x_r[i] - own, 0.0)
        else:
            bounds, cums, nb = shell
            n_sh = int(np.searchsorted(bounds[:nb], r_radius[i], side="left"))
            div = 1.0 + cums[min(n_sh, nb - 1)]
        if diff / div >= target:
            return i
    return None
