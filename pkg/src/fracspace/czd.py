"""Level-set decomposition f = g + h over pairwise disjoint selected balls.

Selection at each high point maximizes the ball radius subject to
(mean of |f|^p against the 36-fold dilate) > t^p / gamma0, with every dilate
beyond factor 2 satisfying the opposite inequality.  On a finite space both
conditions are decidable exactly on the grid of distances and distances/36.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import smallest_doubling_ball, vitali_select
from .operators import as_function
from .space import Ball, Space, mu_ball

__all__ = ["CZDecomposition", "cz_decompose", "AtomicBlockReport", "validate_atomic_block"]

_OUTER = 36.0  # mean in the selection rule is taken against the 6^2-dilate
_R_ETA = 108.0  # concentration balls are doubling for the 3 * 6^2 dilation


class CZError(ValueError):
    pass


@dataclass
class CZDecomposition:
    level: float
    p: float
    gamma0: float
    balls: list[Ball]
    concentration_balls: list[Ball]
    omega: np.ndarray  # (J, n) partition functions on the 6-dilates
    phi: np.ndarray  # (J, n) constant-on-concentration-ball functions
    g: np.ndarray
    h: np.ndarray
    report: dict = field(default_factory=dict)

    @property
    def dilated_balls(self) -> list[Ball]:
        return [b.dilate(6.0) for b in self.balls]


def default_gamma0(space: Space) -> float:
    c = space.constants
    return 1.01 * max(c.C_lambda ** (3.0 * np.log2(6.0)), 6.0 ** (3.0 * c.n))


def _selection_grid(space: Space, x: int) -> np.ndarray:
    dv = space.index(x).dvals[1:]
    if len(dv) == 0:
        return np.array([1.0])
    scaled = dv / _OUTER
    # keep each scaled radius on the near side of its distance boundary, so the
    # 36-fold dilate of grid radius d/36 never swallows the shell at distance d
    for _ in range(3):
        high = scaled * _OUTER > dv
        if not np.any(high):
            break
        scaled[high] = np.nextafter(scaled[high], 0.0)
    return np.unique(np.concatenate([dv, scaled]))


def _select_radius(space: Space, x: int, fp_w: np.ndarray, tau: float) -> float | None:
    """Largest grid radius whose selection ratio exceeds tau (None if none does)."""
    ix = space.index(x)
    cum_fp = np.concatenate(([0.0], np.cumsum(fp_w[ix.order])))
    grid = _selection_grid(space, x)
    num = cum_fp[np.searchsorted(ix.sdist, grid, side="left")]
    den = ix.cumw0[np.searchsorted(ix.sdist, _OUTER * grid, side="left")]
    good = np.flatnonzero(num > tau * den)
    if len(good) == 0:
        return None
    return float(grid[good[-1]])


def _dilate_condition_holds(space: Space, ball: Ball, fp_w: np.ndarray, tau: float) -> bool:
    """Selection ratio stays <= tau for every dilate factor above 2."""
    x, r = ball.center, ball.radius
    ix = space.index(x)
    cum_fp = np.concatenate(([0.0], np.cumsum(fp_w[ix.order])))
    grid = _selection_grid(space, x)
    probes = np.concatenate([grid[grid > 2 * r], [np.nextafter(2 * r, np.inf)]])
    probes = np.concatenate([probes, np.nextafter(probes, np.inf)])
    num = cum_fp[np.searchsorted(ix.sdist, probes, side="left")]
    den = ix.cumw0[np.searchsorted(ix.sdist, _OUTER * probes, side="left")]
    return bool(np.all(num <= tau * den * (1 + 1e-12)))


def cz_decompose(space: Space, f, p: float, t: float, gamma0: float | None = None) -> CZDecomposition:
    """Decompose f at level t into a bounded part g and a cancellation part h.

    Requires p >= 1 and t > gamma0^(1/p) ||f||_p / mu(X)^(1/p); the latter is
    exactly what makes the dilate condition attainable on a finite total mass.
    """
    f = as_function(space, f)
    if p < 1:
        raise CZError("exponent p must be at least 1")
    if t <= 0:
        raise CZError("level t must be positive")
    if gamma0 is None:
        gamma0 = default_gamma0(space)
    if gamma0 <= 1:
        raise CZError("gamma0 must exceed 1")
    norm_p = float(np.sum(np.abs(f) ** p * space.w) ** (1.0 / p))
    bound = gamma0 ** (1.0 / p) * norm_p / space.total_mass ** (1.0 / p)
    if t <= bound:
        raise CZError(
            f"level t={t} violates the selection precondition t > {bound:.6g}; "
            "raise t or lower gamma0"
        )
    tau = t ** p / gamma0
    fp_w = np.abs(f) ** p * space.w
    omega_idx = np.flatnonzero(np.abs(f) > t)

    report: dict = {"gamma0": gamma0, "tau": tau, "unselectable": []}
    n = space.n
    if len(omega_idx) == 0:
        dec = CZDecomposition(
            t, p, gamma0, [], [], np.zeros((0, n)), np.zeros((0, n)), f.copy(), np.zeros(n), report
        )
        report["gamma_fit"] = 0.0
        return dec

    candidates = []
    for x in omega_idx:
        r = _select_radius(space, int(x), fp_w, tau)
        if r is None:
            report["unselectable"].append(int(x))
            continue
        candidates.append(Ball(int(x), r))
    if report["unselectable"]:
        raise CZError(f"points {report['unselectable']} admit no selectable ball")

    balls = vitali_select(space, candidates)
    dilated_masks = [space.ball_mask(b.dilate(6.0)) for b in balls]
    covered = np.zeros(n, dtype=bool)
    for mask in dilated_masks:
        covered |= mask
    if not np.all(covered[omega_idx]):
        missing = [int(x) for x in omega_idx if not covered[x]]
        raise CZError(f"construction bug: high points {missing} not covered by the 6-dilates")

    for ball in balls:
        num = float(np.sum(fp_w[space.ball_mask(ball)]))
        den = mu_ball(space, ball.dilate(_OUTER))
        if not num > tau * den:
            raise CZError("construction bug: selected ball fails the strict mean condition")
        if not _dilate_condition_holds(space, ball, fp_w, tau):
            raise CZError("construction bug: selected ball fails the dilate condition")

    counts = np.sum(dilated_masks, axis=0).astype(float)
    omega = np.array(
        [np.where(mask, 1.0 / np.maximum(counts, 1.0), 0.0) for mask in dilated_masks]
    )

    c_lam = space.constants.C_lambda
    beta_r = max(c_lam, 1.0 + 1e-9) ** (np.log2(_R_ETA) + 1.0)
    conc = [smallest_doubling_ball(space, b, _R_ETA, beta_r) for b in balls]
    phi = np.zeros((len(balls), n))
    for j, rb in enumerate(conc):
        mask = space.ball_mask(rb)
        c_j = float(np.sum(f * omega[j] * space.w)) / float(np.sum(space.w[mask]))
        phi[j][mask] = c_j

    # g and h are only defined up to rounding.  A float pair near the defining
    # formulas with g + h == f bitwise exists iff |h| <= 2|f| pointwise (the
    # components' common lattice must resolve the low bits of f); nudge h by
    # ulps to land on such a pair wherever one exists, and keep the residual
    # within one ulp of the component scale otherwise.
    h = np.sum(omega * f[None, :] - phi, axis=0)
    g = f - h
    for x in np.flatnonzero((g + h) != f):
        fx, hx = float(f[x]), float(h[x])
        for delta in (1, -1, 2, -2, 3, -3, 4, -4):
            cand = hx + delta * np.spacing(abs(hx))
            gx = fx - cand
            if gx + cand == fx:
                h[x], g[x] = cand, gx
                break
    residual = np.abs((g + h) - f)
    allowed = np.spacing(np.maximum(np.abs(g), np.abs(h)))
    if np.any(residual > allowed):
        raise CZError("construction bug: f = g + h residual above one ulp")
    report["sum_exact"] = bool(np.array_equal(g + h, f))
    report["sum_residual_ulps"] = float(np.max(residual / np.maximum(allowed, 1e-300)))

    report["gamma_fit"] = float(np.max(np.sum(np.abs(phi), axis=0)) / t)
    report["matching_residuals"] = [
        float(np.sum(phi[j] * space.w) - np.sum(f * omega[j] * space.w))
        for j in range(len(balls))
    ]
    if p > 1:
        fits = []
        for j, rb in enumerate(conc):
            mask = space.ball_mask(rb)
            lhs = float(np.sum(np.abs(phi[j]) ** p * space.w) ** (1.0 / p)) * float(
                np.sum(space.w[mask])
            ) ** (1.0 - 1.0 / p)
            rhs = float(np.sum(np.abs(f * omega[j]) ** p * space.w))
            fits.append(lhs * t ** (p - 1.0) / rhs if rhs > 0 else 0.0)
        report["l_p_concentration_fit"] = max(fits) if fits else 0.0
    return CZDecomposition(t, p, gamma0, balls, conc, omega, phi, g, h, report)


# ---------------------------------------------------------------------------
# atomic blocks


@dataclass
class AtomicBlockReport:
    block_norm: float
    support_ok: bool
    mean_ok: bool
    mean_value: float
    sum_ok: bool
    parts_ok: list
    passed: bool


def validate_atomic_block(space: Space, b, ball: Ball, parts, p: float = np.inf, rho: float = 2.0):
    """Check the two-piece atomic block structure of b on the given ball.

    parts is (a1, B1, lam1, a2, B2, lam2).  Conditions: b supported on the
    ball; weighted mean zero up to 1e-10 * ||b||_1; b = lam1 a1 + lam2 a2
    pointwise; each a_j supported on B_j inside the ball with
    ||a_j||_p <= mu(rho B_j)^(1/p - 1) / gap_coefficient(B_j, ball).
    """
    from .geometry import gap_coefficient
    from .norms import lp_norm

    if rho <= 1:
        raise ValueError("rho must exceed 1")
    b = as_function(space, b)
    a1, b1, lam1, a2, b2, lam2 = parts
    a1 = as_function(space, a1)
    a2 = as_function(space, a2)

    mask_b = space.ball_mask(ball)
    support_ok = bool(np.all(b[~mask_b] == 0))
    mean_value = float(np.sum(b * space.w))
    l1 = float(np.sum(np.abs(b) * space.w))
    mean_ok = abs(mean_value) <= 1e-10 * max(l1, 1e-300)
    combo = lam1 * a1 + lam2 * a2
    scale = max(float(np.max(np.abs(b))), 1e-300)
    sum_ok = bool(np.max(np.abs(combo - b)) <= 1e-12 * scale)

    parts_report = []
    for a_j, b_j in ((a1, b1), (a2, b2)):
        mask_j = space.ball_mask(b_j)
        supp_j = bool(np.all(a_j[~mask_j] == 0))
        nested = bool(np.all(mask_b[mask_j]))
        size = lp_norm(space, a_j, p)
        mu_rho = mu_ball(space, b_j.dilate(rho))
        coeff = gap_coefficient(space, b_j, ball, containment="sets").value
        exponent = (1.0 / p - 1.0) if p != np.inf else -1.0
        bound = mu_rho ** exponent / coeff
        parts_report.append(
            {
                "support_ok": supp_j,
                "nested_ok": nested,
                "size": size,
                "bound": bound,
                "size_ok": size <= bound * (1 + 1e-12),
            }
        )
    passed = (
        support_ok
        and mean_ok
        and sum_ok
        and all(r["support_ok"] and r["nested_ok"] and r["size_ok"] for r in parts_report)
    )
    return AtomicBlockReport(
        abs(lam1) + abs(lam2), support_ok, mean_ok, mean_value, sum_ok, parts_report, passed
    )
