"""Inequality suites: refinement-trend statistics for the boundedness estimates.

Every suite reports ratio statistics (operator output norm over input norm,
or left-hand side over right-hand side of an inequality) across a ladder of
refinements, with witnesses.  The target inequalities hold with existential
constants, so the falsifiable reading is that these fitted statistics stay
stable as the fixture is refined.
"""

from __future__ import annotations

import math

import numpy as np

from ..czd import validate_atomic_block
from ..fixtures import make_atomic_blocks, make_function_family, make_space
from ..kernels import kernel_matrix
from ..maximal import doubling_maximal, fractional_maximal, sharp_maximal
from ..norms import (
    Power,
    lp_norm,
    luxemburg_norm,
    orlicz_indices,
    osc_exp_norm,
    rbmo_norm,
    target_orlicz,
    weak_lp,
    zygmund_function,
)
from ..operators import commutator, index_subsets, multilinear_commutator
from ..space import check_weak_reverse_doubling, dominating_at
from .config import ExperimentConfig
from .report import SuiteReport
from .stats import estimate_operator_norm, weak_type_statistic

__all__ = [
    "suite_boundedness",
    "suite_commutators",
    "suite_endpoint",
    "suite_welland",
    "suite_mean_zero_domination",
    "SUITES",
    "run_suites",
]


def _spaces(cfg: ExperimentConfig, ladder):
    return [(n, make_space(cfg.fixture_spec(n))) for n in ladder]


def _test_family(cfg: ExperimentConfig, space, mean_zero=False, nonneg=False):
    suffix = "_mean_zero" if mean_zero else ""
    fams = make_function_family(space, "indicators" + suffix, cfg.families.get("indicators", 10))
    fams += make_function_family(space, "bumps" + suffix, cfg.families.get("bumps", 6))
    if nonneg:
        fams = [np.abs(f) for f in fams]
    return fams


def _profiles(space, count: int, norm_fn, target: float):
    """Deterministic commutator symbols scaled so norm_fn(b) hits the target.

    Positively homogeneous norms rescale exactly, so no search is needed.
    """
    base = space.D[:, 0]
    diam = max(space.diameter, space.min_positive_distance())
    out = []
    for j in range(count):
        b = np.sin(2.0 * np.pi * (j + 1) * base / diam + 0.3 * j)
        nrm = norm_fn(b)
        if nrm < 1e-12:
            b = np.where(np.arange(space.n) % 2 == 0, 1.0, -1.0)
            nrm = norm_fn(b)
        out.append(b * (target / nrm))
    return out


def suite_boundedness(cfg: ExperimentConfig) -> SuiteReport:
    """Strong, weak, into-oscillation, and atomic-block statistics side by side."""
    rep = SuiteReport("boundedness")
    spec = cfg.kernel_spec()
    alpha = cfg.alpha
    q0 = 1.0 / (1.0 - alpha)

    for n, space in _spaces(cfg, cfg.light_ladder):
        K = kernel_matrix(spec, space)
        op = lambda f: K @ (f * space.w)
        fams = _test_family(cfg, space)
        for pair in cfg.pairs:
            p, q = float(pair["p"]), float(pair["q"])
            val, wit = estimate_operator_norm(space, op, p, q, fams)
            rep.add("ladder", n, f"strong_p{p:g}_q{q:g}", val, f"f#{wit}")
        val, wit = weak_type_statistic(
            space, op, float(cfg.weak["p"]), float(cfg.weak["q"]), fams
        )
        rep.add("ladder", n, "weak_endpoint", val, f"f#{wit}")

    for n, space in _spaces(cfg, cfg.ladder):
        K = kernel_matrix(spec, space)
        op = lambda f: K @ (f * space.w)
        fams = _test_family(cfg, space)
        best, wit = 0.0, ""
        for i, f in enumerate(fams):
            den = lp_norm(space, f, 1.0 / alpha)
            if den == 0.0:
                continue
            val = rbmo_norm(space, op(f)).value / den
            if val > best:
                best, wit = val, f"f#{i}"
        rep.add("ladder", n, "into_oscillation", best, wit)

        blocks = make_atomic_blocks(space, 8, seed=cfg.seed)
        strong_b, weak_b = 0.0, 0.0
        for b, ball, parts in blocks:
            report = validate_atomic_block(space, b, ball, parts)
            if not report.passed or report.block_norm == 0:
                continue
            tb = op(b)
            strong_b = max(strong_b, lp_norm(space, tb, q0) / report.block_norm)
            weak_b = max(weak_b, weak_lp(space, tb, q0) / report.block_norm)
        rep.add("ladder", n, "block_strong", strong_b, f"{len(blocks)} blocks")
        rep.add("ladder", n, "block_weak", weak_b, f"{len(blocks)} blocks")
    return rep


def suite_commutators(cfg: ExperimentConfig) -> SuiteReport:
    """Single and multilinear commutator statistics, plus the Orlicz route."""
    rep = SuiteReport("commutators")
    spec = cfg.kernel_spec()
    alpha = cfg.alpha
    phi = cfg.orlicz_fn()
    a_phi, b_phi = orlicz_indices(phi)
    if not 1.0 < a_phi <= b_phi < math.inf:
        rep.fail(f"orlicz indices out of range: a={a_phi:.6g}, b={b_phi:.6g}")
        return rep
    psi = target_orlicz(phi, alpha)
    a_psi, b_psi = orlicz_indices(psi)
    if not 1.0 < a_psi * (1 + 1e-9) and a_psi <= b_psi < math.inf:
        rep.fail(f"target orlicz indices out of range: a={a_psi:.6g}, b={b_psi:.6g}")
        return rep
    rep.note(f"orlicz indices: ({a_phi:.6g}, {b_phi:.6g}) -> ({a_psi:.6g}, {b_psi:.6g})")

    p, q = float(cfg.pairs[0]["p"]), float(cfg.pairs[0]["q"])
    k = int(cfg.commutators.get("k", 2))
    target = float(cfg.commutators.get("target_norm", 1.0))

    for n, space in _spaces(cfg, cfg.ladder):
        K = kernel_matrix(spec, space)
        fams = _test_family(cfg, space)
        bs = _profiles(space, k, lambda b: rbmo_norm(space, b).value, target)
        b_norms = [rbmo_norm(space, b).value for b in bs]

        best, wit = 0.0, ""
        for i, f in enumerate(fams):
            den = b_norms[0] * lp_norm(space, f, p)
            if den == 0.0:
                continue
            val = lp_norm(space, commutator(bs[0], spec, space, f, K), q) / den
            if val > best:
                best, wit = val, f"f#{i}"
        rep.add("ladder", n, "single_commutator", best, wit)

        prod_norms = float(np.prod(b_norms))
        best_o, best_p, wit = 0.0, 0.0, ""
        for i, f in enumerate(fams):
            den_phi = luxemburg_norm(space, f, phi)
            den_p = lp_norm(space, f, p)
            if den_phi == 0.0 or den_p == 0.0:
                continue
            tb = multilinear_commutator(bs, spec, space, f, K)
            val_o = luxemburg_norm(space, tb, psi) / (prod_norms * den_phi)
            if val_o > best_o:
                best_o, wit = val_o, f"f#{i}"
            best_p = max(best_p, lp_norm(space, tb, q) / (prod_norms * den_p))
        rep.add("ladder", n, f"multilinear_k{k}_orlicz", best_o, wit)
        rep.add("ladder", n, f"multilinear_k{k}_lebesgue", best_p, wit)
        if isinstance(phi, Power):
            gap = abs(best_o - best_p) / max(best_p, 1e-300)
            rep.add("ladder", n, "orlicz_vs_lebesgue_gap", gap, "")
    return rep


def endpoint_rhs(space, f, lam: float, r_tuple, b_norms) -> float:
    """Level-set bound: weight of the symbol norms times the subset-sum of
    iterated log-weights of |f|/lam."""
    k = len(r_tuple)
    inv = [1.0 / ri for ri in r_tuple]
    total = sum(inv)
    lead = zygmund_function(float(np.prod(b_norms)), total)
    acc = 0.0
    scaled = np.abs(f) / lam
    for j in range(k + 1):
        for sigma in index_subsets(k, j):
            inv_sigma = sum(inv[i - 1] for i in sigma.indices)
            inner = float(np.sum(zygmund_function(scaled, total - inv_sigma) * space.w))
            acc += zygmund_function(inner, inv_sigma)
    return lead * acc


def suite_endpoint(cfg: ExperimentConfig) -> SuiteReport:
    """Level-set statistic for multilinear commutators with exp-oscillation symbols."""
    rep = SuiteReport("endpoint")
    spec = cfg.kernel_spec()
    r_tuple = [float(r) for r in cfg.endpoint.get("r", [1.0])]
    k = int(cfg.endpoint.get("k", len(r_tuple)))
    if k != len(r_tuple):
        raise ValueError("endpoint needs one exponent r_i per symbol")
    for n, space in _spaces(cfg, cfg.ladder):
        K = kernel_matrix(spec, space)
        bs = _profiles(
            space, k, lambda b: osc_exp_norm(space, b, r_tuple[0]), 1.0
        )
        b_norms = [osc_exp_norm(space, b, ri) for b, ri in zip(bs, r_tuple)]
        fams = _test_family(cfg, space)
        best, wit = 0.0, ""
        for i, f in enumerate(fams):
            tb = multilinear_commutator(bs, spec, space, f, K)
            top = float(np.max(np.abs(tb)))
            if top == 0.0:
                continue
            for lam in top * np.geomspace(3e-3, 0.9, 13):
                lhs = float(np.sum(space.w[np.abs(tb) > lam]))
                if lhs == 0.0:
                    continue
                rhs = endpoint_rhs(space, f, float(lam), r_tuple, b_norms)
                val = lhs / rhs
                if val > best:
                    best, wit = val, f"f#{i}@lam={lam:.4g}"
        rep.add("ladder", n, f"endpoint_k{k}", best, wit)
    return rep


def local_kernel_integral_stat(space, alpha: float, diagonal: str = "exclude"):
    """max over canonical balls of the in-ball kernel integral over lambda(x, r)^alpha."""
    from ..kernels import KernelSpec, atom_radii

    K = kernel_matrix(KernelSpec(alpha=alpha, diagonal=diagonal), space)
    best, witness = 0.0, None
    r_atom = atom_radii(space)
    for c in range(space.n):
        ix = space.index(c)
        row = K[c] * space.w
        if diagonal == "exclude":
            row[c] = 0.0
        cum = np.concatenate(([0.0], np.cumsum(row[ix.order])))
        m = len(ix.dvals) - 1
        radii = [ix.inner[kk] for kk in range(m + 1)] + [ix.outer[kk] for kk in range(m)]
        radii = np.asarray(sorted(radii))
        nums = cum[np.searchsorted(ix.sdist, radii, side="left")]
        vals = nums / np.asarray(dominating_at(space, c, radii), dtype=float) ** alpha
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, witness = float(vals[j]), (c, float(radii[j]))
    return best, witness


def suite_welland(cfg: ExperimentConfig) -> SuiteReport:
    """Pointwise geometric-mean domination of the fractional integral, and the
    local kernel-integral bound, across the light ladder."""
    rep = SuiteReport("welland")
    alpha = cfg.alpha
    eps = float(cfg.welland.get("epsilon", 0.25))
    if not 0 < eps < min(alpha, 1 - alpha):
        raise ValueError("epsilon must lie in (0, min(alpha, 1 - alpha))")
    spec = cfg.kernel_spec()
    for n, space in _spaces(cfg, cfg.light_ladder):
        wrd = check_weak_reverse_doubling(space, eps)
        rep.note(f"n={n}: weak reverse doubling at eps={eps:g}: converges={wrd.converges}")
        K = kernel_matrix(spec, space)
        fams = _test_family(cfg, space)
        best, wit = 0.0, ""
        for i, f in enumerate(fams):
            out = np.abs(K @ (f * space.w))
            plus = fractional_maximal(space, f, 1.0, 6.0, alpha + eps)
            minus = fractional_maximal(space, f, 1.0, 6.0, alpha - eps)
            prod = plus * minus
            ok = prod > 0
            if not np.any(ok):
                continue
            vals = out[ok] / np.sqrt(prod[ok])
            j = int(np.argmax(vals))
            if vals[j] > best:
                best, wit = float(vals[j]), f"f#{i}@x={np.flatnonzero(ok)[j]}"
        rep.add("ladder", n, "geometric_mean_domination", best, wit)
        stat, witness = local_kernel_integral_stat(space, alpha, spec.diagonal)
        rep.add("ladder", n, "local_kernel_integral", stat, str(witness))
    return rep


def suite_mean_zero_domination(cfg: ExperimentConfig) -> SuiteReport:
    """||N f||_p over ||sharp f||_p for mean-zero families (finite total mass branch)."""
    rep = SuiteReport("mean_zero_domination")
    alpha = cfg.alpha
    p = 2.0
    for n, space in _spaces(cfg, cfg.ladder):
        fams = _test_family(cfg, space, mean_zero=True)
        best, wit = 0.0, ""
        for i, f in enumerate(fams):
            den = lp_norm(space, sharp_maximal(space, f, alpha), p)
            if den == 0.0:
                continue
            val = lp_norm(space, doubling_maximal(space, f), p) / den
            if val > best:
                best, wit = val, f"f#{i}"
        rep.add("ladder", n, "doubling_over_sharp", best, wit)
    return rep


SUITES = {
    "boundedness": suite_boundedness,
    "commutators": suite_commutators,
    "endpoint": suite_endpoint,
    "welland": suite_welland,
    "mean_zero_domination": suite_mean_zero_domination,
}


def run_suites(cfg: ExperimentConfig) -> list[SuiteReport]:
    reports = []
    for name in cfg.suites:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
        reports.append(SUITES[name](cfg))
    return reports
