"""Operator-norm statistics over function families."""

from __future__ import annotations

from ..norms import lp_norm, weak_lp
from ..space import Space

__all__ = ["estimate_operator_norm", "weak_type_statistic"]


def estimate_operator_norm(space: Space, operator, p: float, q: float, family) -> tuple[float, int]:
    """max over the family of ||op f||_q / ||f||_p; zero-norm inputs skipped."""
    if len(family) == 0:
        raise ValueError("family must be non-empty")
    best, witness = 0.0, -1
    for i, f in enumerate(family):
        den = lp_norm(space, f, p)
        if den == 0.0:
            continue
        val = lp_norm(space, operator(f), q) / den
        if val > best:
            best, witness = float(val), i
    return best, witness


def weak_type_statistic(space: Space, operator, p: float, q_weak: float, family) -> tuple[float, int]:
    """max over the family of weak-L^q(op f) / L^p(f); zero-norm inputs skipped."""
    if len(family) == 0:
        raise ValueError("family must be non-empty")
    best, witness = 0.0, -1
    for i, f in enumerate(family):
        den = lp_norm(space, f, p)
        if den == 0.0:
            continue
        val = weak_lp(space, operator(f), q_weak) / den
        if val > best:
            best, witness = float(val), i
    return best, witness
