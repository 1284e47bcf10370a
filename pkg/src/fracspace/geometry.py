"""Ball arithmetic: doubling-ball search, nesting coefficients, greedy selection.

The nesting coefficients measure how much mass sits between two nested balls,
weighted against the dominating function.  ``gap_coefficient`` integrates over
the shell between the inner ball and the doubled outer ball;
``shell_coefficient`` sums over six-adic dilates of the inner ball; the
fractional variant raises each shell term to the power 1 - alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .space import Ball, Space, dominating_at

__all__ = [
    "CoefficientValue",
    "doubling_threshold",
    "smallest_doubling_ball",
    "gap_coefficient",
    "shell_coefficient",
    "fractional_shell_coefficient",
    "shell_count",
    "vitali_select",
]


@dataclass
class CoefficientValue:
    """A nesting coefficient with its audit trace."""

    value: float
    shells: int = 0  # number of six-adic shells (0 for the integral form)
    terms: list = field(default_factory=list)

    def trace_rows(self, b: Ball, s: Ball) -> list[dict]:
        rows = []
        for k, term in enumerate(self.terms, start=1):
            rows.append(
                {
                    "b_center": b.center,
                    "b_radius": b.radius,
                    "s_center": s.center,
                    "s_radius": s.radius,
                    "shells": self.shells,
                    "k": k,
                    "term": term,
                    "value": self.value,
                }
            )
        return rows


def doubling_threshold(eta: float, n: float, nu: float) -> float:
    """Mass-ratio threshold eta^(3 max(n, nu)) + 30^n + 30^nu for eta-dilates."""
    if eta <= 1:
        raise ValueError("eta must exceed 1")
    return eta ** (3.0 * max(n, nu)) + 30.0 ** n + 30.0 ** nu


def smallest_doubling_ball(space: Space, ball: Ball, eta: float, beta: float) -> Ball:
    """Smallest dilate eta^j * B (j >= 0) with mu(eta B') <= beta mu(B')."""
    if eta <= 1 or beta <= 1:
        raise ValueError("eta and beta must exceed 1")
    r = ball.radius
    total = space.total_mass
    while True:
        mass = space.mu_open(ball.center, r)
        if space.mu_open(ball.center, r * eta) <= beta * mass:
            return Ball(ball.center, r)
        if mass >= total:  # cannot happen: the full ball dilates to itself
            return Ball(ball.center, r)
        r *= eta


def _require_nested(space: Space, b: Ball, s: Ball, containment: str = "geometric"):
    if containment == "geometric":
        if not space.nested_geometric(b, s):
            raise ValueError(
                f"balls not nested: d(centers) + r_b = "
                f"{space.D[b.center, s.center] + b.radius} > r_s = {s.radius}"
            )
    elif containment == "sets":
        if not space.nested_sets(b, s):
            raise ValueError("balls not nested: realized sets are not contained")
    else:
        raise ValueError(f"unknown containment mode {containment!r}")


def gap_coefficient(space: Space, b: Ball, s: Ball, containment: str = "geometric") -> CoefficientValue:
    """1 + sum over 2S minus B of w(y) / lambda(c_B, d(y, c_B)).

    containment selects the nesting precondition: center-radius arithmetic
    ("geometric", the default used by coefficient formulas) or realized-set
    containment ("sets", used by the atomic-block conditions).
    """
    _require_nested(space, b, s, containment)
    in_2s = space.ball_mask(s.dilate(2.0))
    in_b = space.ball_mask(b)
    sel = in_2s & ~in_b
    idx = np.flatnonzero(sel)
    if len(idx) == 0:
        return CoefficientValue(1.0)
    dists = space.D[b.center, idx]
    terms = space.w[idx] / np.asarray(dominating_at(space, b.center, dists), dtype=float)
    return CoefficientValue(1.0 + float(np.sum(terms)), 0, list(map(float, terms)))


def shell_count(r_b: float, r_s: float) -> int:
    """Smallest integer N with 6^N * r_b >= r_s."""
    count, v = 0, r_b
    while v < r_s:
        v *= 6.0
        count += 1
        if count > 4096:
            raise ValueError("shell count diverged; check the radii")
    return count


def _shell_terms(space: Space, b: Ball, s: Ball) -> tuple[int, np.ndarray]:
    n_shells = shell_count(b.radius, s.radius)
    if n_shells == 0:
        return 0, np.zeros(0)
    radii = b.radius * 6.0 ** np.arange(1, n_shells + 1)
    masses = np.asarray(space.mu_open(b.center, radii), dtype=float)
    lams = np.asarray(dominating_at(space, b.center, radii), dtype=float)
    return n_shells, masses / lams


def shell_coefficient(space: Space, b: Ball, s: Ball) -> CoefficientValue:
    """1 + sum over six-adic dilates 6^k B of mu(6^k B) / lambda(c_B, 6^k r_B)."""
    _require_nested(space, b, s)
    if s.radius < b.radius:
        raise ValueError("outer radius smaller than inner radius")
    n_shells, terms = _shell_terms(space, b, s)
    return CoefficientValue(1.0 + float(np.sum(terms)), n_shells, list(map(float, terms)))


def fractional_shell_coefficient(space: Space, b: Ball, s: Ball, alpha: float) -> CoefficientValue:
    """Shell coefficient with every shell term raised to the power 1 - alpha."""
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    _require_nested(space, b, s)
    if s.radius < b.radius:
        raise ValueError("outer radius smaller than inner radius")
    n_shells, terms = _shell_terms(space, b, s)
    terms = terms ** (1.0 - alpha)
    return CoefficientValue(1.0 + float(np.sum(terms)), n_shells, list(map(float, terms)))


def vitali_select(space: Space, balls: list[Ball], dilation: float = 1.0) -> list[Ball]:
    """Greedy disjoint subfamily: descending radius, ties by center then radius.

    Every input ball's realized set meets some kept ball of radius at least its
    own, so the dilates of the kept family cover the union of the inputs.
    """
    if dilation < 1.0:
        raise ValueError("dilation must be at least 1")
    order = sorted(range(len(balls)), key=lambda i: (-balls[i].radius, balls[i].center, i))
    kept: list[Ball] = []
    covered = np.zeros(space.n, dtype=bool)
    for i in order:
        mask = space.ball_mask(balls[i])
        if not np.any(mask & covered):
            kept.append(balls[i])
            covered |= mask
    return kept
