"""Fractional-order kernels and numerical admissibility checks.

A kernel of order alpha is admissible when it obeys the size bound
|K(x,y)| <= C / lambda(x, d(x,y))^(1-alpha) and a Hoelder-type smoothness
bound on separated triples.  Both constants are fitted by sweeping the space,
never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .space import Space, dominating_at

__all__ = [
    "KernelSpec",
    "KernelFit",
    "eval_kernel",
    "kernel_matrix",
    "atom_radii",
    "check_size_condition",
    "check_smoothness_condition",
]

_SEPARATION = 2.0  # admissible triples satisfy d(x, y) >= 2 d(x, xt)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family: 'frac_integral', 'bergman', or 'custom'.

    diagonal: 'exclude' zeroes K(x, x); 'atom_radius' evaluates the
    frac-integral kernel at half the nearest-neighbor distance.  The
    bergman kernel is complex-derived and applied through its modulus,
    so operators stay real on real functions.
    """

    alpha: float
    variant: str = "frac_integral"
    m: float | None = None  # bergman exponent
    matrix: np.ndarray | None = None  # custom values, zero diagonal
    diagonal: str = "exclude"

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("kernel order alpha must lie in (0, 1)")
        if self.variant not in ("frac_integral", "bergman", "custom"):
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.variant == "bergman" and (self.m is None or self.m <= 0):
            raise ValueError("bergman kernel needs m > 0")
        if self.variant == "custom":
            mat = np.asarray(self.matrix, dtype=float)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise ValueError("custom kernel needs a square matrix")
            if np.any(np.diag(mat) != 0):
                raise ValueError("custom kernel matrix must have zero diagonal")
            object.__setattr__(self, "matrix", mat)
        if self.diagonal not in ("exclude", "atom_radius"):
            raise ValueError(f"unknown diagonal convention {self.diagonal!r}")


def atom_radii(space: Space) -> np.ndarray:
    """Half the nearest-neighbor distance per point (diagonal surrogate radius)."""
    off = space.D + np.diag(np.full(space.n, np.inf))
    return 0.5 * np.min(off, axis=1) if space.n > 1 else np.ones(1)


def kernel_matrix(spec: KernelSpec, space: Space) -> np.ndarray:
    """Dense kernel matrix under the requested diagonal convention."""
    n = space.n
    if spec.variant == "custom":
        if spec.matrix.shape != (n, n):
            raise ValueError("custom kernel matrix does not match the space size")
        return np.array(spec.matrix)
    if spec.variant == "bergman":
        if space.coords is None or not np.iscomplexobj(space.coords):
            raise ValueError("bergman kernel needs complex coordinates")
        inner = space.coords.conj() @ space.coords.T
        return np.abs(1.0 - inner) ** (-spec.m * (1.0 - spec.alpha))
    # frac_integral: K(x, y) = lambda(y, d(x, y))^(alpha - 1), columns share a center
    K = np.zeros((n, n))
    for y in range(n):
        d = space.D[:, y].copy()
        d[y] = 1.0  # placeholder, overwritten below
        K[:, y] = np.asarray(dominating_at(space, y, d), dtype=float) ** (spec.alpha - 1.0)
    if spec.diagonal == "exclude":
        np.fill_diagonal(K, 0.0)
    else:
        r_atom = atom_radii(space)
        for x in range(n):
            K[x, x] = float(dominating_at(space, x, r_atom[x])) ** (spec.alpha - 1.0)
    return K


def eval_kernel(spec: KernelSpec, space: Space, x: int, y: int) -> float:
    """Single kernel value K(x, y) under the diagonal convention."""
    if x == y:
        if spec.variant == "custom":
            return 0.0
        if spec.variant == "bergman":
            inner = np.vdot(space.coords[x], space.coords[y])
            return float(np.abs(1.0 - inner) ** (-spec.m * (1.0 - spec.alpha)))
        if spec.diagonal == "exclude":
            return 0.0
        r = float(atom_radii(space)[x])
        return float(dominating_at(space, x, r)) ** (spec.alpha - 1.0)
    if spec.variant == "custom":
        return float(spec.matrix[x, y])
    if spec.variant == "bergman":
        inner = np.vdot(space.coords[x], space.coords[y])
        return float(np.abs(1.0 - inner) ** (-spec.m * (1.0 - spec.alpha)))
    return float(dominating_at(space, y, space.D[x, y])) ** (spec.alpha - 1.0)


@dataclass
class KernelFit:
    """Fitted admissibility constants with their witnesses."""

    C_size: float | None = None
    size_witness: tuple | None = None
    C_smooth: float | None = None
    delta: float | None = None
    c_K: float = _SEPARATION
    smooth_witness: tuple | None = None
    smooth_table: dict = field(default_factory=dict)


def check_size_condition(spec: KernelSpec, space: Space) -> KernelFit:
    """Exact sweep of ordered off-diagonal pairs for the size constant."""
    K = kernel_matrix(spec, space)
    n = space.n
    best, witness = 0.0, None
    for x in range(n):
        d = space.D[x].copy()
        d[x] = 1.0
        lam = np.asarray(dominating_at(space, x, d), dtype=float) ** (1.0 - spec.alpha)
        vals = np.abs(K[x]) * lam
        vals[x] = -np.inf
        y = int(np.argmax(vals))
        if vals[y] > best:
            best, witness = float(vals[y]), (x, y)
    return KernelFit(C_size=best, size_witness=witness)


def check_smoothness_condition(
    spec: KernelSpec,
    space: Space,
    delta_grid=(0.25, 0.5, 0.75, 1.0),
    budget: int = 1_000_000,
    seed: int = 0,
) -> KernelFit:
    """Fit the smoothness constant per delta over separated triples (x, xt, y).

    Exhaustive when the admissible triple count is within budget, otherwise a
    seeded uniform sample of that many triples.
    """
    if np.any(np.asarray(delta_grid) <= 0) or np.any(np.asarray(delta_grid) > 1):
        raise ValueError("delta values must lie in (0, 1]")
    K = kernel_matrix(spec, space)
    n = space.n
    fit = KernelFit()
    if n < 3:
        fit.smooth_table = {float(d): None for d in delta_grid}
        return fit

    if n ** 3 <= budget:
        xs, xts, ys = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        xs, xts, ys = xs.ravel(), xts.ravel(), ys.ravel()
    else:
        rng = np.random.default_rng(seed)
        xs = rng.integers(0, n, budget)
        xts = rng.integers(0, n, budget)
        ys = rng.integers(0, n, budget)
    d_xxt = space.D[xs, xts]
    d_xy = space.D[xs, ys]
    ok = (d_xxt > 0) & (d_xy >= _SEPARATION * d_xxt)
    xs, xts, ys, d_xxt, d_xy = xs[ok], xts[ok], ys[ok], d_xxt[ok], d_xy[ok]
    if len(xs) == 0:
        fit.smooth_table = {float(d): None for d in delta_grid}
        return fit

    lhs = np.abs(K[xs, ys] - K[xts, ys]) + np.abs(K[ys, xs] - K[ys, xts])
    lam = np.empty(len(xs))
    for x in np.unique(xs):
        sel = xs == x
        lam[sel] = np.asarray(dominating_at(space, int(x), d_xy[sel]), dtype=float)
    lam = lam ** (1.0 - spec.alpha)
    table = {}
    best_c, best_delta, best_wit = np.inf, None, None
    for delta in delta_grid:
        rhs_over_c = (d_xxt ** delta) / (d_xy ** delta * lam)
        ratio = lhs / rhs_over_c
        j = int(np.argmax(ratio))
        c = float(ratio[j])
        table[float(delta)] = c
        if c < best_c:
            best_c, best_delta = c, float(delta)
            best_wit = (int(xs[j]), int(xts[j]), int(ys[j]))
    fit.C_smooth, fit.delta, fit.smooth_witness = best_c, best_delta, best_wit
    fit.smooth_table = table
    return fit
