"""Dense application of kernel operators, commutators, and the multilinear algebra."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .kernels import KernelSpec, kernel_matrix
from .space import Space

__all__ = [
    "as_function",
    "SigmaSubset",
    "apply_operator",
    "fractional_integral",
    "commutator",
    "multilinear_commutator",
    "index_subsets",
    "commutator_expansion",
]


def as_function(space: Space, values) -> np.ndarray:
    """Validate one real value per point and return a float vector."""
    f = np.asarray(values, dtype=float)
    if f.shape != (space.n,):
        raise ValueError(f"function has shape {f.shape}, expected ({space.n},)")
    if not np.all(np.isfinite(f)):
        raise ValueError("function values must be finite")
    return f


def apply_operator(spec: KernelSpec, space: Space, f, K: np.ndarray | None = None) -> np.ndarray:
    """g(x) = sum_y K(x, y) f(y) w(y), dense O(n^2) summation."""
    f = as_function(space, f)
    if K is None:
        K = kernel_matrix(spec, space)
    return K @ (f * space.w)


def fractional_integral(space: Space, f, alpha: float, diagonal: str = "exclude") -> np.ndarray:
    """Apply the canonical kernel lambda(y, d(x,y))^(alpha - 1)."""
    spec = KernelSpec(alpha=alpha, variant="frac_integral", diagonal=diagonal)
    return apply_operator(spec, space, f)


def commutator(b, spec: KernelSpec, space: Space, f, K: np.ndarray | None = None) -> np.ndarray:
    """b * (T f) - T(b f)."""
    b = as_function(space, b)
    f = as_function(space, f)
    if K is None:
        K = kernel_matrix(spec, space)
    return b * apply_operator(spec, space, f, K) - apply_operator(spec, space, b * f, K)


def multilinear_commutator(
    bs, spec: KernelSpec, space: Space, f, K: np.ndarray | None = None
) -> np.ndarray:
    """Iterated commutator: bracket with bs[0] innermost, then bs[1], ..."""
    if len(bs) == 0:
        raise ValueError("multilinear commutator needs at least one symbol")
    if K is None:
        K = kernel_matrix(spec, space)

    def apply_level(j: int, g: np.ndarray) -> np.ndarray:
        if j == 0:
            return K @ (g * space.w)
        b = as_function(space, bs[j - 1])
        return b * apply_level(j - 1, g) - apply_level(j - 1, b * g)

    return apply_level(len(bs), as_function(space, f))


@dataclass(frozen=True)
class SigmaSubset:
    """A subset of {1..k} with its complement, for the multilinear expansion."""

    k: int
    indices: tuple[int, ...]

    @property
    def complement(self) -> tuple[int, ...]:
        inside = set(self.indices)
        return tuple(i for i in range(1, self.k + 1) if i not in inside)


def index_subsets(k: int, i: int) -> list[SigmaSubset]:
    """All size-i subsets of {1..k} in lexicographic order."""
    if not 0 <= i <= k:
        raise ValueError(f"subset size {i} out of range for k={k}")
    return [SigmaSubset(k, sigma) for sigma in combinations(range(1, k + 1), i)]


def commutator_expansion(
    bs, spec: KernelSpec, space: Space, f, means, K: np.ndarray | None = None
) -> np.ndarray:
    """Expansion of the multilinear commutator around fixed per-symbol means.

    Evaluates T(prod_i (m_i - b_i) f) minus, for every nonempty subset sigma,
    prod_{j in sigma} (m_j - b_j(x)) times the commutator nested over the
    complement; the empty-complement term uses T applied to |f|.  Agrees with
    the nested definition exactly when f is nonnegative.
    """
    k = len(bs)
    if len(means) != k:
        raise ValueError("one mean per symbol required")
    f = as_function(space, f)
    bs = [as_function(space, b) for b in bs]
    if K is None:
        K = kernel_matrix(spec, space)

    prod = f.copy()
    for m, b in zip(means, bs):
        prod *= m - b
    out = K @ (prod * space.w)
    for i in range(1, k + 1):
        for sigma in index_subsets(k, i):
            factor = np.ones(space.n)
            for j in sigma.indices:
                factor *= means[j - 1] - bs[j - 1]
            comp = sigma.complement
            if comp:
                nested = multilinear_commutator([bs[j - 1] for j in comp], spec, space, f, K)
            else:
                nested = K @ (np.abs(f) * space.w)
            out -= factor * nested
    return out
