"""Fractional integral operators: admissibility fits and norm statistics.

Fits the size and smoothness constants of the canonical order-1/2 kernel on
a refinement ladder, applies the operator to indicator and bump families,
and tracks how the strong- and weak-type norm statistics behave as the grid
doubles.  Bounded growth is the discrete face of the boundedness theorems.
"""

import numpy as np

from fracspace import (
    FixtureSpec,
    KernelSpec,
    check_size_condition,
    check_smoothness_condition,
    check_weak_growth,
    make_function_family,
    make_space,
)
from fracspace.kernels import kernel_matrix
from fracspace.harness.stats import estimate_operator_norm, weak_type_statistic

alpha = 0.5
spec = KernelSpec(alpha=alpha)

print(f"order alpha = {alpha}; target exponents p = 3/2 -> q = 6, weak: 1 -> 2")
print()
prev_strong = prev_weak = None
for n in (64, 128, 256):
    space = make_space(FixtureSpec("dyadic_line", n=n))
    size = check_size_condition(spec, space)
    _, eps, _ = check_weak_growth(space)
    delta = eps * (1 - alpha)
    smooth = check_smoothness_condition(spec, space, delta_grid=(delta,))
    K = kernel_matrix(spec, space)
    fams = make_function_family(space, "indicators", 10) + make_function_family(space, "bumps", 6)
    op = lambda f: K @ (f * space.w)
    strong, _ = estimate_operator_norm(space, op, 1.5, 6.0, fams)
    weak, _ = weak_type_statistic(space, op, 1.0, 2.0, fams)
    line = (
        f"n={n:4d}  size C={size.C_size:.4g}  smooth C(delta={delta:g})="
        f"{smooth.smooth_table[delta]:.4g}  strong={strong:.5g}  weak={weak:.5g}"
    )
    if prev_strong is not None:
        line += f"  growth {(strong / prev_strong - 1) * 100:+.1f}% / {(weak / prev_weak - 1) * 100:+.1f}%"
    print(line)
    prev_strong, prev_weak = strong, weak

print()
print("pointwise geometric-mean domination of the fractional integral (three points):")
from fracspace import fractional_integral, fractional_maximal, s3

space = s3()
f = np.array([1.0, 0.0, 0.0])
i_val = fractional_integral(space, f, alpha)[1]
plus = fractional_maximal(space, f, 1.0, 6.0, alpha + 0.25)[1]
minus = fractional_maximal(space, f, 1.0, 6.0, alpha - 0.25)[1]
print(f"|I f|(x1) = {abs(i_val):.5f}, maximal pair = ({plus:.5f}, {minus:.5f})")
print(f"ratio = {abs(i_val) / np.sqrt(plus * minus):.5f}  (sqrt(3/2) = {np.sqrt(1.5):.5f})")
