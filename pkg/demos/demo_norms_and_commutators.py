"""Oscillation norms, Orlicz machinery, and commutator statistics.

Computes the regularized oscillation norm and its exponential refinement for
a profile symbol, builds the Orlicz target space of the order-1/2 operator,
and compares the Lebesgue and Orlicz routes to the same commutator statistic.
Ends with the endpoint level-set ratio for the commutator.
"""

import numpy as np

from fracspace import (
    FixtureSpec,
    KernelSpec,
    Power,
    commutator,
    lp_norm,
    luxemburg_norm,
    make_function_family,
    make_space,
    multilinear_commutator,
    orlicz_indices,
    osc_exp_norm,
    rbmo_norm,
    target_orlicz,
)
from fracspace.harness.suites import endpoint_rhs

alpha, p = 0.5, 1.5
q = 1.0 / (1.0 / p - alpha)
spec = KernelSpec(alpha=alpha)
space = make_space(FixtureSpec("dyadic_line", n=96))

# a deterministic symbol, scaled to unit oscillation norm
b = np.sin(2 * np.pi * space.D[:, 0] / space.diameter)
b = b / rbmo_norm(space, b).value
print(f"symbol: rbmo = {rbmo_norm(space, b).value:.6g}, exp-oscillation = {osc_exp_norm(space, b, 1.0):.6g}")

phi = Power(p)
psi = target_orlicz(phi, alpha)
print(f"orlicz indices: {orlicz_indices(phi)} -> target {orlicz_indices(psi)} (expect ({q:g}, {q:g}))")
print()

fams = make_function_family(space, "indicators", 8) + make_function_family(space, "bumps", 4)
best_leb = best_orl = 0.0
for f in fams:
    den = lp_norm(space, f, p)
    if den == 0:
        continue
    cf = commutator(b, spec, space, f)
    best_leb = max(best_leb, lp_norm(space, cf, q) / den)
    best_orl = max(best_orl, luxemburg_norm(space, cf, psi) / luxemburg_norm(space, f, phi))
print(f"commutator statistic, Lebesgue route: {best_leb:.6g}")
print(f"commutator statistic, Orlicz route:   {best_orl:.6g}")
print(f"(the two routes agree to {abs(best_leb - best_orl) / best_leb:.2e} for power-type functions)")
print()

f = fams[3]
tb = multilinear_commutator([b], spec, space, f)
print("endpoint level-set ratios (k = 1, r = 1):")
for lam in np.max(np.abs(tb)) * np.array([0.02, 0.1, 0.4]):
    lhs = float(np.sum(space.w[np.abs(tb) > lam]))
    rhs = endpoint_rhs(space, f, float(lam), [1.0], [osc_exp_norm(space, b, 1.0)])
    print(f"  level {lam:9.4g}: measure above level = {lhs:.5g}, bound = {rhs:.5g}, ratio = {lhs / rhs:.4g}")
