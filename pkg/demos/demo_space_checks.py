"""Walk through building spaces and fitting their structural constants.

Builds the canonical three-point fixture, a dyadic line, a middle-thirds
point set and a Bergman-type complex-ball sample, then runs every structural
check: mass domination by the dominating function, the halving constant, the
center-regularity constant, the covering number, weak reverse doubling, and
the weak growth rate.
"""

import numpy as np

from fracspace import (
    FixtureSpec,
    check_geometric_doubling,
    check_lambda_regularity,
    check_upper_doubling,
    check_weak_growth,
    check_weak_reverse_doubling,
    make_space,
    s3,
)

fixtures = {
    "three collinear points": s3(),
    "dyadic line, 64 points": make_space(FixtureSpec("dyadic_line", n=64)),
    "middle-thirds set, level 5": make_space(FixtureSpec("cantor", level=5, c0=1.5)),
    "complex-ball sample, 24 points": make_space(FixtureSpec("complex_ball", n=24, m=1.0, seed=7)),
}

for name, space in fixtures.items():
    print(f"== {name}: {space.n} points, total mass {space.total_mass:.6g}")
    upper = check_upper_doubling(space)
    print(f"   mass domination: {'ok' if upper.passed else upper.violations[:2]}")
    print(f"   halving constant C = {upper.C_lambda:.6g} (witness {upper.witness})")
    reg, reg_wit = check_lambda_regularity(space)
    print(f"   center regularity constant = {reg:.6g}")
    n0, wit = check_geometric_doubling(space)
    print(f"   covering number N0 = {n0} -> dimension log2(N0) = {np.log2(n0):.4g}")
    wrd = check_weak_reverse_doubling(space, epsilon=0.5)
    cs = ", ".join(f"C({a:g}) = {c:.4g}" for a, c in wrd.table.items())
    print(f"   reverse doubling: {cs}; tail converges: {wrd.converges}")
    c, eps, _ = check_weak_growth(space)
    print(f"   weak growth: rate {eps:g} with constant {c:.4g}")
    print()
