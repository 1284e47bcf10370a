import numpy as np
import pytest

from fracspace import FixtureSpec, make_space, s3


@pytest.fixture(scope="session")
def space3():
    return s3()


def random_small_fixtures(count: int, max_points: int = 8):
    """Deterministic mix of small spaces across every generator kind."""
    specs = []
    for i in range(count):
        kind = ("dyadic_line", "cantor", "complex_ball", "random_metric")[i % 4]
        rng = np.random.default_rng(1000 + i)
        if kind == "dyadic_line":
            specs.append(FixtureSpec(kind, n=int(rng.integers(2, max_points + 1)), c0=2.0))
        elif kind == "cantor":
            specs.append(FixtureSpec(kind, level=int(rng.integers(1, 4)), c0=1.5))
        elif kind == "complex_ball":
            specs.append(
                FixtureSpec(kind, n=int(rng.integers(1, max_points + 1)), m=float(rng.uniform(0.5, 2.0)), seed=i)
            )
        else:
            lam = "measure" if i % 8 < 4 else "power"
            specs.append(
                FixtureSpec(kind, n=int(rng.integers(2, max_points + 1)), seed=i, lam=lam, kappa=2.0)
            )
    return [make_space(s) for s in specs]


@pytest.fixture(scope="session")
def small_spaces():
    return random_small_fixtures(12)
