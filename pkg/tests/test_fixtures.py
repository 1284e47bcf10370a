import numpy as np
import pytest

from fracspace import (
    FixtureSpec,
    check_upper_doubling,
    lp_norm,
    make_function_family,
    make_space,
    s3,
)


class TestMakeSpace:
    def test_s3_coincides_with_unit_spacing_line(self):
        space = make_space(FixtureSpec("dyadic_line", n=3, spacing=1.0, point_mass=1.0))
        ref = s3()
        assert np.array_equal(space.D, ref.D)
        assert np.array_equal(space.w, ref.w)

    def test_line_passes_mass_domination_at_generation(self):
        for n in (2, 9, 33):
            space = make_space(FixtureSpec("dyadic_line", n=n))
            assert check_upper_doubling(space).passed

    def test_cantor_kappa_and_domination(self):
        space = make_space(FixtureSpec("cantor", level=4, c0=1.5))
        assert space.n == 16
        assert space.lam.kappa == pytest.approx(np.log(2) / np.log(3))
        assert check_upper_doubling(space).passed

    def test_complex_ball_single_point(self):
        space = make_space(FixtureSpec("complex_ball", n=1, m=1.0, seed=0))
        assert space.n == 1

    def test_complex_ball_quasi_metric_formula(self):
        space = make_space(FixtureSpec("complex_ball", n=6, m=1.0, seed=1))
        x, y = space.coords[0], space.coords[1]
        mx, my = abs(np.linalg.norm(x)), abs(np.linalg.norm(y))
        want = abs(mx - my) + abs(1.0 - np.vdot(x, y) / (mx * my))
        assert space.D[0, 1] == pytest.approx(want)

    def test_random_metric_measure_lambda(self):
        space = make_space(FixtureSpec("random_metric", n=12, seed=3, lam="measure"))
        assert check_upper_doubling(space).passed

    def test_reproducibility_bitwise(self):
        a = make_space(FixtureSpec("random_metric", n=10, seed=9))
        b = make_space(FixtureSpec("random_metric", n=10, seed=9))
        assert np.array_equal(a.D, b.D)
        assert np.array_equal(a.w, b.w)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown fixture"):
            make_space(FixtureSpec("torus", n=4))


class TestFunctionFamilies:
    def test_s3_indicator_family_is_all_six_sets(self, space3):
        fams = make_function_family(space3, "indicators", 10)
        assert len(fams) == 6
        sets = {tuple(np.flatnonzero(f)) for f in fams}
        assert sets == {(0,), (1,), (2,), (0, 1), (1, 2), (0, 1, 2)}

    def test_mean_zero_variant_of_constant_is_zero(self, space3):
        fams = make_function_family(space3, "bumps_mean_zero", 3)
        for f in fams:
            assert abs(np.sum(f * space3.w)) <= 1e-12

    def test_normalized_atoms(self, space3):
        for f in make_function_family(space3, "lp_atoms", 6):
            assert lp_norm(space3, f, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_reproducibility(self, space3):
        a = make_function_family(space3, "random", 5, seed=3)
        b = make_function_family(space3, "random", 5, seed=3)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_unknown_tag(self, space3):
        with pytest.raises(ValueError, match="unknown family"):
            make_function_family(space3, "wavelets", 3)

    def test_count_positive(self, space3):
        with pytest.raises(ValueError):
            make_function_family(space3, "random", 0)
