import numpy as np
import pytest

from fracspace import (
    Ball,
    doubling_threshold,
    fractional_shell_coefficient,
    gap_coefficient,
    shell_coefficient,
    smallest_doubling_ball,
    vitali_select,
)

from brute import brute_gap_coefficient, brute_shell_coefficient, canonical_balls


class TestDoublingSearch:
    def test_s3_growth_until_doubling(self, space3):
        found = smallest_doubling_ball(space3, Ball(1, 0.5), eta=6.0, beta=2.0)
        assert found == Ball(1, 3.0)

    def test_whole_space_ball_is_its_own_dilate(self, space3):
        ball = Ball(1, 10.0)
        assert smallest_doubling_ball(space3, ball, 6.0, 2.0) == ball

    def test_single_point(self):
        from fracspace import load_space

        space = load_space(
            {
                "points": [{"id": 0}],
                "metric": {"type": "matrix", "values": [[0.0]]},
                "weights": [1.0],
                "lambda": {"type": "power", "c0": 1.0, "kappa": 1.0},
            }
        )
        ball = Ball(0, 1.0)
        assert smallest_doubling_ball(space, ball, 6.0, 1.5) == ball


class TestDoublingThreshold:
    @pytest.mark.parametrize(
        "eta,n,nu,expected",
        [(6.0, 1.0, 1.0, 276.0), (6.0, 0.0, 0.0, 3.0), (2.0, 1.0, 2.0, 994.0)],
    )
    def test_values(self, eta, n, nu, expected):
        assert doubling_threshold(eta, n, nu) == pytest.approx(expected)

    def test_requires_eta_above_one(self):
        with pytest.raises(ValueError):
            doubling_threshold(1.0, 1.0, 1.0)


class TestGapCoefficient:
    def test_s3_hand_value(self, space3):
        coeff = gap_coefficient(space3, Ball(1, 0.5), Ball(1, 1.5))
        assert coeff.value == pytest.approx(2.0)

    def test_equal_balls_give_one(self, space3):
        whole = Ball(1, 50.0)
        assert gap_coefficient(space3, whole, whole).value == 1.0

    def test_single_point(self):
        from fracspace import load_space

        space = load_space(
            {
                "points": [{"id": 0}],
                "metric": {"type": "matrix", "values": [[0.0]]},
                "weights": [1.0],
                "lambda": {"type": "power", "c0": 1.0, "kappa": 1.0},
            }
        )
        assert gap_coefficient(space, Ball(0, 1.0), Ball(0, 1.0)).value == 1.0

    def test_nesting_required(self, space3):
        with pytest.raises(ValueError, match="nested"):
            gap_coefficient(space3, Ball(0, 2.0), Ball(2, 1.0))


class TestShellCoefficient:
    def test_s3_one_shell(self, space3):
        coeff = shell_coefficient(space3, Ball(1, 0.5), Ball(1, 1.5))
        assert coeff.shells == 1
        assert coeff.value == pytest.approx(1.5)

    def test_equal_radii_empty_sum(self, space3):
        coeff = shell_coefficient(space3, Ball(1, 0.5), Ball(1, 0.5))
        assert coeff.shells == 0 and coeff.value == 1.0

    def test_s3_two_shells(self, space3):
        coeff = shell_coefficient(space3, Ball(1, 0.5), Ball(1, 18.0))
        assert coeff.shells == 2
        assert coeff.value == pytest.approx(1.0 + 0.5 + 3.0 / 36.0)

    def test_fractional_midpoint(self, space3):
        coeff = fractional_shell_coefficient(space3, Ball(1, 0.5), Ball(1, 1.5), 0.5)
        assert coeff.value == pytest.approx(1.0 + 0.5 ** 0.5)

    def test_alpha_zero_matches_plain(self, small_spaces):
        for space in small_spaces[:6]:
            balls = canonical_balls(space)
            for b in balls[:8]:
                s = Ball(b.center, 7.0 * b.radius)
                plain = shell_coefficient(space, b, s).value
                frac = fractional_shell_coefficient(space, b, s, 0.0).value
                assert abs(plain - frac) <= 1e-12 * plain

    def test_alpha_range(self, space3):
        with pytest.raises(ValueError):
            fractional_shell_coefficient(space3, Ball(1, 0.5), Ball(1, 1.5), 1.0)


def nested_triples(space, rng, count):
    """Random nested triples (geometric nesting) from the canonical family."""
    balls = canonical_balls(space)
    triples = []
    attempts = 0
    while len(triples) < count and attempts < 60 * count:
        attempts += 1
        b = balls[rng.integers(0, len(balls))]
        concentric = attempts % 2 == 0
        if concentric:
            r = Ball(b.center, b.radius * float(rng.uniform(1.0, 4.0)))
            s = Ball(b.center, r.radius * float(rng.uniform(1.0, 4.0)))
        else:
            c2 = int(rng.integers(0, space.n))
            r = Ball(c2, float(space.D[b.center, c2]) + b.radius * float(rng.uniform(1.0, 3.0)))
            c3 = int(rng.integers(0, space.n))
            s = Ball(c3, float(space.D[r.center, c3]) + r.radius * float(rng.uniform(1.0, 3.0)))
        if space.nested_geometric(b, r) and space.nested_geometric(r, s):
            triples.append((b, r, s, concentric))
    return triples


class TestCoefficientProperties:
    def test_monotone_in_outer_ball(self, small_spaces):
        rng = np.random.default_rng(7)
        for space in small_spaces:
            for b, r, s, _ in nested_triples(space, rng, 40):
                assert gap_coefficient(space, b, r).value <= gap_coefficient(space, b, s).value

    def test_concentric_triangle_with_unit_constant(self, small_spaces):
        rng = np.random.default_rng(8)
        for space in small_spaces:
            for b, r, s, concentric in nested_triples(space, rng, 40):
                if not concentric:
                    continue
                k_bs = gap_coefficient(space, b, s).value
                k_br = gap_coefficient(space, b, r).value
                k_rs = gap_coefficient(space, r, s).value
                assert k_bs <= k_br + k_rs

    def test_concentric_outer_pair_dominates(self, small_spaces):
        rng = np.random.default_rng(9)
        for space in small_spaces:
            for b, r, s, concentric in nested_triples(space, rng, 40):
                if not concentric:
                    continue
                assert gap_coefficient(space, r, s).value <= gap_coefficient(space, b, s).value

    def test_fractional_two_bound(self, small_spaces):
        rng = np.random.default_rng(10)
        for space in small_spaces:
            for b, r, s, _ in nested_triples(space, rng, 25):
                for alpha in (0.0, 0.25, 0.5, 0.75):
                    kr = fractional_shell_coefficient(space, b, r, alpha).value
                    ks = fractional_shell_coefficient(space, b, s, alpha).value
                    assert kr <= 2.0 * ks

    def test_gap_dominated_by_shell_ratio_recorded(self, space3):
        # regression guard: the fitted ratio max K / Ktilde on the S3 family
        rng = np.random.default_rng(11)
        worst = 0.0
        for b, r, s, _ in nested_triples(space3, rng, 60):
            worst = max(worst, gap_coefficient(space3, b, s).value / shell_coefficient(space3, b, s).value)
        assert worst <= 1.61


class TestBruteForceAgreement:
    def test_gap_and_shell_match_oracle(self, small_spaces):
        rng = np.random.default_rng(12)
        for space in small_spaces:
            for b, r, s, _ in nested_triples(space, rng, 15):
                got = gap_coefficient(space, b, s).value
                want = brute_gap_coefficient(space, b, s)
                assert got == pytest.approx(want, rel=1e-12)
                got = shell_coefficient(space, b, s).value
                want = brute_shell_coefficient(space, b, s)
                assert got == pytest.approx(want, rel=1e-12)
                got = fractional_shell_coefficient(space, b, s, 0.5).value
                want = brute_shell_coefficient(space, b, s, 0.5)
                assert got == pytest.approx(want, rel=1e-12)


class TestVitali:
    def test_disjoint_inputs_all_kept(self, space3):
        balls = [Ball(0, 0.5), Ball(2, 0.5)]
        assert vitali_select(space3, balls) == balls

    def test_duplicate_kept_once(self, space3):
        balls = [Ball(1, 1.5), Ball(1, 1.5)]
        assert vitali_select(space3, balls) == [Ball(1, 1.5)]

    def test_greedy_pass_on_overlapping_family(self, space3):
        # all three realized sets share point 1, so only the first survives
        balls = [Ball(0, 1.5), Ball(1, 1.5), Ball(2, 1.5)]
        assert vitali_select(space3, balls) == [Ball(0, 1.5)]

    def test_output_pairwise_disjoint(self, small_spaces):
        rng = np.random.default_rng(13)
        for space in small_spaces:
            balls = canonical_balls(space)
            picks = [balls[rng.integers(0, len(balls))] for _ in range(min(12, len(balls)))]
            kept = vitali_select(space, picks)
            masks = [space.ball_mask(b) for b in kept]
            for i in range(len(masks)):
                for j in range(i + 1, len(masks)):
                    assert not np.any(masks[i] & masks[j])

    def test_every_input_meets_a_kept_ball_of_larger_radius(self, small_spaces):
        rng = np.random.default_rng(14)
        for space in small_spaces:
            balls = canonical_balls(space)
            picks = [balls[rng.integers(0, len(balls))] for _ in range(min(12, len(balls)))]
            kept = vitali_select(space, picks)
            for b in picks:
                mask = space.ball_mask(b)
                assert any(
                    np.any(mask & space.ball_mask(k)) and k.radius >= b.radius for k in kept
                )

    def test_empty_input(self, space3):
        assert vitali_select(space3, []) == []
