import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize, stats

from qci.distributions import ScenarioDistribution, draw, true_quantile
from qci.errors import InfeasibleSampleSize, InvalidBounds, SampleTooSmall
from qci.estimators import _tail_extrapolate, order_quantile
from qci.bootstrap import bootstrap_distribution
from qci import intervals
from qci.intervals import (
    ExactMode,
    Method,
    MetricBounds,
    _randomized_plan,
    asymptotic_ci,
    asymptotic_ci_min_n,
    asymptotic_indices,
    bootstrap_ci,
    exact_ci,
    exact_ci_feasible,
    exact_ci_min_n,
    exact_coverage,
    percentile_interval,
    t_interval,
)
from qci.kernels import normal_quantile
from qci.rng import RandomSource
from qci.sample import make_sample

EXACT_TABLE = {
    0.90: (230, 91, 45, 22, 9, 5),
    0.95: (299, 119, 59, 29, 11, 6),
    0.99: (459, 182, 90, 44, 17, 8),
}
EXACT_LEVELS = (0.01, 0.025, 0.05, 0.1, 0.25, 0.5)
ASYMPTOTIC_TABLE = {
    0.90: (446, 87, 42, 16, 7, 9, 25, 52, 268),
    0.95: (563, 110, 53, 19, 8, 12, 35, 73, 381),
    0.99: (846, 164, 79, 28, 11, 20, 60, 127, 657),
}
ASYMPTOTIC_LEVELS = (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99)


def brute_coverage(k, l, n, u):
    u = Fraction(u)
    return sum(math.comb(n, s) * u**s * (1 - u) ** (n - s) for s in range(k, l))


def lp_min_width(n, u, level):
    """Independent oracle: linear program over every index pair."""
    pairs = [(k, l) for k in range(1, n + 1) for l in range(k + 1, n + 1)]
    cov = [float(brute_coverage(k, l, n, u)) for k, l in pairs]
    res = optimize.linprog(
        c=[l - k for k, l in pairs],
        A_eq=[cov, [1.0] * len(pairs)],
        b_eq=[level, 1.0],
        bounds=(0, None),
        method="highs",
    )
    assert res.status == 0
    return res.fun


def uniform_sample(n, seed, stream):
    return make_sample(RandomSource(seed, stream).uniforms(n))


class TestExactCoverage:
    def test_hand_values(self):
        assert exact_coverage(2, 9, 10, 0.5) == pytest.approx(1002 / 1024, rel=1e-14)
        assert exact_coverage(3, 4, 5, 0.5) == pytest.approx(0.3125, rel=1e-14)

    @given(st.integers(2, 60), st.data(), st.floats(0.01, 0.99))
    def test_matches_brute_force(self, n, data, u):
        k = data.draw(st.integers(1, n - 1))
        l = data.draw(st.integers(k + 1, n))
        assert exact_coverage(k, l, n, u) == pytest.approx(float(brute_coverage(k, l, n, u)), abs=1e-13)

    def test_distribution_free(self):
        # coverage of [X_(k), X_(l)] is the same whatever the continuous law
        n, u, k, l, reps = 20, 0.3, 3, 10, 4000
        theory = exact_coverage(k, l, n, u)
        for dist in (ScenarioDistribution.uniform(0, 1), ScenarioDistribution.normal(5, 2),
                     ScenarioDistribution.beta(2, 8)):
            q = true_quantile(dist, u)
            src = RandomSource(11, 0)
            hits = sum(
                s.sorted[k - 1] <= q <= s.sorted[l - 1]
                for s in (draw(dist, n, src) for _ in range(reps))
            )
            assert abs(hits / reps - theory) < 4 * math.sqrt(theory * (1 - theory) / reps)


class TestFeasibility:
    def test_hand_checks(self):
        assert exact_ci_feasible(5, 0.5, 0.90)
        assert not exact_ci_feasible(4, 0.5, 0.90)
        assert exact_ci_feasible(22, 0.1, 0.90)
        assert not exact_ci_feasible(21, 0.1, 0.90)

    @pytest.mark.parametrize("level", sorted(EXACT_TABLE))
    def test_exact_min_n_table(self, level):
        got = tuple(exact_ci_min_n(u, level) for u in EXACT_LEVELS)
        assert got == EXACT_TABLE[level]

    @pytest.mark.parametrize("level", sorted(EXACT_TABLE))
    def test_exact_min_n_symmetric(self, level):
        for u in EXACT_LEVELS:
            assert exact_ci_min_n(1 - u, level) == exact_ci_min_n(u, level)

    @pytest.mark.parametrize("level", sorted(ASYMPTOTIC_TABLE))
    def test_asymptotic_min_n_table(self, level):
        got = tuple(asymptotic_ci_min_n(u, level) for u in ASYMPTOTIC_LEVELS)
        assert got == ASYMPTOTIC_TABLE[level]

    @given(st.floats(0.01, 0.99), st.sampled_from([0.8, 0.9, 0.95, 0.99]))
    def test_min_n_is_first_feasible(self, u, level):
        m = exact_ci_min_n(u, level)
        assert exact_ci_feasible(m, u, level)
        assert m == 1 or not exact_ci_feasible(m - 1, u, level)


class TestExactEqualTailed:
    def test_n5_median(self):
        s = make_sample([5.0, 1.0, 4.0, 2.0, 3.0])
        ci = exact_ci(s, 0.5, 0.90, ExactMode.EQUAL_TAILED)
        assert (ci.lower, ci.upper) == (1.0, 5.0)
        assert ci.indices == (1, 5)
        assert ci.achieved_coverage == pytest.approx(0.9375, rel=1e-14)
        assert ci.method is Method.EXACT_EQUAL_TAILED

    def test_infeasible_reports_min_n(self):
        with pytest.raises(InfeasibleSampleSize) as info:
            exact_ci(make_sample(np.arange(10.0)), 0.05, 0.90)
        assert info.value.min_n == 45

    @given(st.integers(5, 80), st.floats(0.05, 0.95), st.sampled_from([0.8, 0.9, 0.95]))
    def test_conservative_and_tail_bounded(self, n, u, level):
        if not exact_ci_feasible(n, u, level):
            return
        ci = exact_ci(make_sample(np.arange(float(n))), u, level, ExactMode.EQUAL_TAILED)
        k, l = ci.indices
        assert ci.achieved_coverage >= level - 1e-12
        assert 1 <= k < l <= n


def test_equal_tailed_conservative_exhaustive():
    grid = np.round(np.arange(0.02, 0.99, 0.02), 2)
    for level in (0.8, 0.9, 0.95, 0.99):
        for n in range(2, 101):
            for u in grid:
                if exact_ci_feasible(n, u, level):
                    k, l = intervals._equal_tailed_pair(n, float(u), 1.0 - level)
                    assert exact_coverage(k, l, n, float(u)) >= level - 1e-12, (n, u, level)


class TestExactRandomized:
    @given(st.integers(5, 80), st.floats(0.05, 0.95), st.sampled_from([0.8, 0.9, 0.95]))
    def test_mixture_narrower_than_equal_tailed(self, n, u, level):
        if not exact_ci_feasible(n, u, level):
            return
        s = make_sample(np.arange(float(n)))
        eq = exact_ci(s, u, level, ExactMode.EQUAL_TAILED)
        rnd = exact_ci(s, u, level, src=RandomSource(0, 0))
        if rnd.randomization is None:
            return
        assert abs(rnd.randomization.mixture_coverage - level) <= 1e-10
        assert rnd.randomization.expected_width <= eq.indices[1] - eq.indices[0] + 1e-12

    @pytest.mark.parametrize("n, u, level", [
        (10, 0.5, 0.90), (25, 0.5, 0.90), (25, 0.9, 0.90), (30, 0.25, 0.95),
        (50, 0.05, 0.90), (12, 0.3, 0.80), (60, 0.75, 0.99),
    ])
    def test_expected_width_matches_linear_program(self, n, u, level):
        ci = exact_ci(make_sample(np.arange(float(n))), u, level, src=RandomSource(0, 0))
        rz = ci.randomization
        assert rz is not None
        assert rz.mixture_coverage == pytest.approx(level, abs=1e-12)
        assert rz.expected_width == pytest.approx(lp_min_width(n, u, level), abs=1e-7)

    def test_choice_follows_draw(self):
        s = make_sample(np.arange(25.0))
        for stream in range(40):
            ci = exact_ci(s, 0.5, 0.9, src=RandomSource(3, stream))
            rz = ci.randomization
            expected = rz.pair_a if rz.draw < rz.lam else rz.pair_b
            assert ci.indices == expected
            assert rz.chosen == ("a" if rz.draw < rz.lam else "b")

    def test_consumes_exactly_one_uniform(self):
        src = RandomSource(9, 9)
        twin = src.clone()
        exact_ci(make_sample(np.arange(20.0)), 0.5, 0.9, src=src)
        twin.uniform()
        assert src.uniform() == twin.uniform()

    def test_plan_pairs_bracket_level(self):
        a, b, lam = _randomized_plan(40, 0.3, 0.95)
        assert a[2] <= 0.95 <= b[2]
        assert 0.0 <= lam <= 1.0

    def test_empirical_coverage_uniform(self):
        hits = 0
        for r in range(2000):
            s = uniform_sample(25, 21, r)
            ci = exact_ci(s, 0.5, 0.90, src=RandomSource(22, r))
            hits += ci.contains(0.5)
        assert abs(hits / 2000 - 0.90) <= 0.02


class TestAsymptotic:
    def test_indices(self):
        k, l = asymptotic_indices(25, 0.5, 0.90)
        z = normal_quantile(0.95)
        assert k == pytest.approx(25 * (0.5 - z * 0.1), rel=1e-14)
        assert l == pytest.approx(25 * (0.5 + z * 0.1), rel=1e-14)
        assert k == pytest.approx(8.387865932621319, rel=1e-12)

    def test_bounds_interpolate(self):
        s = make_sample(np.arange(1.0, 26.0))
        ci = asymptotic_ci(s, 0.5, 0.90)
        k, l = ci.indices
        # plotting position 26 * (k / 25) on the sample 1..25 is the value itself
        assert ci.lower == pytest.approx(26 * k / 25, rel=1e-12)
        assert ci.upper == pytest.approx(26 * l / 25, rel=1e-12)

    def test_infeasible(self):
        with pytest.raises(InfeasibleSampleSize) as info:
            asymptotic_ci(make_sample(np.arange(6.0)), 0.5, 0.90)
        assert info.value.min_n == 7

    def test_top_level_pins_to_maximum(self):
        s = make_sample(np.arange(1.0, 51.0))
        ci = asymptotic_ci(s, 0.9, 0.9)
        assert ci.upper <= 50.0


class TestBootstrap:
    def test_matches_literal_resampling(self):
        s = make_sample(normal_quantile(RandomSource(5, 1).uniforms(15)))
        u, B = 0.2, 300
        fast = bootstrap_distribution(s, u, B, RandomSource(5, 2))
        levels = RandomSource(5, 2).uniforms(B * s.n).reshape(B, s.n)
        literal = [order_quantile(np.sort(_tail_extrapolate(s.sorted, row)), u) for row in levels]
        np.testing.assert_array_equal(fast, literal)

    def test_replicate_mean_near_median(self):
        s = make_sample(normal_quantile(RandomSource(6, 1).uniforms(25)))
        reps = bootstrap_distribution(s, 0.5, 2000, RandomSource(6, 2))
        assert abs(reps.mean() - order_quantile(s.sorted, 0.5)) < 0.2

    def test_percentile_step_rule(self):
        reps = np.arange(1.0, 101.0)
        ci = percentile_interval(reps[::-1], 0.90)
        assert (ci.lower, ci.upper) == (5.0, 95.0)

    def test_clamp(self):
        ci = percentile_interval(np.linspace(-0.5, 1.5, 101), 0.9, MetricBounds(0.0, 1.0))
        assert (ci.lower, ci.upper) == (0.0, 1.0) and ci.clipped
        ci = percentile_interval(np.linspace(0.2, 0.8, 101), 0.9, MetricBounds(0.0, 1.0))
        assert not ci.clipped

    def test_beta_tail_clamped_into_unit_interval(self):
        dist = ScenarioDistribution.beta(2, 8)
        clipped = 0
        for r in range(300):
            s = draw(dist, 10, RandomSource(7, r))
            ci = bootstrap_ci(s, 0.05, 0.90, 1000, MetricBounds(0.0, 1.0), RandomSource(8, r))
            assert 0.0 <= ci.lower <= ci.upper <= 1.0
            clipped += ci.clipped
        assert clipped > 0

    def test_coverage_normal_median(self):
        dist = ScenarioDistribution.normal(0.5, 0.15)
        hits = 0
        for r in range(2000):
            s = draw(dist, 25, RandomSource(9, r))
            hits += bootstrap_ci(s, 0.5, 0.90, 2000, src=RandomSource(10, r)).contains(0.5)
        assert abs(hits / 2000 - 0.90) <= 0.03

    def test_validation(self):
        with pytest.raises(SampleTooSmall):
            bootstrap_distribution(make_sample([1.0]), 0.5)
        with pytest.raises(ValueError):
            bootstrap_distribution(make_sample([1.0, 2.0]), 0.5, B=10)
        with pytest.raises(InvalidBounds):
            MetricBounds(1.0, 0.0)
        with pytest.raises(InvalidBounds):
            bootstrap_ci(make_sample([1.0, 2.0]), 0.5, 0.9, bounds=(0, 1))


class TestTInterval:
    def test_hand_value(self):
        ci = t_interval(make_sample([0.0, 1.0]), 0.95)
        assert ci.lower == pytest.approx(-5.853102, abs=1e-6)
        assert ci.upper == pytest.approx(6.853102, abs=1e-6)

    @given(st.lists(st.floats(-100, 100), min_size=2, max_size=30), st.sampled_from([0.8, 0.9, 0.95, 0.99]))
    def test_matches_scipy_and_is_symmetric(self, xs, level):
        s = make_sample(xs)
        ci = t_interval(s, level)
        mean = math.fsum(xs) / len(xs)
        assert ci.upper - mean == pytest.approx(mean - ci.lower, abs=1e-9)
        sd = np.std(xs, ddof=1)
        if sd > 1e-9:
            lo, hi = stats.t.interval(level, len(xs) - 1, loc=np.mean(xs), scale=sd / math.sqrt(len(xs)))
            assert ci.lower == pytest.approx(lo, rel=1e-9, abs=1e-9)
            assert ci.upper == pytest.approx(hi, rel=1e-9, abs=1e-9)

    def test_constant_sample_is_degenerate(self):
        ci = t_interval(make_sample([0.1] * 7), 0.9)
        assert ci.lower == ci.upper == 0.1

    def test_needs_two(self):
        with pytest.raises(SampleTooSmall):
            t_interval(make_sample([1.0]), 0.9)

    def test_coverage_normal(self):
        dist = ScenarioDistribution.normal(0.5, 0.15)
        hits = sum(t_interval(draw(dist, 15, RandomSource(12, r)), 0.90).contains(0.5) for r in range(2000))
        assert abs(hits / 2000 - 0.90) <= 0.02
