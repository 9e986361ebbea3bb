import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special, stats

from qci.errors import DomainError
from qci.kernels import (
    binomial_cdf,
    binomial_pmf,
    normal_cdf,
    normal_quantile,
    regularized_incomplete_beta,
    t_cdf,
    t_quantile,
)

# Oracle values computed independently (mpmath at 40 digits on the exact
# binary value of each float argument, or exact rationals)
Z_95 = 1.6448536269514727149
Z_975 = 1.9599639845400542355
Z_HIGH = 4.7534243088170877657      # p = float(0.999999)
Z_TINY = -6.3613409024040561991     # p = 1e-10
T_975_DF1 = 12.706204736174704646   # tan(0.475 pi)
BETA_25_75_AT_03 = 0.67894348586618163054
BETA_HALF_HALF_AT_09 = 0.79516723530086657191


def exact_pmf(s, n, p):
    p = Fraction(p)
    return math.comb(n, s) * p**s * (1 - p) ** (n - s)


class TestBinomial:
    def test_hand_values(self):
        assert binomial_pmf(0, 10, 0.5) == pytest.approx(1 / 1024, rel=1e-15)
        assert binomial_pmf(1, 2, 0.5) == pytest.approx(0.5, rel=1e-15)
        assert binomial_cdf(1, 2, 0.5) == pytest.approx(0.75, rel=1e-15)
        assert binomial_cdf(0, 4, 0.5) == pytest.approx(0.0625, rel=1e-15)

    def test_cdf_is_one_at_n(self):
        assert binomial_cdf(7, 7, 0.3) == 1.0

    def test_degenerate_probabilities(self):
        assert binomial_pmf(0, 5, 0.0) == 1.0
        assert binomial_pmf(5, 5, 1.0) == 1.0
        assert binomial_pmf(3, 5, 0.0) == 0.0

    @given(st.integers(1, 120), st.data(), st.floats(0.001, 0.999))
    def test_pmf_matches_exact_rationals(self, n, data, p):
        s = data.draw(st.integers(0, n))
        expected = float(exact_pmf(s, n, p))
        assert binomial_pmf(s, n, p) == pytest.approx(expected, rel=1e-11, abs=1e-300)

    @given(st.integers(1, 300), st.floats(0.001, 0.999))
    def test_pmf_sums_to_one(self, n, p):
        total = math.fsum(binomial_pmf(s, n, p) for s in range(n + 1))
        assert total == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("args", [(-1, 5, 0.5), (6, 5, 0.5), (1, 5, 1.5), (1, 5, -0.1), (1, -2, 0.5)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            binomial_pmf(*args)


class TestNormal:
    def test_quantile_oracle(self):
        assert normal_quantile(0.95) == pytest.approx(Z_95, rel=1e-14)
        assert normal_quantile(0.975) == pytest.approx(Z_975, rel=1e-14)
        assert normal_quantile(0.999999) == pytest.approx(Z_HIGH, rel=1e-13)
        assert normal_quantile(1e-10) == pytest.approx(Z_TINY, rel=1e-13)
        assert normal_quantile(0.5) == 0.0

    def test_quantile_by_bisection_on_cdf(self):
        # independent oracle: bisection on the erf-based cdf
        def bisect(p):
            lo, hi = -10.0, 10.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if 0.5 * math.erfc(-mid / math.sqrt(2)) < p:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        # the upper tail is limited by the cdf resolution near 1
        for p in (0.001, 0.02425, 0.3, 0.5, 0.7, 0.97575, 0.9999):
            assert normal_quantile(p) == pytest.approx(bisect(p), abs=1e-12)

    def test_array_input(self):
        p = np.array([[0.1, 0.5], [0.9, 0.975]])
        out = normal_quantile(p)
        assert out.shape == (2, 2)
        np.testing.assert_allclose(out, stats.norm.ppf(p), rtol=1e-14, atol=1e-15)

    @given(st.floats(1e-300, 1 - 1e-16, exclude_min=False))
    def test_quantile_matches_scipy(self, p):
        assert normal_quantile(p) == pytest.approx(stats.norm.ppf(p), rel=1e-12, abs=1e-14)

    @given(st.floats(-30, 30))
    def test_cdf_matches_scipy(self, x):
        # rounding x / sqrt(2) costs about x**2 ulps in the far tail
        assert normal_cdf(x) == pytest.approx(stats.norm.cdf(x), rel=1e-12, abs=1e-300)

    @given(st.floats(0.0001, 0.9999))
    def test_round_trip(self, p):
        assert normal_cdf(normal_quantile(p)) == pytest.approx(p, rel=1e-13)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1, math.nan])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            normal_quantile(p)


class TestIncompleteBeta:
    def test_polynomial_value(self):
        # I_0.5(2, 8) = P(Bin(9, 0.5) >= 2) = 1 - 10/512
        assert regularized_incomplete_beta(0.5, 2, 8) == pytest.approx(0.98046875, rel=1e-14)

    def test_mpmath_values(self):
        assert regularized_incomplete_beta(0.3, 2.5, 7.5) == pytest.approx(BETA_25_75_AT_03, rel=1e-13)
        assert regularized_incomplete_beta(0.9, 0.5, 0.5) == pytest.approx(BETA_HALF_HALF_AT_09, rel=1e-13)

    def test_endpoints(self):
        assert regularized_incomplete_beta(0.0, 3, 4) == 0.0
        assert regularized_incomplete_beta(1.0, 3, 4) == 1.0

    def test_vectorized(self):
        x = np.linspace(0, 1, 11)
        np.testing.assert_allclose(regularized_incomplete_beta(x, 2.0, 8.0), special.betainc(2.0, 8.0, x),
                                   rtol=1e-13, atol=1e-16)

    @given(st.floats(0, 1), st.floats(0.05, 200), st.floats(0.05, 200))
    def test_matches_scipy(self, x, a, b):
        assert regularized_incomplete_beta(x, a, b) == pytest.approx(special.betainc(a, b, x), rel=1e-10, abs=1e-14)

    @given(st.floats(0.01, 0.99), st.integers(1, 12), st.integers(1, 12))
    def test_integer_shapes_match_binomial_tail(self, x, a, b):
        tail = math.fsum(float(exact_pmf(j, a + b - 1, x)) for j in range(a, a + b))
        assert regularized_incomplete_beta(x, a, b) == pytest.approx(tail, rel=1e-12, abs=1e-15)

    @given(st.floats(1e-6, 1 - 1e-6), st.floats(0.1, 50), st.floats(0.1, 50))
    def test_symmetry(self, x, a, b):
        lhs = regularized_incomplete_beta(x, a, b)
        rhs = 1.0 - regularized_incomplete_beta(1.0 - x, b, a)
        assert lhs == pytest.approx(rhs, abs=1e-11)

    @pytest.mark.parametrize("args", [(-0.1, 1, 1), (1.1, 1, 1), (0.5, 0, 1), (0.5, 1, -2)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            regularized_incomplete_beta(*args)


class TestStudentT:
    def test_cauchy_closed_form(self):
        assert t_quantile(0.975, 1) == pytest.approx(T_975_DF1, rel=1e-13)

    def test_large_df_approaches_normal(self):
        assert abs(t_quantile(0.975, 10_000) - normal_quantile(0.975)) < 1e-3

    @pytest.mark.parametrize("p, df, expected", [
        # mpmath root of the beta-function tail at 40 digits
        (0.975, 3, 3.1824463052837084359),
        (0.95, 9, 1.8331129326562366095),
        (0.995, 24, 2.796939504774455911),
        (0.9, 49, 1.2990687847477498825),
        # closed form for two degrees of freedom: (2p - 1) / sqrt(2 p (1 - p))
        (0.6, 2, 0.28867513459481281549),
    ])
    def test_table_values(self, p, df, expected):
        assert t_quantile(p, df) == pytest.approx(expected, rel=1e-13)

    @given(st.floats(0.001, 0.999), st.integers(1, 500))
    def test_quantile_matches_scipy(self, p, df):
        # scipy's own t inverse is good to about 1e-12
        assert t_quantile(p, df) == pytest.approx(stats.t.ppf(p, df), rel=1e-10, abs=1e-12)

    @given(st.floats(-50, 50), st.floats(1, 1000))
    def test_cdf_matches_mpmath(self, t, df):
        mp.mp.dps = 30
        x = mp.mpf(df) / (mp.mpf(df) + mp.mpf(t) ** 2)
        tail = mp.betainc(mp.mpf(df) / 2, mp.mpf(0.5), 0, x, regularized=True) / 2
        expected = float(1 - tail if t > 0 else tail)
        assert t_cdf(t, df) == pytest.approx(expected, rel=1e-11, abs=1e-15)

    @given(st.floats(0.01, 0.99), st.integers(1, 100))
    def test_antisymmetry(self, p, df):
        assert t_quantile(p, df) == pytest.approx(-t_quantile(1 - p, df), rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("args", [(0.0, 5), (1.0, 5), (0.5, 0.5), (0.5, math.nan)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            t_quantile(*args)
