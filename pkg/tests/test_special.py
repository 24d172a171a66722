"""Unit tests for the gamma/Poisson kernels.

The independent checks here evaluate the finite sum term by term with exact
integer factorials, a different route than the recurrence-anchored
implementation.
"""

import math

import pytest

from scr_aloha.special import poisson_cdf, poisson_pmf, regularized_upper_gamma

from golden_values import ORACLE_PMF_3_63955_5, ORACLE_Q_2_AT_1_61803, ORACLE_Q_5_AT_3_63955


def _q_direct(k: int, x: float) -> float:
    # independent evaluation: exact big-int factorials, float powers, fsum
    return math.fsum(x**j / math.factorial(j) * math.exp(-x) for j in range(k))


class TestRegularizedUpperGamma:
    def test_at_zero_is_one(self):
        assert regularized_upper_gamma(1, 0.0) == 1.0
        assert regularized_upper_gamma(7, 0.0) == 1.0

    def test_shape_one_is_exponential(self):
        assert regularized_upper_gamma(1, 1.0) == pytest.approx(math.exp(-1.0), abs=1e-15)
        assert regularized_upper_gamma(1, 3.5) == pytest.approx(math.exp(-3.5), abs=1e-15)

    def test_frozen_oracle_values(self):
        assert regularized_upper_gamma(2, 1.61803) == pytest.approx(
            ORACLE_Q_2_AT_1_61803, abs=1e-13
        )
        assert regularized_upper_gamma(5, 3.63955) == pytest.approx(
            ORACLE_Q_5_AT_3_63955, abs=1e-13
        )

    def test_matches_direct_summation_on_grid(self):
        for k in range(1, 101):
            for x in [0.0, 0.5, 1.0, 2.5, 5.0, 12.5, 25.0, 37.5, 50.0]:
                assert regularized_upper_gamma(k, x) == pytest.approx(
                    _q_direct(k, x), abs=1e-10
                ), f"k={k}, x={x}"

    def test_decreasing_in_x(self):
        # the ideal function is strictly decreasing, but near 0 and 1 the
        # decrease falls below float resolution; demand strictness only in
        # the numerically resolvable middle
        for k in [1, 2, 5, 20, 100]:
            values = [regularized_upper_gamma(k, x) for x in [0.1, 0.5, 1, 2, 5, 10, 20, 40]]
            for a, b in zip(values, values[1:]):
                assert a >= b - 1e-13, f"k={k}"
                if b > 1e-8 and a < 1.0 - 1e-8:
                    assert a > b, f"k={k}"

    def test_complement_identity(self):
        # Q(k+1, x) - Q(k, x) is the Poisson pmf at k
        for k in range(1, 60):
            for x in [0.3, 1.0, 4.0, 15.0, 40.0]:
                gap = regularized_upper_gamma(k + 1, x) - regularized_upper_gamma(k, x)
                pmf = x**k / math.factorial(k) * math.exp(-x)
                assert gap == pytest.approx(pmf, abs=1e-10), f"k={k}, x={x}"

    def test_bounded_in_unit_interval(self):
        for k in [1, 3, 10, 100, 1000]:
            for x in [1e-12, 0.7, float(k), 3.0 * k]:
                q = regularized_upper_gamma(k, x)
                assert 0.0 <= q <= 1.0

    def test_large_shape_stays_accurate(self):
        # the bulk of a Poisson(k) sits within a few sqrt(k) of k, so
        # Q(k, k - 3 sqrt(k)) must be close to 1 and Q(k, k + 3 sqrt(k)) small
        for k in [1000, 10000]:
            lo = regularized_upper_gamma(k, k - 3.0 * math.sqrt(k))
            hi = regularized_upper_gamma(k, k + 3.0 * math.sqrt(k))
            assert 0.99 < lo < 1.0
            assert 0.0 < hi < 0.01

    def test_deep_tail_underflows_to_zero(self):
        assert regularized_upper_gamma(5, 800.0) == 0.0

    def test_rejects_bad_shape(self):
        for bad in [0, -1, 1.5]:
            with pytest.raises(ValueError):
                regularized_upper_gamma(bad, 1.0)

    def test_rejects_bad_argument(self):
        for bad in [-1.0, float("inf"), float("nan")]:
            with pytest.raises(ValueError):
                regularized_upper_gamma(2, bad)


class TestPoissonPmf:
    def test_degenerate_zero_mean(self):
        assert poisson_pmf(0.0, 0) == 1.0
        assert poisson_pmf(0.0, 3) == 0.0

    def test_unit_mean_at_one(self):
        assert poisson_pmf(1.0, 1) == pytest.approx(math.exp(-1.0), abs=1e-15)

    def test_frozen_oracle_value(self):
        assert poisson_pmf(3.63955, 5) == pytest.approx(ORACLE_PMF_3_63955_5, abs=1e-14)

    def test_normalizes_to_one(self):
        total = math.fsum(poisson_pmf(3.63955, c) for c in range(201))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_matches_direct_formula(self):
        for mean in [0.2, 1.0, 7.3, 40.0]:
            for c in range(0, 80, 7):
                direct = mean**c / math.factorial(c) * math.exp(-mean)
                assert poisson_pmf(mean, c) == pytest.approx(direct, abs=1e-13)

    def test_no_overflow_for_huge_mean(self):
        p = poisson_pmf(1e6, 10**6)
        assert 0.0 < p < 1.0
        assert poisson_pmf(5000.0, 2) == 0.0

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            poisson_pmf(float("inf"), 1)
        with pytest.raises(ValueError):
            poisson_pmf(-0.5, 1)
        with pytest.raises(ValueError):
            poisson_pmf(1.0, -1)
        with pytest.raises(ValueError):
            poisson_pmf(1.0, 1.5)


class TestPoissonCdf:
    def test_matches_gamma_identity(self):
        for mean in [0.5, 2.0, 9.0]:
            for c in [0, 1, 5, 20]:
                assert poisson_cdf(mean, c) == regularized_upper_gamma(c + 1, mean)

    def test_rejects_negative_count(self):
        with pytest.raises(ValueError):
            poisson_cdf(1.0, -1)
