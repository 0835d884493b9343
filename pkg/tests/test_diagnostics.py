import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lbde.diagnostics import TraceSummary, acf, average_clusters, ks_statistic, l1_distance, running_average
from lbde.errors import ConfigurationError, DataError
from lbde.kde import DensityEstimate
from lbde.rng import make_rng


class TestRunningAverage:
    def test_small_case(self):
        assert np.allclose(running_average([1.0, 2.0, 3.0]), [1.0, 1.5, 2.0], atol=1e-15)

    def test_constant(self):
        x = np.full(17, 4.2)
        assert np.allclose(running_average(x), x, atol=1e-15)

    def test_final_value_is_total_mean(self):
        x = make_rng(0).normal(size=1000)
        import math

        assert running_average(x)[-1] == pytest.approx(math.fsum(x) / x.size, abs=1e-12)

    def test_empty(self):
        with pytest.raises(DataError):
            running_average([])


class TestAcf:
    def test_lag_zero_is_one(self):
        x = make_rng(1).normal(size=500)
        assert acf(x, 10)[0] == 1.0

    def test_white_noise_lag_one(self):
        n = 10_000
        x = make_rng(2).normal(size=n)
        assert abs(acf(x, 1)[1]) < 3.0 / np.sqrt(n)

    def test_ar1_coefficient(self):
        n = 100_000
        rng = make_rng(3)
        x = np.empty(n)
        x[0] = rng.normal()
        eps = rng.normal(size=n)
        for t in range(1, n):
            x[t] = 0.8 * x[t - 1] + eps[t]
        assert acf(x, 1)[1] == pytest.approx(0.8, abs=0.02)

    def test_bounded_in_unit_interval(self):
        x = make_rng(4).gamma(2.0, 1.0, size=2000)
        vals = acf(x, 100)
        assert np.all(vals <= 1.0 + 1e-12) and np.all(vals >= -1.0 - 1e-12)

    def test_errors(self):
        with pytest.raises(DataError):
            acf(np.ones(50), 5)  # zero variance
        with pytest.raises(DataError):
            acf(np.arange(5.0), 10)  # too short


class TestAverageClusters:
    def test_small_case(self):
        assert average_clusters([4, 4, 5]) == pytest.approx(13.0 / 3.0, abs=1e-14)

    def test_all_ones(self):
        assert average_clusters(np.ones(9, dtype=int)) == 1.0

    def test_empty(self):
        with pytest.raises(DataError):
            average_clusters([])


def _triangle(grid, lo, hi):
    mid = 0.5 * (lo + hi)
    vals = np.maximum(0.0, 1.0 - np.abs(grid - mid) / (0.5 * (hi - lo)))
    return vals / np.trapezoid(vals, grid)


class TestL1Distance:
    def test_identical_is_zero(self):
        grid = np.linspace(0.0, 5.0, 128)
        p = DensityEstimate(grid, _triangle(grid, 1.0, 2.0), normalized=False)
        assert l1_distance(p, p) == 0.0

    def test_disjoint_supports_give_two(self):
        grid = np.linspace(0.0, 10.0, 1001)
        p = DensityEstimate(grid, _triangle(grid, 1.0, 3.0), normalized=False)
        q = DensityEstimate(grid, _triangle(grid, 6.0, 8.0), normalized=False)
        assert l1_distance(p, q) == pytest.approx(2.0, abs=1e-9)

    def test_shifted_normals_analytic_overlap(self):
        grid = np.linspace(-10.0, 11.0, 8001)
        p = DensityEstimate(grid, stats.norm.pdf(grid, 0.0, 1.0), normalized=False)
        q = DensityEstimate(grid, stats.norm.pdf(grid, 1.0, 1.0), normalized=False)
        # analytic: 4 Phi(1/2) - 2
        assert l1_distance(p, q) == pytest.approx(0.7658498450960525, abs=1e-4)

    def test_grid_mismatch(self):
        p = DensityEstimate(np.linspace(0, 1, 10), np.ones(10), normalized=True)
        q = DensityEstimate(np.linspace(0, 2, 10), 0.5 * np.ones(10), normalized=True)
        with pytest.raises(ConfigurationError):
            l1_distance(p, q)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_metric_properties(self, seed):
        rng = make_rng(seed)
        grid = np.linspace(0.0, 1.0, 33)
        p = DensityEstimate(grid, rng.random(33), normalized=False)
        q = DensityEstimate(grid, rng.random(33), normalized=False)
        r = DensityEstimate(grid, rng.random(33), normalized=False)
        assert l1_distance(p, q) == l1_distance(q, p)
        assert l1_distance(p, r) <= l1_distance(p, q) + l1_distance(q, r) + 1e-12
        assert l1_distance(p, p) == 0.0
        if not np.array_equal(p.values, q.values):
            assert l1_distance(p, q) >= 0.0


class TestKsStatistic:
    def test_quantile_construction(self):
        n = 40
        sample = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
        assert ks_statistic(sample, stats.norm.cdf) == pytest.approx(0.5 / n, abs=1e-12)

    def test_single_point_at_median(self):
        assert ks_statistic([0.0], stats.norm.cdf) == pytest.approx(0.5, abs=1e-12)

    def test_exponential_draws(self):
        n = 100_000
        draws = make_rng(5).exponential(2.0, size=n)  # Exp(rate 0.5)
        cdf = lambda x: 1.0 - np.exp(-0.5 * np.asarray(x))
        assert ks_statistic(draws, cdf) < 1.63 / np.sqrt(n)

    def test_empty(self):
        with pytest.raises(DataError):
            ks_statistic([], stats.norm.cdf)


class TestTraceSummary:
    def test_acceptance_counts_are_integers(self):
        rng = make_rng(6)
        flags = rng.random(500) < 0.4
        rates = np.cumsum(flags) / np.arange(1, flags.size + 1)
        ts = TraceSummary(np.zeros(3), np.asarray([1.0, 0.2]), rates, np.asarray([2, 3]))
        counts = ts.acceptance_running * np.arange(1, flags.size + 1)
        assert np.allclose(counts, np.round(counts), atol=1e-9)

    def test_json_round_trip(self):
        ts = TraceSummary([1.0, 1.5], [1.0, 0.3], [1.0, 0.5], [3, 4])
        back = TraceSummary.from_json(ts.to_json())
        assert np.array_equal(back.running_mean, ts.running_mean)
        assert np.array_equal(back.acf, ts.acf)
        assert np.array_equal(back.acceptance_running, ts.acceptance_running)
        assert np.array_equal(back.cluster_counts, ts.cluster_counts)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            TraceSummary([1.0], [0.5], [0.5], [1])  # acf[0] != 1
        with pytest.raises(ConfigurationError):
            TraceSummary([1.0], [1.0], [1.5], [1])  # acceptance outside [0, 1]
