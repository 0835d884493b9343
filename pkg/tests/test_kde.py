import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lbde.errors import ConfigurationError, DataError
from lbde.kde import (
    Bandwidth,
    DensityEstimate,
    classical_kde,
    default_grid,
    harmonic_mean,
    jones_kde,
    select_bandwidth,
    sheather_jones_plugin,
    sheather_jones_ste,
    silverman_bandwidth,
)
from lbde.rng import make_rng


class TestHarmonicMean:
    def test_small_case(self):
        assert harmonic_mean([1.0, 2.0, 4.0]) == pytest.approx(12.0 / 7.0, abs=1e-14)

    def test_constant_data(self):
        assert harmonic_mean(np.full(37, 2.5)) == pytest.approx(2.5, abs=1e-14)

    def test_matches_independent_accumulation(self):
        data = np.arange(1.0, 101.0)
        oracle = len(data) / math.fsum(sorted(1.0 / v for v in data))
        assert harmonic_mean(data) == pytest.approx(oracle, abs=1e-12)

    def test_errors(self):
        with pytest.raises(DataError):
            harmonic_mean([])
        with pytest.raises(DataError):
            harmonic_mean([1.0, -2.0])


class TestClassicalKde:
    def test_single_datum_peaks_at_datum(self):
        grid = np.linspace(0.0, 3.0, 301)
        est = classical_kde([1.0], 0.05, grid)
        assert grid[np.argmax(est.values)] == pytest.approx(1.0, abs=0.011)

    def test_far_from_zero_truncation_negligible(self):
        rng = make_rng(3)
        data = rng.normal(20.0, 1.0, size=200)
        grid = np.linspace(0.0, 40.0, 801)
        h = 0.5
        # raw (pre-renormalization) kernel average, computed independently
        raw = np.zeros_like(grid)
        for y in data:
            raw += np.exp(-0.5 * ((grid - y) / h) ** 2) / (h * math.sqrt(2 * math.pi))
        raw /= data.size
        assert np.trapezoid(raw, grid) == pytest.approx(1.0, abs=1e-3)
        est = classical_kde(data, h, grid)
        assert np.allclose(est.values, raw / np.trapezoid(raw, grid), atol=1e-12)

    def test_normalized_on_grid(self):
        rng = make_rng(4)
        data = rng.gamma(2.0, 2.0, size=100)
        est = classical_kde(data, 0.8, default_grid(data))
        assert est.integral() == pytest.approx(1.0, abs=1e-6)
        assert est.normalized


class TestJonesKde:
    def test_inverse_weights(self):
        # with data {1, 2} the kernel weights are exactly 2:1
        grid = np.linspace(0.0, 4.0, 401)
        h = 0.3
        est = jones_kde([1.0, 2.0], h, grid)
        k1 = np.exp(-0.5 * ((grid - 1.0) / h) ** 2)
        k2 = np.exp(-0.5 * ((grid - 2.0) / h) ** 2)
        raw = 2.0 * k1 + k2
        assert np.allclose(est.values, raw / np.trapezoid(raw, grid), atol=1e-12)

    def test_constant_data_matches_classical(self):
        grid = np.linspace(0.0, 6.0, 500)
        data = np.full(9, 2.0)
        a = jones_kde(data, 0.4, grid)
        b = classical_kde(data, 0.4, grid)
        assert np.allclose(a.values, b.values, atol=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.permutations(list(range(12))))
    def test_permutation_invariance(self, perm):
        base = np.asarray([0.5, 0.9, 1.1, 1.5, 2.0, 2.2, 2.8, 3.3, 4.1, 5.0, 6.2, 7.5])
        grid = np.linspace(0.0, 10.0, 257)
        a = jones_kde(base, 0.7, grid)
        b = jones_kde(base[np.asarray(perm)], 0.7, grid)
        assert np.array_equal(a.values, b.values)

    def test_beats_classical_for_debiasing(self):
        # biased Ga(2, 0.5) samples; target is the debiased Exp(0.5)
        from lbde import distributions as dists
        from lbde.diagnostics import l1_distance

        truth = dists.Gamma(1.0, 0.5)
        wins = 0
        for rep in range(20):
            rng = make_rng(100 + rep)
            data = dists.Gamma(2.0, 0.5).sample(rng, size=500)
            grid = default_grid(data)
            h = select_bandwidth(data)
            f0 = DensityEstimate(grid, truth.pdf(grid), normalized=False)
            d_jones = l1_distance(jones_kde(data, h, grid), f0)
            d_classical = l1_distance(classical_kde(data, h, grid), f0)
            wins += d_jones < d_classical
        assert wins > 10


class TestBandwidthSelection:
    def test_silverman_formula(self):
        data = make_rng(8).normal(0.0, 1.0, size=100)
        bw = silverman_bandwidth(data)
        sd = float(np.std(data, ddof=1))
        q75, q25 = np.percentile(data, [75, 25])
        sigma = min(sd, (q75 - q25) / 1.34)
        assert bw.h == pytest.approx(0.9 * sigma * 100 ** (-0.2), abs=1e-12)
        assert bw.method == "silverman_fallback"

    def test_biased_gamma_magnitude(self):
        from lbde import distributions as dists

        data = dists.Gamma(2.0, 0.5).sample(make_rng(16), size=50)
        bw = select_bandwidth(data)
        assert 0.5 < bw.h < 2.0
        assert bw.method == "sj_average"

    def test_average_of_two_stage_and_ste(self):
        data = make_rng(21).gamma(3.0, 1.5, size=120)
        dpi = sheather_jones_plugin(data)
        ste = sheather_jones_ste(data)
        avg = select_bandwidth(data)
        assert avg.h == pytest.approx(0.5 * (dpi.h + ste.h), rel=1e-12)

    def test_normal_reference_convergence(self):
        # for large normal samples the selector approaches 1.059 sigma n^{-1/5}
        n = 5000
        data = make_rng(9).normal(0.0, 1.0, size=n)
        bw = select_bandwidth(data)
        ref = 1.059 * n ** (-0.2)
        assert abs(bw.h - ref) / ref < 0.25

    def test_scale_equivariance(self):
        data = make_rng(10).gamma(2.0, 2.0, size=80)
        h1 = select_bandwidth(data).h
        h2 = select_bandwidth(4.0 * data).h
        assert h2 == pytest.approx(4.0 * h1, rel=1e-5)

    def test_errors(self):
        with pytest.raises(DataError):
            select_bandwidth([1.0, 2.0])
        with pytest.raises(DataError):
            select_bandwidth(np.full(10, 3.0))


class TestDensityEstimate:
    def test_grid_validation(self):
        with pytest.raises(ConfigurationError):
            DensityEstimate(np.asarray([0.0, 0.0, 1.0]), np.zeros(3), normalized=False)
        with pytest.raises(ConfigurationError):
            DensityEstimate(np.asarray([0.0, 1.0]), np.asarray([-1.0, 1.0]), normalized=False)

    def test_normalized_flag_enforced(self):
        grid = np.linspace(0.0, 1.0, 11)
        with pytest.raises(ConfigurationError):
            DensityEstimate(grid, np.full(11, 3.0), normalized=True)

    def test_csv_round_trip(self, tmp_path):
        grid = np.linspace(0.0, 2.0, 64)
        vals = np.exp(-grid)
        est = DensityEstimate(grid, vals, normalized=False)
        path = tmp_path / "est.csv"
        est.to_csv(path)
        back = DensityEstimate.from_csv(path, normalized=False)
        assert np.array_equal(back.grid, grid)
        assert np.array_equal(back.values, vals)

    def test_bandwidth_validation(self):
        with pytest.raises(ConfigurationError):
            Bandwidth(-0.5)
        with pytest.raises(ConfigurationError):
            Bandwidth(1.0, "nope")
