import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from lbde import distributions as dists
from lbde.errors import ConfigurationError, DataError
from lbde.rng import make_rng

from conftest import ks_critical


class TestLogNormalPdf:
    def test_standard_point(self):
        # (2 pi)^{-1/2} at y = 1 with mu = 0, lam = 1
        assert dists.lognormal_pdf(1.0, 0.0, 1.0) == pytest.approx(0.3989422804014327, abs=1e-12)

    def test_log_equal_to_mu_picks_up_inverse_factor(self):
        assert dists.lognormal_pdf(math.e, 1.0, 1.0) == pytest.approx(0.14676266317373993, abs=1e-12)

    def test_matches_quadrature_normalized_shape(self):
        # oracle: unnormalized shape exp(-lam/2 (log y - mu)^2)/y, normalized by quadrature
        mu, lam = 0.0, 4.0
        shape = lambda y: math.exp(-0.5 * lam * (math.log(y) - mu) ** 2) / y
        z, _ = quad(shape, 0.0, np.inf)
        oracle = shape(0.5) / z
        assert oracle == pytest.approx(0.6104553041902139, rel=1e-10)  # frozen
        assert dists.lognormal_pdf(0.5, mu, lam) == pytest.approx(oracle, abs=1e-10)

    def test_domain_error(self):
        with pytest.raises(DataError):
            dists.lognormal_pdf(0.0, 0.0, 1.0)
        with pytest.raises(DataError):
            dists.lognormal_pdf(-1.0, 0.0, 1.0)


class TestInverseMoment:
    def test_standard(self):
        assert dists.lognormal_inverse_moment(0.0, 1.0) == pytest.approx(1.6487212707001282, abs=1e-12)

    def test_cancellation(self):
        assert dists.lognormal_inverse_moment(0.5, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_matches_quadrature(self):
        val, _ = quad(lambda y: dists.lognormal_pdf(y, 0.0, 4.0) / y, 0.0, np.inf)
        assert dists.lognormal_inverse_moment(0.0, 4.0) == pytest.approx(val, abs=1e-8)

    @pytest.mark.parametrize("mu", [-2.0, 0.0, 2.0])
    @pytest.mark.parametrize("lam", [0.25, 1.0, 4.0])
    def test_identity_grid(self, mu, lam):
        val, _ = quad(lambda y: dists.lognormal_pdf(y, mu, lam) / y, 0.0, np.inf, limit=200)
        assert dists.lognormal_inverse_moment(mu, lam) == pytest.approx(val, abs=1e-8)


class TestPdfEval:
    def test_exponential_at_origin(self):
        assert dists.pdf_eval(dists.Gamma(1.0, 0.5), 0.0) == pytest.approx(0.5, abs=1e-12)

    def test_debiased_mixture_at_origin(self):
        mix = dists.Mixture((0.75, 0.25), (dists.Gamma(1.0, 1.0), dists.Gamma(9.0, 1.0)))
        assert dists.pdf_eval(mix, 0.0) == pytest.approx(0.75, abs=1e-12)

    def test_standard_normal_at_zero(self):
        assert dists.pdf_eval(dists.Normal(0.0, 1.0), 0.0) == pytest.approx(0.3989422804014327, abs=1e-12)

    def test_unsupported_descriptor(self):
        with pytest.raises(ConfigurationError):
            dists.pdf_eval(object(), 1.0)
        with pytest.raises(ConfigurationError):
            dists.sample(object(), make_rng(0))


NORMALIZATION_CASES = [
    dists.Gamma(2.0, 0.5),
    dists.Gamma(10.0, 1.0),
    dists.LogNormal(0.3, 2.0),
    dists.Normal(-1.0, 2.0),
    dists.Beta(2.0, 3.0),
    dists.Uniform(0.5, 2.5),
    dists.Mixture((0.25, 0.75), (dists.Gamma(2.0, 1.0), dists.Gamma(10.0, 1.0))),
]


@pytest.mark.parametrize("dist", NORMALIZATION_CASES, ids=lambda d: d.describe())
def test_pdf_integrates_to_one(dist):
    val, _ = quad(dist.pdf, -np.inf, np.inf, limit=300)
    assert val == pytest.approx(1.0, abs=1e-6)


class TestSampling:
    def test_gamma_mean(self):
        draws = dists.Gamma(2.0, 1.0).sample(make_rng(5), size=100_000)
        assert abs(draws.mean() - 2.0) < 3.0 * math.sqrt(2.0 / 100_000)

    def test_beta_mean(self):
        draws = dists.Beta(1.0, 1.0).sample(make_rng(6), size=100_000)
        assert abs(draws.mean() - 0.5) < 3.0 * math.sqrt(1.0 / 12.0 / 100_000)

    def test_lognormal_mean(self):
        draws = dists.LogNormal(0.0, 1.0).sample(make_rng(7), size=100_000)
        truth = math.exp(0.5)
        se = math.sqrt((math.e - 1.0) * math.e / 100_000)
        assert abs(draws.mean() - truth) < 3.0 * se

    def test_fixed_seed_reproducible(self):
        mix = dists.Mixture((0.4, 0.6), (dists.Gamma(2.0, 1.0), dists.LogNormal(0.0, 1.0)))
        a = mix.sample(make_rng(11), size=500)
        b = mix.sample(make_rng(11), size=500)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("dist", NORMALIZATION_CASES, ids=lambda d: d.describe())
    def test_empirical_cdf_matches_analytic(self, dist):
        n = 100_000
        draws = np.sort(np.asarray(dist.sample(make_rng(13), size=n), dtype=float))
        ref = dist.cdf(draws)
        steps = np.arange(1, n + 1) / n
        ks = max(float(np.max(steps - ref)), float(np.max(ref - steps + 1.0 / n)))
        assert ks < ks_critical(n)


class TestDescriptors:
    def test_parse_round_trip(self):
        for text in ("gamma(2.0,0.5)", "lognormal(0.0,1.0)", "normal(1.0,2.0)",
                     "0.25*gamma(2.0,1.0)+0.75*gamma(10.0,1.0)"):
            dist = dists.parse_distribution(text)
            assert dists.describe(dists.parse_distribution(dists.describe(dist))) == dists.describe(dist)

    def test_parse_aliases(self):
        assert dists.parse_distribution("exp(0.5)") == dists.Gamma(1.0, 0.5)
        assert dists.parse_distribution("ga(2, 1)") == dists.Gamma(2.0, 1.0)

    def test_parse_errors(self):
        for bad in ("", "wat(1,2)", "gamma(1)", "gamma(a,b)", "gamma(2,1)+gamma(3,1)"):
            with pytest.raises(ConfigurationError):
                dists.parse_distribution(bad)

    def test_invalid_parameters(self):
        with pytest.raises(ConfigurationError):
            dists.Gamma(-1.0, 1.0)
        with pytest.raises(ConfigurationError):
            dists.LogNormal(0.0, 0.0)
        with pytest.raises(ConfigurationError):
            dists.Mixture((0.5, 0.4), (dists.Gamma(2.0, 1.0), dists.Gamma(3.0, 1.0)))


class TestLengthDebiased:
    def test_gamma_shifts_shape(self):
        assert dists.length_debiased(dists.Gamma(2.0, 0.5)) == dists.Gamma(1.0, 0.5)

    def test_mixture_reweights(self):
        g = dists.Mixture((0.25, 0.75), (dists.Gamma(2.0, 1.0), dists.Gamma(10.0, 1.0)))
        f = dists.length_debiased(g)
        assert f.components == (dists.Gamma(1.0, 1.0), dists.Gamma(9.0, 1.0))
        assert f.weights[0] == pytest.approx(0.75, abs=1e-12)
        assert f.weights[1] == pytest.approx(0.25, abs=1e-12)

    def test_lognormal_mean_shift(self):
        f = dists.length_debiased(dists.LogNormal(1.0, 2.0))
        assert f == dists.LogNormal(0.5, 2.0)
        # cross-check against quadrature of y^{-1} pdf, renormalized
        z, _ = quad(lambda y: dists.lognormal_pdf(y, 1.0, 2.0) / y, 0.0, np.inf)
        probe = 0.7
        oracle = dists.lognormal_pdf(probe, 1.0, 2.0) / probe / z
        assert f.pdf(probe) == pytest.approx(oracle, rel=1e-8)

    def test_nonintegrable_gamma_rejected(self):
        with pytest.raises(ConfigurationError):
            dists.length_debiased(dists.Gamma(1.0, 1.0))
