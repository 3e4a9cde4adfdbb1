"""Distribution specs: sampling laws, CDFs, and the canonical text form."""
import numpy as np
import pytest

from rb2s.distributions import (DistParseError, Exponential, LogNormal, Mixture,
                                Normal, StudentT, Uniform, format_dist, parse_dist)

ALL_SPECS = [
    Normal(0.0, 1.0),
    Normal(-2.0, 3.0),
    Exponential(1.0),
    Exponential(2.5),
    StudentT(3.0),
    StudentT(0.5),
    Uniform(10.0, 20.0),
    LogNormal(0.0, 1.0),
    Mixture(((0.5, Normal(-2.0, 1.0)), (0.5, Normal(2.0, 1.0)))),
]


def kolmogorov_distance(sample, cdf):
    s = np.sort(sample)
    n = s.size
    f = cdf(s)
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return max(upper, lower)


class TestSampling:
    def test_uniform_support(self):
        rng = np.random.default_rng(0)
        draws = Uniform(0.0, 1.0).sample_n(rng, 10_000)
        assert np.all((draws >= 0.0) & (draws <= 1.0))

    def test_exponential_mean(self):
        # CLT bound: 6 sigma / sqrt(n) with sigma = 1
        rng = np.random.default_rng(1)
        draws = Exponential(1.0).sample_n(rng, 100_000)
        assert abs(draws.mean() - 1.0) < 0.02

    def test_mixture_symmetry(self):
        rng = np.random.default_rng(2)
        mix = Mixture(((0.5, Normal(-2.0, 1.0)), (0.5, Normal(2.0, 1.0))))
        draws = mix.sample_n(rng, 100_000)
        assert abs(draws.mean()) < 0.05

    def test_scalar_draw(self):
        rng = np.random.default_rng(3)
        assert isinstance(Normal(0.0, 1.0).sample(rng), float)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=format_dist)
    def test_empirical_cdf_matches_analytic(self, spec):
        rng = np.random.default_rng(11)
        draws = spec.sample_n(rng, 100_000)
        assert kolmogorov_distance(draws, spec.cdf) < 0.01


class TestCdf:
    def test_normal_center(self):
        assert Normal(0.0, 1.0).cdf(0.0) == pytest.approx(0.5, abs=1e-12)

    def test_exponential_median(self):
        assert Exponential(1.0).cdf(np.log(2.0)) == pytest.approx(0.5, abs=1e-12)

    def test_mixture_center(self):
        mix = Mixture(((0.5, Normal(-2.0, 1.0)), (0.5, Normal(2.0, 1.0))))
        assert mix.cdf(0.0) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=format_dist)
    def test_monotone_unit_range(self, spec):
        xs = np.linspace(-60.0, 60.0, 1000)
        f = spec.cdf(xs)
        assert np.all(np.diff(f) >= 0)
        assert np.all((f >= 0.0) & (f <= 1.0))

    def test_lognormal_zero(self):
        assert LogNormal(0.0, 1.0).cdf(0.0) == 0.0
        assert LogNormal(0.0, 1.0).cdf(-5.0) == 0.0


class TestValidation:
    @pytest.mark.parametrize("bad", [
        lambda: Normal(0.0, 0.0),
        lambda: Normal(0.0, -1.0),
        lambda: Exponential(-1.0),
        lambda: StudentT(0.0),
        lambda: Uniform(2.0, 2.0),
        lambda: LogNormal(0.0, -0.5),
        lambda: Mixture(((0.6, Normal(0.0, 1.0)), (0.6, Normal(1.0, 1.0)))),
        lambda: Mixture(()),
    ])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            bad()


class TestTextForm:
    @pytest.mark.parametrize("text,expected", [
        ("normal(0,1)", Normal(0.0, 1.0)),
        ("exp(1)", Exponential(1.0)),
        ("t(0.5)", StudentT(0.5)),
        ("unif(10,20)", Uniform(10.0, 20.0)),
        ("lognormal(0,1)", LogNormal(0.0, 1.0)),
        ("mix(0.5*normal(-2,1)+0.5*normal(2,1))",
         Mixture(((0.5, Normal(-2.0, 1.0)), (0.5, Normal(2.0, 1.0))))),
    ])
    def test_parse(self, text, expected):
        assert parse_dist(text) == expected

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=format_dist)
    def test_round_trip(self, spec):
        assert parse_dist(format_dist(spec)) == spec

    def test_whitespace_and_case(self):
        assert parse_dist(" Normal( 0 , 1 ) ") == Normal(0.0, 1.0)

    @pytest.mark.parametrize("bad", [
        "", "normal", "normal(0)", "normal(0,1,2)", "gauss(0,1)",
        "unif(20,10)", "t(-1)", "mix(0.5*normal(0,1)+0.6*normal(1,1))",
        "mix(normal(0,1))", "normal(a,b)",
    ])
    def test_parse_errors(self, bad):
        with pytest.raises(DistParseError):
            parse_dist(bad)
