import numpy as np
import pytest
from scipy import stats

import oracles
from dcorkit.distributions import (DistributionSpec, FILTER_FAMILY_ORDER, X_LABELS,
                                   Y_LABELS, Z_ROSTER, as_spec, default_distribution,
                                   label_for, sample)
from dcorkit.exceptions import ParameterError
from dcorkit.rng import RngStream

N_KS = 100_000
KS_TOL = 0.02  # crude bound; the 1% critical value at this n is ~0.005


def draw(label, n=N_KS, seed=1234, stream=0):
    return sample(default_distribution(label), n, RngStream(seed, stream))


def ks(sample_values, cdf) -> float:
    return float(stats.kstest(sample_values, cdf).statistic)


class TestShapes:
    def test_beta(self):
        assert ks(draw("Be"), stats.beta(2, 5).cdf) < KS_TOL

    def test_skew_normal(self):
        assert ks(draw("SN"), stats.skewnorm(5).cdf) < KS_TOL

    def test_cauchy(self):
        assert ks(draw("Cau"), stats.cauchy.cdf) < KS_TOL

    def test_gamma(self):
        assert ks(draw("Ga"), stats.gamma(5.5, scale=1).cdf) < KS_TOL

    def test_von_mises(self):
        assert ks(draw("vM"), stats.vonmises(2).cdf) < KS_TOL

    def test_mixture_two_normals(self):
        def cdf(x):
            return 0.5 * stats.norm.cdf(x) + 0.5 * stats.norm.cdf(x, loc=3)
        assert ks(draw("M2N"), cdf) < KS_TOL

    def test_mixture_three_normals(self):
        def cdf(x):
            return (stats.norm.cdf(x, loc=-3) + stats.norm.cdf(x)
                    + stats.norm.cdf(x, loc=3)) / 3.0
        assert ks(draw("M3N"), cdf) < KS_TOL

    def test_mixture_skew_t(self):
        cdf = oracles.skew_t_mixture_cdf_grid(
            weights=(0.5, 0.5), locs=(-2.0, 2.0), scales=(1.0, 1.0),
            slants=(3.0, -3.0), dfs=(5.0, 5.0))
        assert ks(draw("M2St"), cdf) < KS_TOL

    def test_mixture_exp_weibull(self):
        def cdf(x):
            return 0.5 * stats.expon.cdf(x, scale=2) + 0.5 * stats.weibull_min(2).cdf(x)
        assert ks(draw("ExpW"), cdf) < KS_TOL

    def test_std_normal(self):
        assert ks(draw("N"), stats.norm.cdf) < KS_TOL


class TestSupportAndSkew:
    def test_von_mises_support_half_open(self):
        v = draw("vM", n=200_000)
        assert v.min() > -np.pi
        assert v.max() <= np.pi

    def test_beta_support(self):
        v = draw("Be")
        assert v.min() >= 0.0 and v.max() <= 1.0

    def test_gamma_positive(self):
        assert draw("Ga").min() > 0.0

    def test_slant_sign_controls_skewness(self):
        pos = sample(DistributionSpec("skew_normal",
                                      {"loc": 0.0, "scale": 1.0, "slant": 5.0}),
                     N_KS, RngStream(5))
        neg = sample(DistributionSpec("skew_normal",
                                      {"loc": 0.0, "scale": 1.0, "slant": -5.0}),
                     N_KS, RngStream(5))
        assert stats.skew(pos) > 0.5
        assert stats.skew(neg) < -0.5

    def test_cauchy_median_near_zero(self):
        assert abs(np.median(draw("Cau"))) < 0.02


class TestDeterminism:
    def test_fixed_stream_reproduces(self):
        for label in ("Be", "SN", "M2St", "ExpW"):
            a = draw(label, n=64, seed=7, stream=3)
            b = draw(label, n=64, seed=7, stream=3)
            assert np.array_equal(a, b)

    def test_streams_differ(self):
        a = draw("Ga", n=64, seed=7, stream=0)
        b = draw("Ga", n=64, seed=7, stream=1)
        assert not np.array_equal(a, b)

    def test_generator_accepted(self):
        g = np.random.default_rng(3)
        v = sample(default_distribution("N"), 10, g)
        assert v.shape == (10,)


class TestSpecsAndLabels:
    def test_rosters(self):
        assert X_LABELS == ("Be", "SN", "Cau", "Ga", "vM")
        assert Y_LABELS == ("M2N", "M3N", "M2St")
        assert len(Z_ROSTER) == 8
        assert set(FILTER_FAMILY_ORDER) == set(Z_ROSTER)

    def test_label_round_trip(self):
        for label in X_LABELS + Y_LABELS + ("ExpW", "N"):
            assert label_for(default_distribution(label)) == label

    def test_lookup_case_insensitive(self):
        assert default_distribution("be") == default_distribution("Be")
        with pytest.raises(ParameterError):
            default_distribution("nope")

    def test_as_spec_coercions(self):
        spec = default_distribution("Ga")
        assert as_spec(spec) is spec
        assert as_spec("Ga") == spec
        assert as_spec({"family": "gamma", "params": {"shape": 5.5, "scale": 1.0}}) == spec
        with pytest.raises(ParameterError):
            as_spec({"params": {}})
        with pytest.raises(ParameterError):
            as_spec(3.14)

    def test_label_for_nondefault_falls_back_to_family(self):
        assert label_for(DistributionSpec("gamma", {"shape": 1.0, "scale": 2.0})) == "gamma"


class TestValidation:
    def test_unknown_family(self):
        with pytest.raises(ParameterError):
            DistributionSpec("triangular", {})

    def test_beta_params(self):
        with pytest.raises(ParameterError):
            DistributionSpec("beta", {"a": 0.0, "b": 5.0})
        with pytest.raises(ParameterError):
            DistributionSpec("beta", {"a": 2.0})

    def test_weights_must_be_nonnegative_and_normalized(self):
        with pytest.raises(ParameterError):
            DistributionSpec("mixture_normal", {
                "weights": (0.7, -0.3, 0.6), "means": (0, 1, 2), "sds": (1, 1, 1)})
        with pytest.raises(ParameterError):
            DistributionSpec("mixture_normal", {
                "weights": (0.5, 0.4), "means": (0, 1), "sds": (1, 1)})

    def test_zero_weight_component_allowed(self):
        spec = DistributionSpec("mixture_normal", {
            "weights": (1.0, 0.0), "means": (0.0, 50.0), "sds": (1.0, 1.0)})
        v = sample(spec, 50_000, RngStream(11))
        # the zero-weight component never fires
        assert v.max() < 10.0
        assert abs(v.mean()) < 0.05

    def test_component_length_mismatch(self):
        with pytest.raises(ParameterError):
            DistributionSpec("mixture_normal", {
                "weights": (0.5, 0.5), "means": (0.0,), "sds": (1.0, 1.0)})

    def test_sample_size_validated(self):
        spec = default_distribution("N")
        with pytest.raises(ParameterError):
            sample(spec, 0, RngStream(0))
        with pytest.raises(ParameterError):
            sample(spec, 2.5, RngStream(0))

    def test_std_normal_rejects_params(self):
        with pytest.raises(ParameterError):
            DistributionSpec("std_normal", {"loc": 1.0})
