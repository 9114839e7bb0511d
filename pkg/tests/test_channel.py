"""Channel-model tests: derived CSI parameters, the fading sampler's moments
and correlation structure, and the conditional gain density."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from relaylab import channel
from relaylab.analytics import conditional_gain_pdf


class TestJakesCorrelation:
    def test_zero_delay(self):
        assert channel.jakes_correlation(123.0, 0.0) == 1.0

    def test_small_product(self):
        # f_d * T = 0.05; series value of J0(pi/10)
        got = channel.jakes_correlation(50.0, 1e-3)
        assert abs(got - 0.9754777740752495) < 1e-10

    def test_first_zero(self):
        fd_t = 2.404825557695773 / (2.0 * math.pi)
        assert abs(channel.jakes_correlation(fd_t, 1.0)) < 1e-9

    def test_can_go_negative(self):
        # past the first Bessel zero the raw autocorrelation is negative
        assert channel.jakes_correlation(0.6, 1.0) < 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            channel.jakes_correlation(-1.0, 1.0)
        with pytest.raises(ValueError):
            channel.jakes_correlation(float("nan"), 1.0)


class TestCeeCoefficient:
    def test_values(self):
        assert channel.cee_coefficient(1.0, 1.0) == 0.5
        assert channel.cee_coefficient(4.0, 1.0) == pytest.approx(0.8, abs=1e-15)

    def test_infinite_power_sentinel(self):
        assert channel.cee_coefficient(math.inf, 1.0) == 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            channel.cee_coefficient(1.0, 0.0)
        with pytest.raises(ValueError):
            channel.cee_coefficient(-1.0, 1.0)


class TestDeriveCsiParams:
    def test_perfect(self):
        p = channel.derive_csi_params(1.0, 1.0, 1.0)
        assert (p.rho_1, p.rho_2) == (1.0, 1.0)
        assert p.sigma2_hhat == 1.0
        assert p.sigma2_D == 0.0
        assert p.sigma2_e == 0.0

    def test_hand_values(self):
        p = channel.derive_csi_params(0.9, 0.9, 0.8)
        assert p.rho_1 == pytest.approx(0.72, abs=1e-15)
        assert p.rho_2 == pytest.approx(0.72, abs=1e-15)
        assert p.sigma2_hhat == pytest.approx(1.25, abs=1e-15)
        assert p.sigma2_D == pytest.approx(0.2, abs=1e-15)
        assert p.sigma2_e == pytest.approx(0.25, abs=1e-15)

    def test_fresh_link_keeps_unit_correlation(self):
        # rho_j = 1 whenever rho_f = 1, even with estimation error
        p = channel.derive_csi_params(1.0, 0.5, 0.8)
        assert p.rho_1 == 1.0
        assert p.rho_2 == pytest.approx(0.4, abs=1e-15)

    def test_consistency_relations(self):
        p = channel.derive_csi_params(0.7, 0.3, 0.6)
        assert p.sigma2_hhat * p.rho_e == pytest.approx(1.0, abs=1e-12)
        assert p.sigma2_e == pytest.approx(p.sigma2_hhat - 1.0, abs=1e-12)
        assert p.sigma2_D == pytest.approx(1.0 - p.rho_e, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            channel.derive_csi_params(1.2, 1.0, 1.0)
        with pytest.raises(ValueError):
            channel.derive_csi_params(1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            channel.derive_csi_params(1.0, -0.1, 0.5)


class TestSampleRelayChannels:
    def test_perfect_csi_collapses(self):
        rng = np.random.default_rng(0)
        p = channel.derive_csi_params(1.0, 1.0, 1.0)
        cs = channel.sample_relay_channels(rng, p, 4)
        np.testing.assert_array_equal(cs.h_t, cs.h_s)
        np.testing.assert_array_equal(cs.hhat_s, cs.h_s)
        np.testing.assert_array_equal(cs.hhat_t, cs.h_t)

    def test_unit_power(self):
        rng = np.random.default_rng(1)
        p = channel.derive_csi_params(0.9, 0.5, 0.8)
        cs = channel.sample_relay_channels(rng, p, 500_000)
        pw = np.abs(cs.h_t) ** 2
        se = pw.std() / math.sqrt(pw.size)
        assert abs(pw.mean() - 1.0) < 3 * se

    def test_cross_moment(self):
        # E[hhat_t conj(hhat_s)] = rho_j * sigma2_hhat (= rho_f here)
        rng = np.random.default_rng(2)
        p = channel.derive_csi_params(0.9, 0.9, 0.8)
        cs = channel.sample_relay_channels(rng, p, 500_000)
        prod = cs.hhat_t * np.conj(cs.hhat_s)
        target = p.rho_1 * p.sigma2_hhat
        se_re = prod.real.std() / math.sqrt(prod.size)
        se_im = prod.imag.std() / math.sqrt(prod.size)
        assert abs(prod.real.mean() - target) < 3 * se_re
        assert abs(prod.imag.mean()) < 3 * se_im

    def test_estimate_variance(self):
        rng = np.random.default_rng(3)
        p = channel.derive_csi_params(0.5, 0.5, 0.8)
        cs = channel.sample_relay_channels(rng, p, 400_000)
        for arr in (cs.hhat_s, cs.hhat_t):
            pw = np.abs(arr) ** 2
            se = pw.std() / math.sqrt(pw.size)
            assert abs(pw.mean() - p.sigma2_hhat) < 3 * se

    def test_gain_is_unit_exponential(self):
        rng = np.random.default_rng(4)
        p = channel.derive_csi_params(0.9, 0.9, 1.0)
        cs = channel.sample_relay_channels(rng, p, 500_000)
        gains = (np.abs(cs.h_t) ** 2).ravel()
        d = stats.kstest(gains, lambda x: 1.0 - np.exp(-x)).statistic
        assert d < 0.005

    def test_domain(self):
        rng = np.random.default_rng(5)
        p = channel.derive_csi_params(1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            channel.sample_relay_channels(rng, p, 0)


class TestConditionalGainDensity:
    """The transmission-time gain given the selection-time gain of one link."""

    @staticmethod
    def _sample_pairs(n, rho_f, rho_e, seed):
        rng = np.random.default_rng(seed)
        p = channel.derive_csi_params(rho_f, rho_f, rho_e)
        cs = channel.sample_relay_channels(rng, p, n)
        return (np.abs(cs.hhat_s[0]) ** 2, np.abs(cs.hhat_t[0]) ** 2, p)

    def test_normalization(self):
        for x in (0.5, 2.0):
            val, _ = integrate.quad(
                lambda y: conditional_gain_pdf(y, x, 0.72, 1.25), 0.0, 80.0,
                limit=300)
            assert val == pytest.approx(1.0, abs=1e-9)

    def test_mixture_recovers_marginal(self):
        # integrating f(y|x) against the exponential marginal of x must
        # reproduce the exponential marginal of y
        s2 = 1.25
        for y in (0.3, 1.0, 3.0):
            val, _ = integrate.quad(
                lambda x: conditional_gain_pdf(y, x, 0.72, s2)
                * math.exp(-x / s2) / s2, 0.0, 90.0, limit=400)
            assert val == pytest.approx(math.exp(-y / s2) / s2, rel=1e-8)

    @pytest.mark.parametrize("x_centre", [0.5, 1.0, 2.0])
    def test_histogram_matches_density(self, x_centre):
        gs, gt, p = self._sample_pairs(4_000_000, 0.9, 0.8, seed=60)
        delta = 0.05
        sel = (gs > x_centre - delta) & (gs < x_centre + delta)
        assert sel.sum() > 20_000
        y = gt[sel]
        y_cut = 6.0 * p.sigma2_hhat
        edges = np.linspace(0.0, y_cut, 26)
        observed = np.histogram(np.minimum(y, y_cut + 1.0),
                                bins=np.append(edges, np.inf))[0]
        probs = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, _ = integrate.quad(
                lambda t: conditional_gain_pdf(t, x_centre, p.rho_1,
                                               p.sigma2_hhat), lo, hi)
            probs.append(v)
        probs.append(max(1.0 - sum(probs), 1e-12))
        expected = np.asarray(probs) * y.size
        keep = expected >= 5.0
        merged_obs = np.append(observed[keep], observed[~keep].sum())
        merged_exp = np.append(expected[keep], expected[~keep].sum())
        if merged_obs[-1] == 0 and merged_exp[-1] < 5.0:
            merged_obs = merged_obs[:-1]
            merged_exp = merged_exp[:-1]
        merged_exp *= merged_obs.sum() / merged_exp.sum()
        pval = stats.chisquare(merged_obs, merged_exp).pvalue
        assert pval > 0.01
