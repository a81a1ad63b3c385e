"""Monte Carlo simulator: code construction, decoder, estimators."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pairwise_error_mc
from trcgauss.colored import ChannelSpec
from trcgauss.core import GldParams
from trcgauss.simulation import (SimConfig, draw_codebook, estimate_exponents, gld_decode,
                                 gld_posterior, pairwise_error_probability,
                                 sample_spherical_segment, stream)
from trcgauss.spectral import ar1_spectrum, white_spectrum


def config(**kw):
    base = dict(n=2, ell=4, rate=0.3, trials_codes=4, trials_noise=50, seed=5,
                powers=(1.0, 2.0), noise=(1.0, 0.5), mismatch=(1.0, 0.5))
    base.update(kw)
    return SimConfig(**base)


class TestConfig:
    def test_message_count(self):
        cfg = config()
        assert cfg.block_length == 8
        assert cfg.num_messages == round(math.exp(2.4))

    @pytest.mark.parametrize("kw", [
        dict(rate=0.01),
        dict(rate=3.0),
        dict(trials_codes=1),
        dict(powers=(1.0,)),
        dict(noise=(0.0, 1.0)),
        dict(seed=-1),
        dict(rate=-0.1),
    ])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            config(**kw)

    def test_from_channel_samples_spectra(self):
        ch = ChannelSpec(white_spectrum(1.0, 16), ar1_spectrum(0.5, 1.0, 16), white_spectrum(1.0, 16))
        cfg = SimConfig.from_channel(ch, 4, 8, 0.1, 2, 1, 0)
        np.testing.assert_allclose(cfg.noise, ch.sz.values[::4])
        assert cfg.mismatch == (1.0,) * 4

    def test_from_channel_rejects_incommensurate(self):
        ch = ChannelSpec(white_spectrum(1.0, 10), white_spectrum(1.0, 10))
        with pytest.raises(ValueError):
            SimConfig.from_channel(ch, 4, 8, 0.1, 2, 1, 0)


class TestRandomness:
    def test_streams_reproducible_and_distinct(self):
        a = stream(1, 2, 3).random(4)
        np.testing.assert_array_equal(a, stream(1, 2, 3).random(4))
        assert not np.array_equal(a, stream(1, 2, 4).random(4))
        assert not np.array_equal(a, stream(2, 2, 3).random(4))

    @given(st.integers(2, 50), st.floats(0.01, 10))
    def test_sphere_radius(self, ell, power):
        x = sample_spherical_segment(ell, power, np.random.default_rng(0))
        np.testing.assert_allclose(x @ x, ell * power, rtol=1e-12)

    def test_codebook_norms(self):
        cfg = config()
        book = draw_codebook(cfg, 0)
        assert book.shape == (cfg.num_messages, 2, 4)
        np.testing.assert_allclose(np.sum(book ** 2, axis=2), [[4.0, 8.0]] * cfg.num_messages)
        np.testing.assert_array_equal(book, draw_codebook(cfg, 0))

    def test_sphere_coordinate_moments(self):
        # uniform on the sphere |x|^2 = ell: zero mean, unit variance, coordinates uncorrelated
        rng = np.random.default_rng(12)
        x = np.array([sample_spherical_segment(8, 1.0, rng) for _ in range(100_000)])
        assert np.all(np.abs(x.mean(axis=0)) < 4 / math.sqrt(100_000))
        c = np.corrcoef(x, rowvar=False)
        assert np.max(np.abs(c[np.triu_indices(8, 1)])) < 0.02

    def test_sphere_direction_uniform(self):
        # first coordinate of a uniform point on the unit sphere in R^3 is uniform on [-1, 1]
        rng = np.random.default_rng(1)
        x = np.array([sample_spherical_segment(3, 1 / 3, rng)[0] for _ in range(20000)])
        np.testing.assert_allclose(np.mean(x ** 2), 1 / 3, atol=0.01)


class TestDecoder:
    def setup_method(self):
        rng = np.random.default_rng(2)
        self.book = rng.standard_normal((6, 2, 3))
        self.y = rng.standard_normal((2, 3))
        self.mis = (1.0, 2.0)

    def test_posterior_is_softmax(self):
        p = gld_posterior(self.y, self.book, GldParams(0.7), self.mis)
        s = np.einsum("mik,ik->m", self.book, self.y / np.array(self.mis)[:, None])
        expected = np.exp(0.7 * s) / np.sum(np.exp(0.7 * s))
        np.testing.assert_allclose(p, expected, rtol=1e-12)

    def test_zero_temperature_is_uniform(self):
        np.testing.assert_allclose(gld_posterior(self.y, self.book, GldParams(0.0), self.mis), 1 / 6)

    def test_deterministic_picks_best(self):
        p = gld_posterior(self.y, self.book, GldParams(math.inf), self.mis)
        best = gld_decode(self.y, self.book, GldParams(math.inf), self.mis, np.random.default_rng(0))
        assert p[best] == 1.0

    def test_large_scores_do_not_overflow(self):
        p = gld_posterior(1e6 * self.y, self.book, GldParams(10.0), self.mis)
        assert np.all(np.isfinite(p)) and math.isclose(p.sum(), 1.0)

    def test_sampling_frequencies(self):
        g = GldParams(0.5)
        p = gld_posterior(self.y, self.book, g, self.mis)
        rng = np.random.default_rng(3)
        draws = np.bincount([gld_decode(self.y, self.book, g, self.mis, rng) for _ in range(20000)],
                            minlength=6) / 20000
        np.testing.assert_allclose(draws, p, atol=0.015)

    def test_deterministic_ties_are_random(self):
        book = np.ones((3, 1, 2))
        rng = np.random.default_rng(4)
        picks = {gld_decode(np.ones((1, 2)), book, GldParams(math.inf), (1.0,), rng) for _ in range(60)}
        assert picks == {0, 1, 2}


class TestPairwiseOracle:
    @pytest.mark.parametrize("beta", [0.5, 2.0, math.inf])
    def test_against_monte_carlo(self, beta):
        book = np.array([[1.0, 0.0], [0.0, 1.0]])
        exact = pairwise_error_probability(book, 0.7, 0.9, GldParams(beta))
        mc = pairwise_error_mc(2.0, 0.7, 0.9, beta, np.random.default_rng(8))
        np.testing.assert_allclose(exact, mc, atol=2e-3)

    def test_zero_temperature(self):
        book = np.array([[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(pairwise_error_probability(book, 1.0, 1.0, GldParams(0.0)), 0.5)


class TestEstimator:
    def test_reproducible(self):
        a = estimate_exponents(config())
        b = estimate_exponents(config())
        assert a == b

    def test_fields_consistent(self):
        est = estimate_exponents(config())
        pe = np.array(est.per_code_pe)
        np.testing.assert_allclose(est.error_rate, pe.mean())
        assert est.ci_radius == max(est.trc_ci, est.rc_ci)
        assert est.trc_estimate >= est.rc_estimate - 1e-15

    def test_censoring(self):
        # high snr and few messages: no errors in a handful of transmissions
        cfg = config(powers=(50.0, 50.0), rate=0.2, trials_noise=5)
        est = estimate_exponents(cfg)
        assert est.censored and est.censored_codes == 4
        np.testing.assert_allclose(est.trc_estimate, math.log(15) / 8)
        assert set(est.to_dict()) >= {"trc_estimate", "rc_estimate", "ci_radius", "censored_codes"}
