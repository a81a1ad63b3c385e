"""Spectra, autocorrelations, Toeplitz sections and the eigenvalue solver."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trcgauss.spectral import (AutocorrSeq, Spectrum, ar1_autocorr, ar1_spectrum,
                               autocorr_from_spectrum, evd_check, spectral_mean,
                               spectrum_from_config, sym_eigenvalues, toeplitz_from_autocorr,
                               two_level_spectrum, white_spectrum)


class TestSpectrum:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            Spectrum(np.array([1.0, -0.1]))

    def test_rejects_nonfinite_and_empty(self):
        with pytest.raises(ValueError):
            Spectrum(np.array([1.0, np.nan]))
        with pytest.raises(ValueError):
            Spectrum(np.array([]))

    def test_values_read_only(self):
        s = white_spectrum(1.0, 8)
        with pytest.raises(ValueError):
            s.values[0] = 2.0

    def test_input_not_aliased(self):
        v = np.ones(4)
        s = Spectrum(v)
        v[0] = 5.0
        assert s.values[0] == 1.0

    def test_mean_with_function(self):
        s = Spectrum(np.array([1.0, 4.0]))
        assert spectral_mean(s, np.sqrt) == 1.5
        assert s.mean() == 2.5


class TestParametricSpectra:
    def test_ar1_mean_is_variance(self):
        # trapezoid rule is spectrally accurate for periodic integrands
        np.testing.assert_allclose(ar1_spectrum(0.5, 2.0, 256).mean(), 2.0, rtol=1e-14)

    def test_ar1_log_mean(self):
        # Kolmogorov: mean ln S = ln(innovation variance) = ln(sw2 (1 - a^2))
        s = ar1_spectrum(0.7, 1.0, 512)
        np.testing.assert_allclose(s.mean(np.log), math.log(1 - 0.49), atol=1e-12)

    def test_two_level_fraction(self):
        s = two_level_spectrum(0.5, 2.0, 0.25, 400)
        np.testing.assert_allclose(s.mean(), 0.25 * 0.5 + 0.75 * 2.0, rtol=1e-14)

    def test_rejects_unstable_ar1(self):
        with pytest.raises(ValueError):
            ar1_spectrum(1.0)

    @pytest.mark.parametrize("cfg,expected", [
        ({"type": "white", "level": 3.0}, 3.0),
        ({"type": "ar1", "a": 0.5, "sw2": 1.5}, 1.5),
        ({"type": "two_level", "low": 1.0, "high": 3.0}, 2.0),
        ({"type": "tabulated", "values": [1.0, 2.0, 3.0]}, 2.0),
    ])
    def test_from_config(self, cfg, expected):
        np.testing.assert_allclose(spectrum_from_config(cfg, 64).mean(), expected, rtol=1e-12)

    @pytest.mark.parametrize("cfg", [{"type": "pink"}, {"type": "white", "colour": 1}])
    def test_from_config_rejects(self, cfg):
        with pytest.raises(ValueError):
            spectrum_from_config(cfg)


class TestAutocorrelation:
    def test_ar1_lags(self):
        r = ar1_autocorr(0.5, 2.0)
        np.testing.assert_allclose(r(np.array([0, 1, -3])), [2.0, 1.0, 0.25])
        assert r(np.array([1000]))[0] == 0.0

    def test_spectrum_round_trip(self):
        s = ar1_spectrum(0.5, 1.0, 256)
        r = autocorr_from_spectrum(s)
        np.testing.assert_allclose(r.lags[:10], 0.5 ** np.arange(10), atol=1e-15)
        np.testing.assert_allclose(r.spectrum(256).values, s.values, rtol=1e-11)

    def test_rejects_nonpositive_power(self):
        with pytest.raises(ValueError):
            AutocorrSeq(np.array([0.0, 1.0]))

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            AutocorrSeq(np.array([1.0, 0.9])).spectrum(16)

    def test_toeplitz_structure(self):
        m = toeplitz_from_autocorr(ar1_autocorr(0.5), 5)
        np.testing.assert_array_equal(m, m.T)
        np.testing.assert_allclose(np.diag(m, 2), 0.25)


class TestEigenvalues:
    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_matches_lapack(self, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((n, n))
        m = a + a.T
        np.testing.assert_allclose(sym_eigenvalues(m), np.linalg.eigvalsh(m), atol=1e-10)

    @given(st.integers(2, 16), st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_trace_and_frobenius(self, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.uniform(-5, 5, (n, n))
        m = a + a.T
        eig = sym_eigenvalues(m)
        np.testing.assert_allclose(eig.sum(), np.trace(m), atol=1e-9 * n * np.abs(m).max())
        np.testing.assert_allclose(np.sum(eig ** 2), np.sum(m ** 2), rtol=1e-9)

    def test_ar1_toeplitz(self):
        m = toeplitz_from_autocorr(ar1_autocorr(0.5), 40)
        np.testing.assert_allclose(sym_eigenvalues(m), np.linalg.eigvalsh(m), atol=1e-11)

    def test_eigenvalues_near_spectrum_range_for_large_order(self):
        s = ar1_spectrum(0.5, 1.0, 1024)
        eig = sym_eigenvalues(toeplitz_from_autocorr(ar1_autocorr(0.5), 128))
        assert eig.min() <= 1.1 * s.values.min() and eig.max() >= 0.9 * s.values.max()

    def test_eigenvalues_inside_spectrum_range(self):
        # Toeplitz eigenvalues lie between the min and max of the symbol
        s = ar1_spectrum(0.5, 1.0, 1024)
        eig = sym_eigenvalues(toeplitz_from_autocorr(ar1_autocorr(0.5), 64))
        assert eig.min() >= s.values.min() - 1e-12
        assert eig.max() <= s.values.max() + 1e-12

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sym_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestEigenvalueDistribution:
    def test_trace_identity(self):
        (rep,) = evd_check(ar1_autocorr(0.5), [16], {"x": lambda x: x}, grid_size=512)
        assert rep.gap < 1e-12

    def test_gap_shrinks_with_order(self):
        reps = evd_check(ar1_autocorr(0.5), [8, 64], {"log": np.log}, grid_size=1024)
        assert reps[1].gap < reps[0].gap

    def test_log_gap_rate(self):
        # ln det T_n / n -> mean ln S with an O(1/n) correction for AR(1)
        reps = evd_check(ar1_autocorr(0.5), [16, 32], [np.log], grid_size=1024)
        np.testing.assert_allclose(reps[0].gap / reps[1].gap, 2.0, rtol=1e-6)
