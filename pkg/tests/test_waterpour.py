"""Water-pouring input spectra for the colored-channel bound."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import feasible_perturbation, water_level_flat
from trcgauss.colored import ChannelSpec, trc_lower_colored
from trcgauss.core import GldParams
from trcgauss.spectral import Spectrum, two_level_spectrum, white_spectrum
from trcgauss.waterpour import (InfeasibleAllocationError, allocation_sx, kkt_residual,
                                optimize_input_spectrum, solve_water_level)

G = 64
SZ = two_level_spectrum(0.5, 2.0, 0.5, G)
ONES = np.ones(G)


class TestAllocation:
    def test_matched_form(self):
        sz = np.array([0.5, 1.0, 3.0])
        sx = allocation_sx(2.0, 0.5, 1.0, sz, np.ones(3)).values
        d = np.maximum(2.0 - sz, 0)
        np.testing.assert_allclose(sx, 4 * 2.0 * d / (2.0 + d))
        assert sx[2] == 0.0

    def test_no_power_where_curvature_nonpositive(self):
        sx = allocation_sx(5.0, 1.0, 1.0, np.ones(2), np.array([0.5, 1.5])).values
        assert sx[1] == 0.0 and sx[0] > 0

    def test_rejects_nonpositive_level(self):
        with pytest.raises(ValueError):
            allocation_sx(0.0, 0.5, 1.0, ONES, ONES)

    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(1, 50))
    def test_increasing_in_level(self, b1, b2, theta):
        lo, hi = sorted((b1, b2))
        sz = SZ.values
        assert np.all(allocation_sx(hi, 0.5, theta, sz, ONES).values
                      >= allocation_sx(lo, 0.5, theta, sz, ONES).values - 1e-12)


class TestWaterLevel:
    def test_flat_noise_level(self):
        sol = solve_water_level(2.0, 0.5, 1.0, white_spectrum(1.0, G), ONES)
        np.testing.assert_allclose(sol.water_level, water_level_flat(2.0, 1.0), rtol=1e-12)
        np.testing.assert_allclose(sol.sx.values, 2.0, rtol=1e-12)

    @pytest.mark.parametrize("P", [0.1, 1.0, 20.0])
    def test_power_met(self, P):
        sol = solve_water_level(P, 0.5, 3.0, SZ, ONES)
        assert abs(sol.achieved_power - P) <= 1e-10 * P
        assert sol.flags == ()

    def test_low_power_fills_quiet_band_only(self):
        sol = solve_water_level(0.1, 0.5, 1.0, SZ, ONES)
        assert np.all(sol.sx.values[SZ.values == 2.0] == 0)

    def test_infeasible(self):
        with pytest.raises(InfeasibleAllocationError):
            solve_water_level(1.0, 2.0, 1.0, ONES, ONES)

    def test_complementary_slackness(self):
        sol = solve_water_level(1.0, 0.5, 2.0, SZ, ONES)
        assert np.max(np.abs(kkt_residual(sol, SZ, ONES))) < 1e-10

    def test_xi_and_dict(self):
        sol = solve_water_level(1.0, 0.5, 1.0, SZ, ONES, rate=0.01)
        assert sol.xi == 0.25 / sol.water_level
        assert set(sol.to_dict()) == {"water_level", "lambda", "theta", "exponent",
                                      "achieved_power", "rate"}


@pytest.fixture(scope="module")
def solution():
    return optimize_input_spectrum(0.05, 1.0, SZ, ONES)


class TestOptimizer:
    def test_power_and_slackness(self, solution):
        assert abs(solution.achieved_power - 1.0) < 1e-8
        assert np.max(np.abs(kkt_residual(solution, SZ, ONES))) < 1e-6

    def test_beats_flat_input(self, solution):
        flat = ChannelSpec(white_spectrum(1.0, G), SZ)
        assert solution.exponent > trc_lower_colored(0.05, flat)

    def test_flat_noise_gives_flat_input(self):
        sol = optimize_input_spectrum(0.05, 2.0, white_spectrum(1.0, G), ONES)
        np.testing.assert_allclose(sol.sx.values, 2.0, rtol=1e-9)

    def test_perturbations_do_not_help(self, solution):
        rng = np.random.default_rng(11)
        for _ in range(5):
            sx = feasible_perturbation(solution.sx.values, rng)
            ch = ChannelSpec(Spectrum(sx), SZ)
            assert trc_lower_colored(0.05, ch) <= solution.exponent + 1e-8

    def test_mismatched_decoder(self):
        sol = optimize_input_spectrum(0.02, 1.0, SZ, SZ.values, GldParams(math.inf),
                                      theta_points=8)
        assert abs(sol.achieved_power - 1.0) < 1e-8
        assert sol.exponent > 0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            optimize_input_spectrum(-0.1, 1.0, SZ, ONES)
        with pytest.raises(ValueError):
            optimize_input_spectrum(0.1, 0.0, SZ, ONES)
