"""Typical-random-code error exponents for Gaussian channels.

The package evaluates error exponents of typical codes from the Gaussian
random-coding ensemble under a generalized (stochastic, possibly
mismatched) likelihood decoder, for the AWGN channel and for colored
Gaussian channels described by power spectra.
"""

__version__ = "0.1.0"

from ._optimize import ConvergenceError
from .awgn import (AwgnSpec, gamma_exact, r0_awgn, r_star_awgn, trc_exact_awgn,
                   trc_lower_awgn)
from .colored import (ChannelSpec, ExponentCurve, ExponentPoint, b_theta, flat_channel,
                      parametric_curve, r0_random_coding, r_star_colored, trc_lower_colored,
                      zero_rate_exponent)
from .core import (GldParams, alpha_fn, gamma_l, pair_exponent, rho_star, w_cap_fn, w_fn)
from .simulation import SimConfig, SimEstimate, estimate_exponents
from .spectral import (AutocorrSeq, Spectrum, ar1_autocorr, ar1_spectrum, evd_check,
                       spectral_mean, sym_eigenvalues, toeplitz_from_autocorr,
                       two_level_spectrum, white_spectrum)
from .tightness import (TightnessReport, d_fn, delta_fn, epsilon_fn, r_tightness,
                        tightness_report)
from .waterpour import (WaterPouringSolution, allocation_sx, optimize_input_spectrum,
                        solve_water_level)

__all__ = [
    "__version__",
    "ConvergenceError",
    "AwgnSpec", "gamma_exact", "r0_awgn", "r_star_awgn", "trc_exact_awgn", "trc_lower_awgn",
    "ChannelSpec", "ExponentCurve", "ExponentPoint", "b_theta", "flat_channel",
    "parametric_curve", "r0_random_coding", "r_star_colored", "trc_lower_colored",
    "zero_rate_exponent",
    "GldParams", "alpha_fn", "gamma_l", "pair_exponent", "rho_star", "w_cap_fn", "w_fn",
    "SimConfig", "SimEstimate", "estimate_exponents",
    "AutocorrSeq", "Spectrum", "ar1_autocorr", "ar1_spectrum", "evd_check", "spectral_mean",
    "sym_eigenvalues", "toeplitz_from_autocorr", "two_level_spectrum", "white_spectrum",
    "TightnessReport", "d_fn", "delta_fn", "epsilon_fn", "r_tightness", "tightness_report",
    "WaterPouringSolution", "allocation_sx", "optimize_input_spectrum", "solve_water_level",
]
