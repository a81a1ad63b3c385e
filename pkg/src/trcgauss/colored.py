"""TRC exponent lower bound for parallel and colored Gaussian channels.

All frequency integrals are normalized means over the uniform grid of the
spectra (see :func:`trcgauss.spectral.spectral_mean`).  With
``snr(w) = S_X/S_Z`` and ``mu(w) = S_Z/S~_Z`` the bound reads

    E(R) = sup_{theta >= 1} [B(theta) - (2 theta - 1) R],
    B(theta) = sup_{0 <= lam <= beta} mean A(snr, mu, lam, theta),

with ``A`` the pairwise exponent of :func:`trcgauss.core.pair_exponent`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from ._optimize import ConvergenceError, golden_max, scan_then_golden
from .core import GldParams, pair_exponent
from .spectral import Spectrum, white_spectrum

__all__ = [
    "ChannelSpec",
    "ExponentPoint",
    "ExponentCurve",
    "LambdaOpt",
    "flat_channel",
    "maximize_lambda",
    "b_theta",
    "b_theta_derivative",
    "trc_lower_colored",
    "parametric_curve",
    "r_star_colored",
    "zero_rate_exponent",
    "r0_random_coding",
]

POWER_TOL = 1e-8
THETA_MAX = 1e12


@dataclass(frozen=True)
class ChannelSpec:
    """Input, noise and decoder-assumed noise spectra with a power budget.

    ``sz_tilde=None`` means matched decoding (``S~_Z = S_Z``).  ``power``
    defaults to the mean of ``sx``; when given it must agree with it to
    ``1e-8`` (relative to ``max(1, power)``).
    """

    sx: Spectrum
    sz: Spectrum
    sz_tilde: Spectrum | None = None
    power: float | None = None
    gld: GldParams = field(default_factory=GldParams)
    snr: np.ndarray = field(init=False, repr=False, compare=False)
    mu: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sz_t = self.sz if self.sz_tilde is None else self.sz_tilde
        if not (self.sx.grid_size == self.sz.grid_size == sz_t.grid_size):
            raise ValueError("spectra must share one frequency grid")
        if not (self.sz.strictly_positive and sz_t.strictly_positive):
            raise ValueError("noise spectra must be strictly positive")
        mean_sx = self.sx.mean()
        if self.power is None:
            object.__setattr__(self, "power", mean_sx)
        elif abs(mean_sx - self.power) > POWER_TOL * max(1.0, self.power):
            raise ValueError(f"input spectrum carries power {mean_sx!r}, not {self.power!r}")
        snr = self.sx.values / self.sz.values
        mu = self.sz.values / sz_t.values
        snr.flags.writeable = False
        mu.flags.writeable = False
        object.__setattr__(self, "snr", snr)
        object.__setattr__(self, "mu", mu)

    @property
    def grid_size(self) -> int:
        return self.sx.grid_size

    @property
    def matched(self) -> bool:
        """True when ``mu`` is constant, i.e. the decoder metric is ML up to scale."""
        return bool(np.ptp(self.mu) <= 1e-12 * np.max(self.mu))

    @property
    def lambda_max(self) -> float:
        """Largest useful multiplier: beyond ``1/min mu`` every pairwise term is negative."""
        return min(self.gld.beta, 1.0 / float(np.min(self.mu)))

    def with_gld(self, gld: GldParams) -> "ChannelSpec":
        return ChannelSpec(self.sx, self.sz, self.sz_tilde, self.power, gld)


def flat_channel(snr: float, mu: float = 1.0, gld: GldParams | None = None,
                 grid_size: int = 64) -> ChannelSpec:
    """White channel with unit noise, input power ``snr`` and constant mismatch ``mu``."""
    gld = gld or GldParams()
    sz = white_spectrum(1.0, grid_size)
    sz_t = None if mu == 1.0 else white_spectrum(1.0 / mu, grid_size)
    return ChannelSpec(white_spectrum(snr, grid_size), sz, sz_t, float(snr), gld)


@dataclass(frozen=True)
class ExponentPoint:
    rate: float
    exponent: float
    theta_opt: float
    lambda_opt: float

    def __post_init__(self):
        if self.exponent < 0 or self.theta_opt < 1 or self.lambda_opt < 0:
            raise ValueError(f"invalid exponent point {self!r}")


@dataclass(frozen=True)
class ExponentCurve:
    """Points ordered by rate; ``flags`` lists rates whose consistency check failed."""

    points: tuple[ExponentPoint, ...]
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=lambda p: p.rate))
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])

    @property
    def exponents(self) -> np.ndarray:
        return np.array([p.exponent for p in self.points])


class LambdaOpt(NamedTuple):
    value: float
    lam: float
    multimodal: bool


def _mean_a(ch: ChannelSpec, lam, theta):
    return float(np.mean(pair_exponent(ch.snr, ch.mu, lam, theta)))


def maximize_lambda(theta: float, ch: ChannelSpec) -> LambdaOpt:
    """``sup_lam mean A`` at fixed ``theta`` with its maximizer.

    For constant ``mu = c`` the maximizer is ``min(beta, 1/(2c))``.
    Otherwise a 64-point scan guards the golden-section search and falls
    back to a ``1e-5`` grid if it sees separate local maxima.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    lam_hi = ch.lambda_max
    if ch.matched:
        lam = min(lam_hi, 0.5 / float(ch.mu[0]))
        return LambdaOpt(_mean_a(ch, lam, theta), lam, False)
    lam, val, multi = scan_then_golden(lambda x: _mean_a(ch, x, theta), 0.0, lam_hi)
    return LambdaOpt(val, lam, multi)


def b_theta(theta: float, ch: ChannelSpec) -> float:
    """``B(theta) = sup_{0 <= lam <= beta} mean A(snr, mu, lam, theta)``."""
    if theta < 1:
        raise ValueError("theta must be at least 1")
    return maximize_lambda(theta, ch).value


def b_theta_derivative(theta: float, ch: ChannelSpec, rel_step: float = 1e-4) -> float:
    """``B'(theta)`` by central differences with one Richardson step.

    ``B`` is analytic in ``theta`` also slightly below 1, so the stencil may
    cross ``theta = 1``.
    """
    h = rel_step * theta

    def cd(step):
        return (maximize_lambda(theta + step, ch).value
                - maximize_lambda(theta - step, ch).value) / (2.0 * step)

    return (4.0 * cd(0.5 * h) - cd(h)) / 3.0


def zero_rate_exponent(ch: ChannelSpec) -> tuple[float, float]:
    """Zero-rate exponent ``lim B(theta)`` and its multiplier.

    With ``I1 = mean(mu*snr)`` and ``I2 = mean(mu^2*snr)`` the limit is
    ``sup_lam (lam*I1 - lam^2*I2)``: ``I1^2/(4*I2)`` at ``lam = I1/(2*I2)``
    unless ``beta`` is smaller, in which case ``beta*I1 - beta^2*I2``.
    """
    i1 = float(np.mean(ch.mu * ch.snr))
    i2 = float(np.mean(ch.mu * ch.mu * ch.snr))
    if i2 <= 0.0:
        return 0.0, 0.0
    lam = i1 / (2.0 * i2)
    beta = ch.gld.beta
    if beta < lam:
        return beta * i1 - beta * beta * i2, beta
    return i1 * i1 / (4.0 * i2), lam


def r0_random_coding(ch: ChannelSpec) -> float:
    """Zero-rate random-coding exponent of the ensemble, ``B(1)``."""
    return b_theta(1.0, ch)


def r_star_colored(ch: ChannelSpec) -> float:
    """Rate where the curve turns into the straight line ``B(1) - R``.

    ``B'(1)/2 = 0.25 * mean ln((1 + sqrt(1 + 4 S^2))/2)`` with
    ``S = lam*mu*(1 - lam*mu)*snr`` at the maximizing ``lam`` of ``B(1)``.
    """
    lam = maximize_lambda(1.0, ch).lam
    lm = lam * ch.mu
    S = lm * (1.0 - lm) * ch.snr
    q = np.sqrt(1.0 + 4.0 * S * S)
    return 0.25 * float(np.mean(np.log1p(2.0 * S * S / (1.0 + q))))


def _theta_bracket(F, theta_max=THETA_MAX):
    """Geometric growth from 1 until ``F`` decreases; returns a bracket of the peak."""
    prev2, prev = None, 1.0
    f_prev = F(prev)
    theta = 2.0
    while theta <= theta_max:
        f = F(theta)
        if f < f_prev:
            return (prev2 if prev2 is not None else 1.0), theta
        prev2, prev, f_prev = prev, theta, f
        theta *= 2.0
    raise ConvergenceError("theta maximizer not bracketed; rate too close to zero")


def trc_lower_colored(R: float, ch: ChannelSpec, *, full: bool = False):
    """``E(R) = sup_{theta >= 1} [B(theta) - (2 theta - 1) R]``, clipped at 0.

    ``R = 0`` is evaluated through the closed-form zero-rate limit, with
    ``theta_opt`` reported as ``inf``.  With ``full=True`` an
    :class:`ExponentPoint` is returned.
    """
    if R < 0:
        raise ValueError("rate must be nonnegative")
    if R == 0:
        e0, lam = zero_rate_exponent(ch)
        return ExponentPoint(0.0, e0, math.inf, lam) if full else e0

    def F(theta):
        return b_theta(theta, ch) - (2.0 * theta - 1.0) * R

    lo, hi = _theta_bracket(F)
    theta, val = golden_max(F, lo, hi, tol=1e-12)
    val = max(val, 0.0)
    if not full:
        return val
    return ExponentPoint(float(R), val, float(theta), maximize_lambda(theta, ch).lam)


def parametric_curve(ch: ChannelSpec, theta_grid: Sequence[float], *,
                     check_tol: float = 1e-5) -> ExponentCurve:
    """Curve traced by ``R(theta) = B'(theta)/2``, ``E = B(theta) - (2 theta - 1) R``.

    Each point is checked against the direct supremum
    :func:`trc_lower_colored`; disagreements beyond ``check_tol`` are
    recorded in ``flags``.
    """
    points, flags = [], []
    for theta in theta_grid:
        if theta < 1:
            raise ValueError("theta values must be at least 1")
        opt = maximize_lambda(theta, ch)
        rate = 0.5 * b_theta_derivative(theta, ch)
        rate = max(rate, 0.0)
        exponent = opt.value - (2.0 * theta - 1.0) * rate
        points.append(ExponentPoint(rate, max(exponent, 0.0), float(theta), opt.lam))
        if rate > 0:
            direct = trc_lower_colored(rate, ch)
            if abs(direct - exponent) > check_tol:
                flags.append(f"theta={theta:g}: parametric {exponent:.9g} vs direct {direct:.9g}")
    return ExponentCurve(tuple(points), tuple(flags))
