"""Input power spectrum that maximizes the colored-channel TRC bound.

For fixed multipliers ``(lam, theta)`` the bound is a concave functional of
``S_X``; its maximizer under the power constraint is the water-pouring
allocation

    S_X = 4 theta B [4 B c - S_Z]_+ / (4 B c + [4 B c - S_Z]_+),
    c = lam*mu*(1 - lam*mu),

with the water level ``B = 1/(4 xi)`` fixed by ``mean S_X = P``.  The outer
problem over ``(lam, theta)`` is solved numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._optimize import golden_max, scan_then_golden
from .colored import ChannelSpec, trc_lower_colored
from .core import GldParams, pair_exponent, rho_star
from .spectral import Spectrum

__all__ = [
    "InfeasibleAllocationError",
    "WaterPouringSolution",
    "allocation_sx",
    "solve_water_level",
    "optimize_input_spectrum",
    "kkt_residual",
]


class InfeasibleAllocationError(ValueError):
    """No frequency has ``lam*mu*(1 - lam*mu) > 0``, so no power can be placed."""


@dataclass(frozen=True)
class WaterPouringSolution:
    water_level: float
    lam: float
    theta: float
    sx: Spectrum
    achieved_power: float
    exponent: float
    rate: float = 0.0
    flags: tuple[str, ...] = ()

    @property
    def xi(self) -> float:
        """Multiplier of the power constraint, ``1/(4B)``."""
        return 0.25 / self.water_level

    def to_dict(self) -> dict:
        return {
            "water_level": self.water_level,
            "lambda": self.lam,
            "theta": self.theta,
            "exponent": self.exponent,
            "achieved_power": self.achieved_power,
            "rate": self.rate,
        }


def _values(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x), dtype=float)


def _curvature(lam, mu):
    lm = lam * mu
    return lm * (1.0 - lm)


def _allocate(B, lam, theta, sz, mu):
    c = _curvature(lam, mu)
    level = 4.0 * B * c
    d = np.maximum(level - sz, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        sx = np.where(d > 0, 4.0 * theta * B * d / (level + d), 0.0)
    return sx


def allocation_sx(B: float, lam: float, theta: float, sz, mu) -> Spectrum:
    """Water-pouring input spectrum at water level ``B``.

    Frequencies with ``lam*mu*(1 - lam*mu) <= 0`` receive no power.  In the
    matched case ``lam*mu = 1/2`` this is ``4 theta B [B - S_Z]_+/(B + [B - S_Z]_+)``.
    """
    if not B > 0:
        raise ValueError("water level must be positive")
    return Spectrum(_allocate(B, lam, theta, _values(sz), _values(mu)))


def _solve_level(P, lam, theta, sz, mu):
    c = _curvature(lam, mu)
    pos = c > 0
    if not np.any(pos):
        raise InfeasibleAllocationError("lam*mu*(1 - lam*mu) <= 0 at every frequency")
    b_lo = float(np.min(sz[pos] / (4.0 * c[pos])))

    def power(B):
        return float(np.mean(_allocate(B, lam, theta, sz, mu)))

    b_hi = 2.0 * b_lo
    while power(b_hi) < P:
        b_hi *= 2.0
    lo, hi = b_lo, b_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if power(mid) < P:
            lo = mid
        else:
            hi = mid
    # pick the end of the final bracket that meets the budget more closely
    B = lo if abs(power(lo) - P) < abs(power(hi) - P) else hi
    return B, b_lo, b_hi


def _power_monotone(P, lam, theta, sz, mu, b_lo, b_hi, points=32) -> bool:
    bs = np.linspace(b_lo, b_hi, points)
    pw = np.array([np.mean(_allocate(B, lam, theta, sz, mu)) for B in bs])
    return bool(np.all(np.diff(pw) > 0))


def solve_water_level(P: float, lam: float, theta: float, sz, mu, *,
                      rate: float = 0.0, gld: GldParams | None = None) -> WaterPouringSolution:
    """Water level meeting ``mean S_X = P`` and the resulting exponent.

    The bracket starts at ``min S_Z/(4c)`` (zero power) and doubles until it
    holds ``P``; bisection then runs to floating-point resolution.  The
    exponent is the colored-channel bound at ``rate`` on the induced
    channel.

    Raises
    ------
    InfeasibleAllocationError
        If ``lam*mu*(1 - lam*mu) <= 0`` everywhere.
    """
    if not P > 0:
        raise ValueError("power must be positive")
    if theta < 1:
        raise ValueError("theta must be at least 1")
    gld = gld or GldParams()
    sz_v, mu_v = _values(sz), _values(mu)
    B, b_lo, b_hi = _solve_level(P, lam, theta, sz_v, mu_v)
    flags = () if _power_monotone(P, lam, theta, sz_v, mu_v, b_lo, b_hi) else (
        "allocated power not strictly increasing in the water level",)
    return _solution(B, lam, theta, sz_v, mu_v, P, rate, gld, flags)


def _solution(B, lam, theta, sz_v, mu_v, P, rate, gld, flags):
    sx = Spectrum(_allocate(B, lam, theta, sz_v, mu_v))
    ch = ChannelSpec(sx, Spectrum(sz_v), Spectrum(sz_v / mu_v), gld=gld)
    return WaterPouringSolution(
        water_level=B, lam=lam, theta=theta, sx=sx, achieved_power=sx.mean(),
        exponent=trc_lower_colored(rate, ch), rate=rate, flags=flags,
    )


def _inner_value(P, lam, theta, sz, mu, R):
    """Bound at fixed ``(lam, theta)`` for the optimal allocation; ``-inf`` if infeasible."""
    try:
        B, _, _ = _solve_level(P, lam, theta, sz, mu)
    except InfeasibleAllocationError:
        return -math.inf
    snr = _allocate(B, lam, theta, sz, mu) / sz
    return float(np.mean(pair_exponent(snr, mu, lam, theta))) - (2.0 * theta - 1.0) * R


def optimize_input_spectrum(R: float, P: float, sz, mu, gld: GldParams | None = None, *,
                            theta_points: int = 32, theta_max: float = 1e4,
                            tol: float = 1e-10) -> WaterPouringSolution:
    """Maximize the colored-channel bound at rate ``R`` over the input spectrum.

    The allocation for each ``(lam, theta)`` is the water-pouring solution;
    ``lam`` is optimized by a guarded golden-section search for each point
    of a log-spaced ``theta`` grid on ``[1, theta_max]``, and the best cell is
    refined by golden section in ``theta``.  At ``R = 0`` the optimal
    ``theta`` is unbounded and the result is the one at ``theta_max``.
    """
    if R < 0:
        raise ValueError("rate must be nonnegative")
    if not P > 0:
        raise ValueError("power must be positive")
    gld = gld or GldParams()
    sz_v, mu_v = _values(sz), _values(mu)
    lam_hi = min(gld.beta, 1.0 / float(np.min(mu_v)))
    matched = np.ptp(mu_v) <= 1e-12 * np.max(mu_v)
    flags = []

    def best_lambda(theta):
        if matched:
            lam = min(lam_hi, 0.5 / float(mu_v[0]))
            return lam, _inner_value(P, lam, theta, sz_v, mu_v, R)
        # lam -> 0 carries no power-bearing frequency; start just above it
        lam, val, multi = scan_then_golden(
            lambda x: _inner_value(P, x, theta, sz_v, mu_v, R), 1e-9 * lam_hi, lam_hi, tol=tol)
        if multi:
            flags.append(f"multimodal lambda profile at theta={theta:g}")
        return lam, val

    thetas = np.geomspace(1.0, theta_max, theta_points)
    vals = [best_lambda(t)[1] for t in thetas]
    if not np.isfinite(np.max(vals)):
        raise InfeasibleAllocationError("no multiplier admits a feasible allocation")
    i = int(np.argmax(vals))
    lo, hi = thetas[max(i - 1, 0)], thetas[min(i + 1, theta_points - 1)]
    theta, _ = golden_max(lambda t: best_lambda(t)[1], lo, hi, tol=tol)
    lam, _ = best_lambda(theta)
    B, _, _ = _solve_level(P, lam, theta, sz_v, mu_v)
    return _solution(B, lam, float(theta), sz_v, mu_v, P, R, gld, tuple(flags))


def kkt_residual(sol: WaterPouringSolution, sz, mu) -> np.ndarray:
    """``S_X * (xi*S_Z - dA/dsnr)`` per frequency; zero at a stationary allocation.

    ``dA/dsnr = c*(1 - rho*(c*snr, theta))`` with ``c = lam*mu*(1 - lam*mu)``.
    """
    sz_v, mu_v = _values(sz), _values(mu)
    c = _curvature(sol.lam, mu_v)
    snr = sol.sx.values / sz_v
    slope = c * (1.0 - rho_star(c * snr, sol.theta))
    return sol.sx.values * (sol.xi * sz_v - slope)
