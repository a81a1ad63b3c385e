"""Closed-form scalar building blocks.

Every function here is pure and broadcasts over numpy arrays.  The
quantities are all small variational problems over a correlation
coefficient ``rho`` in (-1, 1) that admit closed-form solutions:

* ``w_fn``        sup of ``rho*u + 0.5*ln(1 - rho^2)`` under ``|rho| <= sqrt(1 - exp(-2R))``
* ``w_cap_fn``    sup of ``a*rho + (lam/2)*ln(1 - rho^2)`` (no constraint)
* ``pair_exponent`` inf of ``S*(1 - rho) + (theta/2)*ln(1/(1 - rho^2))``
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GldParams",
    "w_fn",
    "w_branch_rate",
    "alpha_fn",
    "gamma_l",
    "rho_star",
    "pair_exponent",
    "pair_objective",
    "pair_slope",
    "w_cap_fn",
]


@dataclass(frozen=True)
class GldParams:
    """Temperature of the generalized likelihood decoder.

    ``beta = math.inf`` stands for deterministic (metric) decoding and
    ``beta = 0`` for a decoder that ignores the channel output.
    """

    beta: float = 1.0

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError(f"decoder temperature must be nonnegative, got {self.beta!r}")

    @property
    def beta_hat(self) -> float:
        """``min(beta, 1/2)``, the matched-case optimal Lagrange multiplier."""
        return min(self.beta, 0.5)

    @property
    def deterministic(self) -> bool:
        return math.isinf(self.beta)


def _unconstrained_w(u):
    # max_rho rho*u + 0.5*ln(1-rho^2) = 2u^2/(1+s) - 0.5*ln((1+s)/2), s = sqrt(1+4u^2).
    # log1p form keeps the O(u^2) cancellation accurate for tiny u.
    u2 = np.square(u)
    s = np.sqrt(1.0 + 4.0 * u2)
    return 2.0 * u2 / (1.0 + s) - 0.5 * np.log1p(2.0 * u2 / (1.0 + s))


def w_branch_rate(u):
    """Rate at which the correlation constraint of ``w_fn`` stops binding."""
    u = np.abs(np.asarray(u, dtype=float))
    s = np.sqrt(1.0 + 4.0 * u * u)
    return 0.5 * np.log1p(2.0 * u * u / (1.0 + s))


def w_fn(u, R):
    """Constrained maximum of ``rho*u + 0.5*ln(1 - rho^2)``.

    The maximization runs over ``|rho| <= sqrt(1 - exp(-2R))``.  Below the
    branch rate ``0.5*ln((1 + sqrt(1 + 4u^2))/2)`` the constraint binds and
    the value is ``|u|*sqrt(1 - exp(-2R)) - R``; above it the unconstrained
    maximizer is feasible.  Ties go to the constrained branch.

    Parameters
    ----------
    u : float or array_like
        Linear coefficient.  The problem is symmetric in the sign of ``u``.
    R : float or array_like
        Nonnegative rate in nats.
    """
    u = np.abs(np.asarray(u, dtype=float))
    R = np.asarray(R, dtype=float)
    if np.any(R < 0):
        raise ValueError("rate must be nonnegative")
    low = u * np.sqrt(-np.expm1(-2.0 * R)) - R
    high = _unconstrained_w(u)
    out = np.where(R <= w_branch_rate(u), low, high)
    return out[()] if out.ndim == 0 else out


def alpha_fn(R, sigmaY2, P, sigma2, gld: GldParams):
    """Typical exponent of the sum over all incorrect codewords.

    Equals ``w(beta*sqrt(P)*sigma_Y/sigma^2, R) + R``.
    """
    sigmaY2 = np.asarray(sigmaY2, dtype=float)
    if np.any(sigmaY2 <= 0) or P <= 0 or sigma2 <= 0:
        raise ValueError("alpha_fn needs positive sigmaY2, P and sigma2")
    if gld.deterministic:
        raise ValueError("alpha_fn needs a finite decoder temperature")
    u = gld.beta * math.sqrt(P) * np.sqrt(sigmaY2) / sigma2
    return w_fn(u, R) + np.asarray(R, dtype=float)


def gamma_l(rho, snr, gld: GldParams):
    """Pairwise (union bound) exponent ``snr * bh*(1 - bh) * (1 - rho)``, ``bh = min(beta, 1/2)``."""
    bh = gld.beta_hat
    return np.asarray(snr, dtype=float) * bh * (1.0 - bh) * (1.0 - np.asarray(rho, dtype=float))


def _root_term(S, theta):
    return np.sqrt(theta * theta + 4.0 * S * S) + theta


def rho_star(S, theta):
    """Minimizer ``2S/(sqrt(theta^2 + 4S^2) + theta)`` of the pair objective."""
    S = np.asarray(S, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return 2.0 * S / _root_term(S, theta)


def pair_objective(rho, S, theta):
    """``S*(1 - rho) + (theta/2)*ln(1/(1 - rho^2))``; the function ``pair_exponent`` minimizes."""
    rho = np.asarray(rho, dtype=float)
    return S * (1.0 - rho) - 0.5 * theta * np.log1p(-rho * rho)


def pair_exponent(snr, mu, lam, theta):
    """Pairwise exponent ``A(snr, mu, lam, theta)``.

    Infimum over ``|rho| < 1`` of
    ``lam*mu*(1 - lam*mu)*snr*(1 - rho) + (theta/2)*ln(1/(1 - rho^2))``.

    The objective is strictly convex in ``rho`` for every sign of
    ``S = lam*mu*(1 - lam*mu)*snr``, so the stationary point is the global
    minimizer.  For ``S < 0`` (``lam*mu > 1``) the minimizer is negative and
    the value is negative.

    All arguments broadcast.
    """
    snr = np.asarray(snr, dtype=float)
    mu = np.asarray(mu, dtype=float)
    lm = np.asarray(lam, dtype=float) * mu
    S = lm * (1.0 - lm) * snr
    theta = np.asarray(theta, dtype=float)
    root = _root_term(S, theta)
    # 1 - rho*, written without the S >> theta cancellation
    one_minus_rho = np.where(
        S >= 0,
        theta * (1.0 + theta / (root - theta + 2.0 * np.abs(S))) / root,
        1.0 + 2.0 * np.abs(S) / root,
    )
    out = S * one_minus_rho - 0.5 * theta * np.log(2.0 * theta / root)
    return out[()] if out.ndim == 0 else out


def pair_slope(snr, mu, lam, theta):
    """Derivative of ``pair_exponent`` with respect to ``snr``.

    By the envelope argument this is ``lam*mu*(1 - lam*mu)*(1 - rho*)``.
    """
    lm = np.asarray(lam, dtype=float) * np.asarray(mu, dtype=float)
    c = lm * (1.0 - lm)
    S = c * np.asarray(snr, dtype=float)
    return c * (1.0 - rho_star(S, theta))


def w_cap_fn(a, lam):
    """``max_rho a*rho + (lam/2)*ln(1 - rho^2)``, positively homogeneous in ``(a, lam)``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("lam must be positive")
    out = lam * _unconstrained_w(np.asarray(a, dtype=float) / lam)
    return out[()] if out.ndim == 0 else out
