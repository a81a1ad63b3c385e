"""Typical-random-code exponent of the AWGN channel.

Two evaluators live here:

* :func:`trc_exact_awgn` evaluates the full expression, including the term
  that accounts for the collective weight of all incorrect codewords in the
  decoder's posterior.  It is numerical: a three-dimensional convex
  minimization nested inside a one-dimensional search over the codeword
  correlation.
* :func:`trc_lower_awgn` is the closed-form pairwise (union bound) lower
  bound, convex up to :func:`r_star_awgn` and a straight line of slope -1
  after it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._optimize import ConvergenceError, INV_PHI
from .core import GldParams, alpha_fn, w_fn

__all__ = [
    "AwgnSpec",
    "gamma_objective",
    "gamma_exact",
    "trc_exact_awgn",
    "trc_lower_awgn",
    "r_star_awgn",
    "r0_awgn",
    "psd_feasible",
]

RHO_EDGE = 1e-12


@dataclass(frozen=True)
class AwgnSpec:
    P: float
    sigma2: float = 1.0
    gld: GldParams = field(default_factory=GldParams)

    def __post_init__(self):
        if not (self.P > 0 and self.sigma2 > 0):
            raise ValueError("power and noise variance must be positive")

    @property
    def snr(self) -> float:
        return self.P / self.sigma2

    @property
    def pair_gain(self) -> float:
        """``snr * bh*(1 - bh)``: slope of the pairwise exponent in ``1 - rho``."""
        bh = self.gld.beta_hat
        return self.snr * bh * (1.0 - bh)


def psd_feasible(P, rhoXXp, rhoXY, rhoXpY, sigmaY2, tol=1e-10) -> bool:
    """Whether the joint covariance of (X, X', Y) is positive semi-definite.

    Checked through the eigenvalues of the 3x3 matrix.
    """
    c = math.sqrt(P * sigmaY2)
    m = np.array([
        [P, rhoXXp * P, rhoXY * c],
        [rhoXXp * P, P, rhoXpY * c],
        [rhoXY * c, rhoXpY * c, sigmaY2],
    ])
    return bool(np.min(np.linalg.eigvalsh(m)) >= -tol * max(P, sigmaY2))


def gamma_objective(x, rho, spec: AwgnSpec, R: float):
    """Objective of the pair-event exponent in the ``(a, b, log sigma_V/sigma)`` chart.

    ``Y = a X + b X' + V`` with ``Var V = sigma_V^2``.  The last axis of
    ``x`` holds ``(a, b, t)`` with ``sigma_V = sigma * exp(t)``.  The
    function is jointly convex in these coordinates.  The constant
    ``0.5*ln(2*pi*sigma^2)`` is folded into the divergence term, so the
    minimum over ``x`` is the exponent itself.
    """
    x = np.asarray(x, dtype=float)
    a, b, t = x[..., 0], x[..., 1], x[..., 2]
    P, s2, beta = spec.P, spec.sigma2, spec.gld.beta
    snr = P / s2
    quad = 0.5 * snr * ((a - 1.0) ** 2 + 2.0 * rho * (a - 1.0) * b + b * b)
    v = np.exp(2.0 * t)
    divergence = quad + 0.5 * v - t - 0.5
    sigmaY2 = (a * a + 2.0 * rho * a * b + b * b) * P + s2 * v
    g_true = beta * snr * (a + rho * b)
    g_rival = beta * snr * (rho * a + b)
    crowd = alpha_fn(R, sigmaY2, P, s2, spec.gld)
    return divergence + np.maximum(np.maximum(g_true, crowd) - g_rival, 0.0)


_DIRECTIONS = np.array([d for d in itertools.product((-1.0, 0.0, 1.0), repeat=3) if any(d)])


def _pattern_search(f, x0, step, min_step=1e-11, max_iter=10_000):
    """Compass search over the 26 neighbour directions of the cube."""
    x = np.array(x0, dtype=float)
    fx = float(f(x))
    for _ in range(max_iter):
        if step < min_step:
            return x, fx
        trial = x + step * _DIRECTIONS
        vals = f(trial)
        i = int(np.argmin(vals))
        if vals[i] < fx:
            x, fx = trial[i], float(vals[i])
        else:
            step *= 0.5
    raise ConvergenceError(f"pattern search exhausted {max_iter} iterations (step {step:.2e})")


def gamma_exact(rhoXXp: float, spec: AwgnSpec, R: float, *, box: float = 5.0,
                max_expand: int = 4, return_point: bool = False):
    """Exact pair-event exponent for codeword correlation ``rhoXXp``.

    The infimum over the joint law of the channel output is computed in the
    ``(a, b, sigma_V^2)`` parametrization, which is feasible by construction:
    a coarse grid over ``[-box, box]^2 x [1e-6, 10]*sigma^2`` locates the
    basin, a compass search refines it and a Nelder-Mead pass polishes the
    result.  The box is doubled while the optimum sits on its boundary.

    Raises
    ------
    ConvergenceError
        If the refinement does not settle (objective change above 1e-8 at
        the end of the iteration budget) or the optimum stays on the box
        boundary after ``max_expand`` doublings.
    """
    if R < 0:
        raise ValueError("rate must be nonnegative")
    if spec.gld.deterministic:
        raise ValueError("the exact evaluator needs a finite decoder temperature")
    rho = float(np.clip(rhoXXp, -1.0 + RHO_EDGE, 1.0 - RHO_EDGE))

    def f(x):
        return gamma_objective(x, rho, spec, R)

    t_lo, t_hi = 0.5 * math.log(1e-6), 0.5 * math.log(10.0)
    for _ in range(max_expand + 1):
        ab = np.linspace(-box, box, 41)
        ts = np.linspace(t_lo, t_hi, 25)
        grid = np.stack(np.meshgrid(ab, ab, ts, indexing="ij"), axis=-1).reshape(-1, 3)
        vals = f(grid)
        x0 = grid[int(np.argmin(vals))]
        x, fx = _pattern_search(f, x0, step=ab[1] - ab[0])
        polished = minimize(lambda z: float(f(z)), x, method="Nelder-Mead",
                            options={"xatol": 1e-11, "fatol": 1e-14, "maxiter": 4000})
        if polished.fun < fx:
            x, fx = _pattern_search(f, polished.x, step=1e-4)
        hit = abs(x[0]) > 0.98 * box or abs(x[1]) > 0.98 * box or x[2] > t_hi - 0.02
        if not hit:
            break
        box *= 2.0
        t_hi += math.log(2.0)
    else:
        raise ConvergenceError("pair-event optimum stays on the search box boundary")
    # the minimum can never be negative: every term is a divergence or a [.]_+
    value = max(fx, 0.0)
    if return_point:
        return value, x
    return value


def _golden_min(f, lo, hi, tol=1e-9):
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def trc_exact_awgn(R: float, spec: AwgnSpec, *, grid: int = 33, return_rho: bool = False):
    """Exact TRC exponent of the AWGN channel (numerical).

    Minimizes ``gamma_exact(rho) + 0.5*ln(1/(1 - rho^2))`` over
    ``|rho| <= sqrt(1 - exp(-4R))`` with a uniform scan followed by a
    golden-section refinement of the best cell, then subtracts ``R``.
    """
    if R < 0:
        raise ValueError("rate must be nonnegative")
    r = min(math.sqrt(-math.expm1(-4.0 * R)), 1.0 - RHO_EDGE)

    def h(rho):
        return gamma_exact(rho, spec, R) - 0.5 * math.log1p(-rho * rho)

    if r == 0.0:
        best_rho, best = 0.0, h(0.0)
    else:
        rhos = np.linspace(-r, r, grid)
        vals = [h(x) for x in rhos]
        i = int(np.argmin(vals))
        lo, hi = rhos[max(i - 1, 0)], rhos[min(i + 1, grid - 1)]
        best_rho, best = _golden_min(h, lo, hi, tol=1e-7)
        if vals[i] < best:
            best_rho, best = rhos[i], vals[i]
    value = max(best - R, 0.0)
    if return_rho:
        return value, float(best_rho)
    return value


def r_star_awgn(spec: AwgnSpec) -> float:
    """Rate where the convex part of the lower bound meets its slope -1 line.

    ``0.25*ln((1 + sqrt(1 + 4c^2))/2)`` with ``c = snr*bh*(1 - bh)``, i.e.
    ``0.25*ln((1 + sqrt(1 + snr^2/4))/2)`` once ``beta >= 1/2``.
    """
    c = spec.pair_gain
    s = math.sqrt(1.0 + 4.0 * c * c)
    return 0.25 * math.log1p(2.0 * c * c / (1.0 + s))


def trc_lower_awgn(R, spec: AwgnSpec):
    """Closed-form lower bound on the AWGN TRC exponent.

    ``c*(1 - sqrt(1 - exp(-4R))) + R`` for ``R <= R_*`` and
    ``c - w(c, inf) - R`` beyond, with ``c = snr*bh*(1 - bh)``
    (``snr/4`` for ``beta >= 1/2``).  The straight line is clipped at zero
    once it crosses the rate axis.  Broadcasts over ``R``.
    """
    R = np.asarray(R, dtype=float)
    if np.any(R < 0):
        raise ValueError("rate must be nonnegative")
    c = spec.pair_gain
    out = np.maximum(c - w_fn(c, 2.0 * R) - R, 0.0)
    return out[()] if np.ndim(out) == 0 else out


def r0_awgn(spec: AwgnSpec) -> float:
    """Intercept of the straight-line part: ``E(R) = r0 - R`` for ``R >= R_*``."""
    c = spec.pair_gain
    return c - float(w_fn(c, 2.0 * r_star_awgn(spec)))
