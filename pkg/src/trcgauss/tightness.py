"""Range of rates where the pairwise union bound is exponentially tight.

Dropping the collective term of the exact exponent leaves a union bound.
The bound is tight wherever a supplementary exponent ``eps(R)``, which
controls the probability that the collective term dominates the true
codeword's metric, exceeds the TRC exponent itself.  Everything here is in
the deterministic-decoding regime ``beta -> inf``.

Per frequency, with ``s = sqrt(snr)``, ``eta = zeta/lam`` and
``W(a) = max_rho a*rho + 0.5*ln(1 - rho^2)``,

    D = min_{r > 0} r^2/2 - ln r - 1/2 + snr/2 - W(|s (1 - eta mu)| r) - zeta W(eta mu s r / zeta),

where ``r = sigma_Y/sigma`` and the inner minimum over the correlation
between input and output has been carried out in closed form.  Then
``Delta(zeta) = sup_lam mean D``, ``eps(R) = sup_zeta [Delta(zeta) - zeta R]``
and

    R_t = inf_{theta >= 1} sup_{zeta > 2 theta - 1} (Delta(zeta) - B(theta)) / (zeta - 2 theta + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._optimize import INV_PHI, golden_max, scan_then_brent, scan_then_golden
from .colored import ChannelSpec, b_theta, r_star_colored, trc_lower_colored
from .core import GldParams, _unconstrained_w

__all__ = [
    "TightnessReport",
    "d_fn",
    "d_profile",
    "delta_fn",
    "delta_limit",
    "epsilon_fn",
    "r_tightness",
    "tightness_report",
]

_R_POINTS = 160
_R_FLOOR = 1e-5
_ETA_SPAN = (1e-3, 1e2)


def _d_min(snr, mu, eta, zeta, r_points=_R_POINTS, iters=50):
    """Row-wise ``min_r`` of the per-frequency objective (``zeta=inf`` drops the last term).

    ``snr``, ``mu`` and ``eta`` broadcast to one flat set of rows.
    """
    snr, mu, eta = (np.ravel(x) for x in np.broadcast_arrays(
        np.asarray(snr, dtype=float), np.asarray(mu, dtype=float), np.asarray(eta, dtype=float)))
    s = np.sqrt(snr)
    c = np.abs(s * (1.0 - eta * mu))
    k = eta * mu * s
    finite = math.isfinite(zeta) and zeta > 0

    def phi(r):
        out = 0.5 * r * r - np.log(r) - 0.5 + 0.5 * snr[:, None] - _unconstrained_w(c[:, None] * r)
        if finite:
            out = out - zeta * _unconstrained_w(k[:, None] * r / zeta)
        return out

    r_hi = 2.0 * (c + k) + np.sqrt(1.0 + snr) + 2.0
    grid = r_hi[:, None] * np.geomspace(_R_FLOOR, 1.0, r_points)[None, :]
    vals = phi(grid)
    j = np.argmin(vals, axis=1)
    rows = np.arange(snr.size)
    boundary = bool(np.any((j == 0) | (j == r_points - 1)))
    lo = grid[rows, np.maximum(j - 1, 0)]
    hi = grid[rows, np.minimum(j + 1, r_points - 1)]
    best = vals[rows, j]
    a = hi - INV_PHI * (hi - lo)
    b = lo + INV_PHI * (hi - lo)
    fa, fb = phi(a[:, None])[:, 0], phi(b[:, None])[:, 0]
    for _ in range(iters):
        left = fa <= fb
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
        na = np.where(left, hi - INV_PHI * (hi - lo), b)
        nb = np.where(left, a, lo + INV_PHI * (hi - lo))
        fnew = phi(np.where(left, na, nb)[:, None])[:, 0]
        fa, fb = np.where(left, fnew, fb), np.where(left, fa, fnew)
        a, b = na, nb
    best = np.minimum(best, np.minimum(fa, fb))
    return best, boundary


def d_fn(P: float, sigma2: float, sigma2_tilde: float, lam: float, zeta: float) -> float:
    """Inner minimum ``D`` for one channel with power ``P``, noise ``sigma2``.

    ``sigma2_tilde`` is the noise variance assumed by the decoder and ``lam``
    the multiplier of the rate constraint.  The ``-zeta*R`` term is left to
    the caller.
    """
    if not (P > 0 and sigma2 > 0 and sigma2_tilde > 0 and lam > 0):
        raise ValueError("scales and lam must be positive")
    if zeta < 0:
        raise ValueError("zeta must be nonnegative")
    if zeta == 0:
        return 0.0
    val, _ = _d_min(P / sigma2, sigma2 / sigma2_tilde, zeta / lam, zeta)
    return float(val[0])


@dataclass(frozen=True)
class _Freqs:
    snr: np.ndarray
    mu: np.ndarray
    weight: np.ndarray

    @classmethod
    def of(cls, ch: ChannelSpec) -> "_Freqs":
        pairs, counts = np.unique(np.stack([ch.snr, ch.mu], axis=1), axis=0, return_counts=True)
        return cls(pairs[:, 0], pairs[:, 1], counts / counts.sum())

    def mean_d(self, eta, zeta):
        vals, _ = _d_min(self.snr, self.mu, eta, zeta)
        return float(np.dot(self.weight, vals))

    def mean_d_many(self, etas, zeta):
        etas = np.asarray(etas, dtype=float)
        vals, _ = _d_min(self.snr[None, :], self.mu[None, :], etas[:, None], zeta)
        return vals.reshape(etas.size, self.snr.size) @ self.weight

    @property
    def eta_scale(self) -> float:
        i1 = float(np.dot(self.weight, self.mu * self.snr))
        i2 = float(np.dot(self.weight, self.mu * self.mu * self.snr))
        return i1 / i2 if i2 > 0 else 1.0 / float(np.dot(self.weight, self.mu))


def _sup_eta(fr: _Freqs, zeta: float) -> tuple[float, float]:
    scale = fr.eta_scale
    lo, hi = math.log(_ETA_SPAN[0] * scale), math.log(_ETA_SPAN[1] * scale)
    x, val, _ = scan_then_brent(lambda t: fr.mean_d_many(np.exp(t), zeta),
                                lambda t: fr.mean_d(math.exp(t), zeta), lo, hi, points=48)
    return val, math.exp(x)


def delta_fn(zeta: float, ch: ChannelSpec) -> float:
    """``Delta(zeta) = sup_lam mean D``; the supremum runs over ``eta = zeta/lam``."""
    if zeta < 0:
        raise ValueError("zeta must be nonnegative")
    if zeta == 0 or not np.any(ch.snr > 0):
        return 0.0
    return max(_sup_eta(_Freqs.of(ch), zeta)[0], 0.0)


def delta_limit(ch: ChannelSpec) -> float:
    """``lim_{zeta -> inf} Delta(zeta)``, reached with ``lam -> inf`` at fixed ``eta``.

    The rate-constraint term vanishes in this limit; the remaining inner
    minimum and the supremum over ``eta`` are evaluated numerically.
    """
    if not np.any(ch.snr > 0):
        return 0.0
    return max(_sup_eta(_Freqs.of(ch), math.inf)[0], 0.0)


def d_profile(ch: ChannelSpec, zetas) -> np.ndarray:
    """``Delta`` on a grid of ``zeta`` values."""
    return np.array([delta_fn(float(z), ch) for z in zetas])


def epsilon_fn(R: float, ch: ChannelSpec, *, zeta_max: float = 1e6) -> float:
    """``eps(R) = sup_{zeta >= 0} [Delta(zeta) - zeta R]``.

    ``Delta`` is nondecreasing and bounded, so ``eps(0)`` is its limit
    (:func:`delta_limit`).  For ``R > 0`` a log-spaced scan in ``zeta`` is
    refined by golden section.
    """
    if R < 0:
        raise ValueError("rate must be nonnegative")
    if R == 0:
        return delta_limit(ch)
    if not np.any(ch.snr > 0):
        return 0.0
    fr = _Freqs.of(ch)

    def F(t):
        z = math.exp(t)
        return _sup_eta(fr, z)[0] - z * R

    t, val, _ = scan_then_golden(F, math.log(1e-4), math.log(zeta_max), points=40, tol=1e-8)
    return max(val, 0.0)


def _inner_sup(fr: _Freqs, b: float, theta: float, zeta_max: float = 1e6,
               gap_min: float = 1e-6, tie_tol: float = 1e-9):
    """``sup_{zeta > 2 theta - 1} (Delta(zeta) - b)/(zeta - 2 theta + 1)`` and its argmax.

    The ratio is unbounded near ``zeta = 2 theta - 1`` when
    ``Delta(2 theta - 1) > b``; differences within ``tie_tol`` count as a tie,
    where the supremum is the finite one-sided slope of ``Delta``.
    """
    z0 = 2.0 * theta - 1.0
    if _sup_eta(fr, z0)[0] - b > tie_tol:
        return math.inf, z0

    def ratio(t):
        gap = math.exp(t)
        return (_sup_eta(fr, z0 + gap)[0] - b) / gap

    t, val, _ = scan_then_golden(ratio, math.log(gap_min), math.log(zeta_max), points=40, tol=1e-8)
    return val, z0 + math.exp(t)


@dataclass(frozen=True)
class TightnessReport:
    r_t: float
    epsilon_at_zero: float
    trc_at_zero: float
    zeta_profile: tuple[tuple[float, float], ...] = ()
    theta_opt: float = math.nan
    flags: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "r_t": self.r_t,
            "epsilon_at_zero": self.epsilon_at_zero,
            "trc_at_zero": self.trc_at_zero,
            "theta_opt": self.theta_opt,
            "flags": list(self.flags),
        }


def _deterministic(ch: ChannelSpec) -> ChannelSpec:
    return ch if ch.gld.deterministic else ch.with_gld(GldParams(math.inf))


def r_tightness(ch: ChannelSpec, *, theta_grid=None, full: bool = False):
    """Largest rate below which the union bound is guaranteed tight.

    The infimum over ``theta`` is taken on ``theta_grid`` (default: 24
    log-spaced points on ``[1, 1e3]``) and refined by golden section around
    the best grid point.  Returns 0 when the inner supremum is nonpositive
    for some ``theta``, recording a flag; with ``full=True`` also returns
    ``(theta_opt, flags)``.
    """
    det = _deterministic(ch)
    flags: list[str] = []
    if not np.any(det.snr > 0):
        return (0.0, math.nan, ("zero signal",)) if full else 0.0
    fr = _Freqs.of(det)
    thetas = np.geomspace(1.0, 1e3, 24) if theta_grid is None else np.asarray(theta_grid, float)

    def g(theta):
        return _inner_sup(fr, b_theta(theta, det), theta)[0]

    vals = np.array([g(t) for t in thetas])
    i = int(np.argmin(vals))
    best_theta, best = float(thetas[i]), float(vals[i])
    if math.isfinite(best) and len(thetas) > 1:
        lo, hi = thetas[max(i - 1, 0)], thetas[min(i + 1, len(thetas) - 1)]
        t, neg = golden_max(lambda x: -g(x), float(lo), float(hi), tol=1e-8)
        if -neg < best:
            best_theta, best = t, -neg
    if best <= 0:
        flags.append(f"no guaranteed tightness: inner supremum {best:.3g} at theta={best_theta:g}")
        best = 0.0
    if math.isinf(best):
        flags.append("inner supremum infinite on the whole theta grid")
    return (best, best_theta, tuple(flags)) if full else best


def tightness_report(ch: ChannelSpec, zetas=None) -> TightnessReport:
    """Bundle ``R_t``, ``eps(0)``, the zero-rate TRC bound and a ``Delta`` profile."""
    det = _deterministic(ch)
    zetas = np.geomspace(1e-2, 1e4, 25) if zetas is None else zetas
    r_t, theta, flags = r_tightness(det, full=True)
    eps0 = epsilon_fn(0.0, det)
    e0 = trc_lower_colored(0.0, det)
    if r_t > 0 and r_t > r_star_colored(det):
        flags = flags + ("tightness rate exceeds the critical rate",)
    profile = tuple((float(z), float(d)) for z, d in zip(zetas, d_profile(det, zetas)))
    return TightnessReport(r_t, eps0, e0, profile, theta, flags)

