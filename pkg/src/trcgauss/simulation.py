"""Monte Carlo simulation of spherical codes on parallel Gaussian channels.

Each codeword consists of ``n`` segments of length ``ell``; segment ``i``
lies on the sphere of squared radius ``ell * P_i`` and is sent over a
channel with noise variance ``sigma_i^2``.  The stochastic decoder draws
message ``m`` with probability proportional to
``exp(beta * sum_i x_i[m] . y_i / sigma~_i^2)``.

Block lengths reachable on a desk are far from the asymptotic regime, so
the estimates are meant for ordering and trend checks, not for matching
the exponent formulas numerically.

Randomness is counter based: the codebook of code ``c`` and transmission
``t`` of that code each get their own Philox stream keyed by the seed, so
results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import expit
from scipy.stats import norm

from .colored import ChannelSpec
from .core import GldParams

__all__ = [
    "SimConfig",
    "SimEstimate",
    "stream",
    "sample_spherical_segment",
    "draw_codebook",
    "gld_posterior",
    "gld_decode",
    "estimate_exponents",
    "pairwise_error_probability",
]

M_MAX = 2 ** 18


def stream(seed: int, code: int, slot: int) -> np.random.Generator:
    """Independent generator for ``(seed, code, slot)``; slot 0 is the codebook."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, code, slot]))


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    ``powers``, ``noise`` and ``mismatch`` hold ``P_i``, ``sigma_i^2`` and
    ``sigma~_i^2`` for the ``n`` parallel channels.
    """

    n: int
    ell: int
    rate: float
    trials_codes: int
    trials_noise: int
    seed: int
    powers: tuple[float, ...]
    noise: tuple[float, ...]
    mismatch: tuple[float, ...]
    gld: GldParams = field(default_factory=GldParams)

    def __post_init__(self):
        if self.n < 1 or self.ell < 2:
            raise ValueError("need n >= 1 and ell >= 2")
        if not (len(self.powers) == len(self.noise) == len(self.mismatch) == self.n):
            raise ValueError("per-channel arrays must have length n")
        if min(self.powers) < 0 or min(self.noise) <= 0 or min(self.mismatch) <= 0:
            raise ValueError("powers must be nonnegative and noise variances positive")
        if self.rate < 0:
            raise ValueError("rate must be nonnegative")
        if self.trials_codes < 2 or self.trials_noise < 1:
            raise ValueError("need at least two codes and one transmission per code")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        M = self.num_messages
        if M < 2:
            raise ValueError(f"exp(N R) rounds to {M}; at least two messages are needed")
        if M > M_MAX:
            raise ValueError(f"{M} messages exceed the limit of {M_MAX}")

    @property
    def block_length(self) -> int:
        return self.n * self.ell

    @property
    def num_messages(self) -> int:
        return int(round(math.exp(self.block_length * self.rate)))

    @classmethod
    def from_channel(cls, ch: ChannelSpec, n: int, ell: int, rate: float, trials_codes: int,
                     trials_noise: int, seed: int) -> "SimConfig":
        """Sample the channel spectra at the ``n`` frequencies ``2 pi i / n``."""
        if ch.grid_size % n:
            raise ValueError(f"spectrum grid {ch.grid_size} is not a multiple of n={n}")
        step = ch.grid_size // n
        sz_t = ch.sz if ch.sz_tilde is None else ch.sz_tilde
        return cls(n, ell, rate, trials_codes, trials_noise, seed,
                   tuple(ch.sx.values[::step]), tuple(ch.sz.values[::step]),
                   tuple(sz_t.values[::step]), ch.gld)


@dataclass(frozen=True)
class SimEstimate:
    """Exponent estimates in nats per channel use.

    ``trc_estimate = -mean(ln Pe)/N`` and ``rc_estimate = -ln(mean Pe)/N``
    over codes.  Confidence radii are 95% normal approximations;
    ``ci_radius`` is the larger of the two.  Codes without observed errors
    carry the surrogate ``1/(3 trials_noise)`` and set ``censored``.
    """

    trc_estimate: float
    rc_estimate: float
    ci_radius: float
    per_code_pe: tuple[float, ...]
    trc_ci: float
    rc_ci: float
    error_rate: float
    error_rate_ci: float
    censored_codes: int
    num_messages: int
    block_length: int

    @property
    def censored(self) -> bool:
        return self.censored_codes > 0

    def to_dict(self) -> dict:
        return {
            "trc_estimate": self.trc_estimate,
            "rc_estimate": self.rc_estimate,
            "ci_radius": self.ci_radius,
            "trc_ci": self.trc_ci,
            "rc_ci": self.rc_ci,
            "error_rate": self.error_rate,
            "error_rate_ci": self.error_rate_ci,
            "censored_codes": self.censored_codes,
            "num_messages": self.num_messages,
            "block_length": self.block_length,
        }


def sample_spherical_segment(ell: int, power: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the sphere ``|x|^2 = ell * power`` in ``R^ell``."""
    if power < 0:
        raise ValueError("power must be nonnegative")
    g = rng.standard_normal(ell)
    if power == 0:
        return np.zeros(ell)
    return g * math.sqrt(ell * power) / np.linalg.norm(g)


def draw_codebook(cfg: SimConfig, code: int) -> np.ndarray:
    """Codebook of code ``code`` as an ``(M, n, ell)`` array."""
    rng = stream(cfg.seed, code, 0)
    g = rng.standard_normal((cfg.num_messages, cfg.n, cfg.ell))
    radius = np.sqrt(cfg.ell * np.asarray(cfg.powers))
    return g * (radius[None, :, None] / np.linalg.norm(g, axis=2, keepdims=True))


def _scores(received, codebook, mismatch):
    y = np.asarray(received) / np.asarray(mismatch, dtype=float)[:, None]
    M = codebook.shape[0]
    return codebook.reshape(M, -1) @ y.ravel()


def gld_posterior(received, codebook, gld: GldParams, mismatch) -> np.ndarray:
    """Decoder distribution over messages for one received block."""
    s = _scores(received, codebook, mismatch)
    if gld.deterministic:
        top = s == s.max()
        return top / top.sum()
    z = gld.beta * s
    w = np.exp(z - z.max())
    return w / w.sum()


def gld_decode(received, codebook, gld: GldParams, mismatch, rng: np.random.Generator) -> int:
    """Draw a message index from the decoder distribution.

    Log-weights are shifted by their maximum before exponentiation.  For
    ``beta = inf`` the maximizers are tied uniformly.
    """
    s = _scores(received, codebook, mismatch)
    if gld.deterministic:
        top = np.flatnonzero(s == s.max())
        return int(top[rng.integers(top.size)]) if top.size > 1 else int(top[0])
    z = gld.beta * s
    cdf = np.cumsum(np.exp(z - z.max()))
    u = rng.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), cdf.size - 1))


def _code_error_rate(cfg: SimConfig, code: int) -> int:
    book = draw_codebook(cfg, code)
    sigma = np.sqrt(np.asarray(cfg.noise))[:, None]
    errors = 0
    for t in range(cfg.trials_noise):
        rng = stream(cfg.seed, code, t + 1)
        m = int(rng.integers(cfg.num_messages))
        y = book[m] + sigma * rng.standard_normal((cfg.n, cfg.ell))
        errors += gld_decode(y, book, cfg.gld, cfg.mismatch, rng) != m
    return errors


def estimate_exponents(cfg: SimConfig) -> SimEstimate:
    """Estimate both exponents from ``trials_codes`` independent codes."""
    T, C, N = cfg.trials_noise, cfg.trials_codes, cfg.block_length
    counts = np.array([_code_error_rate(cfg, c) for c in range(C)])
    pe = counts / T
    censored = int(np.sum(counts == 0))
    pe_used = np.where(counts == 0, 1.0 / (3.0 * T), pe)
    logs = np.log(pe_used)
    trc = -float(np.mean(logs)) / N
    mean_pe = float(np.mean(pe_used))
    rc = -math.log(mean_pe) / N
    z = 1.959963984540054
    trc_ci = z * float(np.std(logs, ddof=1)) / math.sqrt(C) / N
    rc_ci = z * float(np.std(pe_used, ddof=1)) / (math.sqrt(C) * mean_pe) / N
    pooled = float(counts.sum()) / (C * T)
    pooled_ci = z * math.sqrt(max(pooled * (1.0 - pooled), 1e-300) / (C * T))
    return SimEstimate(
        trc_estimate=trc, rc_estimate=rc, ci_radius=max(trc_ci, rc_ci),
        per_code_pe=tuple(float(p) for p in pe), trc_ci=trc_ci, rc_ci=rc_ci,
        error_rate=pooled, error_rate_ci=pooled_ci, censored_codes=censored,
        num_messages=cfg.num_messages, block_length=N,
    )


def pairwise_error_probability(codebook, noise: float, mismatch: float, gld: GldParams) -> float:
    """Exact error probability of a two-codeword code on one channel.

    With ``d = x0 - x1`` the metric gap given message 0 is
    ``(|d|^2/2 + d.z)/sigma~^2`` with ``d.z ~ N(0, sigma^2 |d|^2)``; by
    symmetry message 1 has the same error probability.  The expectation of
    the logistic selection probability over the Gaussian is computed by
    adaptive quadrature.
    """
    book = np.asarray(codebook, dtype=float).reshape(2, -1)
    d = book[0] - book[1]
    d2 = float(d @ d)
    mean_gap = 0.5 * d2 / mismatch
    sd_gap = math.sqrt(noise * d2) / mismatch
    if gld.deterministic:
        return float(norm.sf(mean_gap / sd_gap)) if sd_gap > 0 else 0.0

    def integrand(g):
        return expit(-gld.beta * (mean_gap + sd_gap * g)) * math.exp(-0.5 * g * g)

    val, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-11)
    return val / math.sqrt(2.0 * math.pi)
