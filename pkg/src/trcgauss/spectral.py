"""Spectra on a uniform frequency grid, Toeplitz matrices and their eigenvalues.

A :class:`Spectrum` holds samples of a nonnegative function on the uniform
grid ``omega_k = 2*pi*k/n``, ``k = 0..n-1``.  For periodic integrands the
trapezoid rule on that grid is the plain sample mean, which is what
:func:`spectral_mean` computes; it converges geometrically fast for the
analytic spectra used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DEFAULT_GRID",
    "Spectrum",
    "AutocorrSeq",
    "ToeplitzCheckReport",
    "EigenConvergenceError",
    "spectral_mean",
    "white_spectrum",
    "ar1_spectrum",
    "ar1_autocorr",
    "autocorr_from_spectrum",
    "two_level_spectrum",
    "tabulated_spectrum",
    "spectrum_from_config",
    "toeplitz_from_autocorr",
    "sym_eigenvalues",
    "evd_check",
]

DEFAULT_GRID = 4096


class EigenConvergenceError(RuntimeError):
    """Jacobi sweeps did not drive the off-diagonal mass below tolerance."""


@dataclass(frozen=True)
class Spectrum:
    """Samples of a spectral density on ``[0, 2*pi)``.

    Parameters
    ----------
    values : array_like
        One nonnegative sample per grid point.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("spectrum grid is empty")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectrum has non-finite samples")
        if np.any(v < 0):
            raise ValueError("spectrum must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def grid_size(self) -> int:
        return self.values.size

    @property
    def omega(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.grid_size) / self.grid_size

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.values > 0))

    def mean(self, G: Callable | None = None) -> float:
        return spectral_mean(self, G)

    def __len__(self):
        return self.grid_size


def spectral_mean(s, G: Callable | None = None) -> float:
    """``(1/2pi) * integral of G(s(omega))`` by the periodic trapezoid rule.

    ``s`` may be a :class:`Spectrum` or a plain array of grid samples.
    ``G`` defaults to the identity and must accept numpy arrays.
    """
    values = s.values if isinstance(s, Spectrum) else np.asarray(s, dtype=float)
    if values.size == 0:
        raise ValueError("cannot integrate over an empty grid")
    if G is not None:
        values = G(values)
    return float(np.mean(values))


def white_spectrum(level: float, grid_size: int = DEFAULT_GRID) -> Spectrum:
    return Spectrum(np.full(grid_size, float(level)))


def ar1_spectrum(a: float, sw2: float = 1.0, grid_size: int = DEFAULT_GRID) -> Spectrum:
    """Spectrum of the AR(1) process with autocorrelation ``sw2 * a^|k|``.

    ``S(omega) = sw2*(1 - a^2) / (1 - 2a*cos(omega) + a^2)``.
    """
    if not abs(a) < 1:
        raise ValueError("AR(1) coefficient must satisfy |a| < 1")
    if sw2 <= 0:
        raise ValueError("AR(1) variance must be positive")
    w = 2.0 * np.pi * np.arange(grid_size) / grid_size
    return Spectrum(sw2 * (1.0 - a * a) / (1.0 - 2.0 * a * np.cos(w) + a * a))


def two_level_spectrum(low: float, high: float, fraction: float = 0.5,
                       grid_size: int = DEFAULT_GRID) -> Spectrum:
    """``low`` on the band ``|omega| < pi*fraction`` (wrapped), ``high`` elsewhere.

    Grid points on the band edge take the midpoint value, so the grid mean
    equals the exact mean whenever the edge falls on a node.
    """
    if not 0 < fraction < 1:
        raise ValueError("band fraction must lie in (0, 1)")
    k = np.arange(grid_size)
    # distance to omega = 0 in units of grid steps; compare in the same units
    dist = np.minimum(k, grid_size - k).astype(float)
    edge = 0.5 * fraction * grid_size
    vals = np.where(dist < edge, float(low), float(high))
    vals[np.isclose(dist, edge, rtol=0.0, atol=1e-9)] = 0.5 * (low + high)
    return Spectrum(vals)


def tabulated_spectrum(values: Sequence[float]) -> Spectrum:
    return Spectrum(np.asarray(values, dtype=float))


def spectrum_from_config(cfg: dict, grid_size: int = DEFAULT_GRID) -> Spectrum:
    """Build a spectrum from its JSON description.

    Recognised shapes::

        {"type": "white", "level": 1.0}
        {"type": "ar1", "a": 0.5, "sw2": 1.0}
        {"type": "two_level", "low": 0.5, "high": 2.0, "fraction": 0.5}
        {"type": "tabulated", "values": [...]}
    """
    kind = cfg.get("type")
    params = {k: v for k, v in cfg.items() if k != "type"}
    allowed = {
        "white": {"level"},
        "ar1": {"a", "sw2"},
        "two_level": {"low", "high", "fraction"},
        "tabulated": {"values"},
    }
    if kind not in allowed:
        raise ValueError(f"unknown spectrum type {kind!r}")
    extra = set(params) - allowed[kind]
    if extra:
        raise ValueError(f"unknown keys for {kind} spectrum: {sorted(extra)}")
    if kind == "white":
        return white_spectrum(params.get("level", 1.0), grid_size)
    if kind == "ar1":
        return ar1_spectrum(params["a"], params.get("sw2", 1.0), grid_size)
    if kind == "two_level":
        return two_level_spectrum(params["low"], params["high"],
                                  params.get("fraction", 0.5), grid_size)
    return tabulated_spectrum(params["values"])


@dataclass(frozen=True)
class AutocorrSeq:
    """Autocorrelation lags ``r(0..K)``; ``r(-k) = r(k)`` and ``r(k) = 0`` beyond ``K``."""

    lags: np.ndarray

    def __post_init__(self):
        r = np.array(self.lags, dtype=float).ravel()
        if r.size == 0 or not r[0] > 0:
            raise ValueError("autocorrelation needs r(0) > 0")
        r.setflags(write=False)
        object.__setattr__(self, "lags", r)

    def __call__(self, k):
        k = np.abs(np.asarray(k))
        out = np.zeros(k.shape)
        inside = k < self.lags.size
        out[inside] = self.lags[k[inside]]
        return out

    def spectrum(self, grid_size: int = DEFAULT_GRID) -> Spectrum:
        """``r(0) + 2*sum_k r(k)*cos(k*omega)`` sampled on the grid."""
        w = 2.0 * np.pi * np.arange(grid_size) / grid_size
        k = np.arange(1, self.lags.size)
        vals = self.lags[0] + 2.0 * np.cos(np.outer(w, k)) @ self.lags[1:]
        if np.any(vals <= 0):
            raise ValueError("autocorrelation does not define a positive spectrum")
        return Spectrum(vals)


def ar1_autocorr(a: float, sw2: float = 1.0, tol: float = 1e-12) -> AutocorrSeq:
    """AR(1) lags ``sw2 * a^k`` truncated once ``|a|^K < tol``."""
    if not abs(a) < 1:
        raise ValueError("AR(1) coefficient must satisfy |a| < 1")
    K = 0 if a == 0 else int(np.ceil(np.log(tol) / np.log(abs(a))))
    return AutocorrSeq(sw2 * a ** np.arange(K + 1))


def autocorr_from_spectrum(s: Spectrum, tol: float = 1e-12) -> AutocorrSeq:
    """Lags ``r(k) = mean(S(omega) cos(k omega))`` for ``k < grid_size/2``.

    Trailing lags below ``tol * r(0)`` in magnitude are dropped.
    """
    G = s.grid_size
    r = np.fft.rfft(s.values).real / G
    r = r[: (G + 1) // 2]
    big = np.flatnonzero(np.abs(r) > tol * r[0])
    return AutocorrSeq(r[: big[-1] + 1])


def toeplitz_from_autocorr(r: AutocorrSeq, n: int) -> np.ndarray:
    """``n x n`` symmetric Toeplitz matrix with entries ``r(|k - l|)``."""
    if n < 1:
        raise ValueError("matrix order must be positive")
    idx = np.arange(n)
    m = r(idx[:, None] - idx[None, :])
    m.setflags(write=False)
    return m


def _round_robin(n: int):
    """Pairings of a round-robin tournament on ``n`` (even) players.

    Every unordered pair appears exactly once over the ``n - 1`` rounds and
    the pairs inside a round are disjoint, so their rotations commute.
    """
    players = list(range(n))
    for _ in range(n - 1):
        top, bottom = players[: n // 2], players[n // 2:][::-1]
        yield np.array(top), np.array(bottom)
        players = [players[0]] + [players[-1]] + players[1:-1]


def sym_eigenvalues(m, tol: float = 1e-12, max_sweeps: int = 50) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps follow a round-robin ordering, so each round annihilates
    ``n/2`` disjoint off-diagonal entries at once.  Iteration stops when the
    off-diagonal Frobenius norm falls below ``tol`` times the full Frobenius
    norm.

    Returns
    -------
    numpy.ndarray
        Eigenvalues sorted ascending.

    Raises
    ------
    EigenConvergenceError
        If ``max_sweeps`` sweeps are not enough.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix must be symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    if n <= 1:
        return np.diag(a).copy()
    if n % 2:
        # pad with an isolated zero row/column: it never mixes with the rest
        a = np.pad(a, ((0, 1), (0, 1)))
    N = a.shape[0]
    frob = np.linalg.norm(a)
    rounds = list(_round_robin(N))

    def off_norm(x):
        return np.linalg.norm(x - np.diag(np.diag(x)))

    for _ in range(max_sweeps):
        if off_norm(a) <= tol * frob:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            app, aqq = a[p, p], a[q, q]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                tau = np.where(active, (aqq - app) / (2.0 * apq), 0.0)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c[None, :] - cq * s[None, :]
            a[:, q] = cp * s[None, :] + cq * c[None, :]
            a[p, q] = 0.0
            a[q, p] = 0.0
    else:
        if off_norm(a) > tol * frob:
            raise EigenConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off_norm(a):.3e})")
    eig = np.diag(a)
    if N != n:
        # drop the padding eigenvalue (exactly 0, never rotated)
        eig = np.delete(eig, n)
    return np.sort(eig)


@dataclass(frozen=True)
class ToeplitzCheckReport:
    n: int
    label: str
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def evd_check(r: AutocorrSeq, n_list: Sequence[int], G_list,
              grid_size: int = DEFAULT_GRID) -> list[ToeplitzCheckReport]:
    """Compare eigenvalue averages of Toeplitz sections with spectral averages.

    For every order ``n`` and test function ``G`` the report holds
    ``lhs = mean_i G(eig_i(T_n))`` and ``rhs = (1/2pi) * integral of G(S_Z)``,
    where ``S_Z`` is the spectrum of ``r``.

    ``G_list`` is a mapping ``label -> callable`` or a sequence of callables.
    """
    s = r.spectrum(grid_size)
    if not s.strictly_positive:
        raise ValueError("eigenvalue distribution check needs a positive spectrum")
    items = G_list.items() if hasattr(G_list, "items") else (
        (getattr(G, "__name__", f"G{i}"), G) for i, G in enumerate(G_list))
    items = list(items)
    rhs = {label: spectral_mean(s, G) for label, G in items}
    reports = []
    for n in n_list:
        eig = sym_eigenvalues(toeplitz_from_autocorr(r, n))
        for label, G in items:
            reports.append(ToeplitzCheckReport(int(n), label, float(np.mean(G(eig))), rhs[label]))
    return reports
