"""Small scalar optimizers shared by the exponent modules."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ConvergenceError(RuntimeError):
    """A numerical search stopped without meeting its tolerance."""


def golden_max(f: Callable[[float], float], a: float, b: float,
               tol: float = 1e-10, max_iter: int = 500) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]`` by golden-section search.

    Returns ``(x, f(x))``; the bracket end points are compared as well, so a
    maximum sitting on the boundary is returned exactly.
    """
    fa, fb = f(a), f(b)
    lo, hi = a, b
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo) + abs(hi)):
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    best = max([(fc, c), (fd, d), (fa, a), (fb, b)], key=lambda t: t[0])
    return best[1], best[0]


def scan_then_golden(f: Callable[[float], float], a: float, b: float, points: int = 64,
                     tol: float = 1e-10, fine_step: float = 1e-5,
                     multimodal_tol: float = 1e-8) -> tuple[float, float, bool]:
    """Maximize ``f`` on ``[a, b]``, guarding the unimodality assumption.

    A uniform scan with ``points`` nodes looks for separate local maxima.
    With a single peak the neighbouring scan cell is refined by golden
    section.  When two peaks differ by more than ``multimodal_tol`` the
    search falls back to a fine grid of step ``fine_step`` and refines the
    best cell.

    Returns
    -------
    x, fx, multimodal
    """
    xs = np.linspace(a, b, points)
    ys = np.array([f(x) for x in xs])
    peaks = [i for i in range(points)
             if (i == 0 or ys[i] >= ys[i - 1]) and (i == points - 1 or ys[i] >= ys[i + 1])]
    multimodal = len(peaks) > 1 and (max(ys[peaks]) - min(ys[peaks])) > multimodal_tol
    if multimodal:
        m = int(math.ceil((b - a) / fine_step)) + 1
        xs = np.linspace(a, b, m)
        ys = np.array([f(x) for x in xs])
    i = int(np.argmax(ys))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    x, fx = golden_max(f, lo, hi, tol=tol)
    if ys[i] > fx:
        x, fx = xs[i], ys[i]
    return float(x), float(fx), multimodal


def bisect_increasing(f: Callable[[float], float], target: float, lo: float, hi: float,
                      max_iter: int = 400) -> float:
    """Solve ``f(x) = target`` for nondecreasing ``f`` with ``f(lo) <= target <= f(hi)``.

    Runs until the bracket stops shrinking in floating point.
    """
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def scan_then_brent(f_many: Callable[[np.ndarray], np.ndarray], f: Callable[[float], float],
                    a: float, b: float, points: int = 32, xtol: float = 1e-10,
                    fine_points: int = 4096, multimodal_tol: float = 1e-8
                    ) -> tuple[float, float, bool]:
    """Maximize ``f`` on ``[a, b]`` from a vectorized scan plus bounded Brent.

    ``f_many`` evaluates the objective on an array of nodes at once and
    ``f`` on a single point.  Separate local maxima on the scan trigger a
    denser scan with ``fine_points`` nodes before the refinement.

    Returns
    -------
    x, fx, multimodal
    """
    xs = np.linspace(a, b, points)
    ys = np.asarray(f_many(xs), dtype=float)
    peaks = [i for i in range(points)
             if (i == 0 or ys[i] >= ys[i - 1]) and (i == points - 1 or ys[i] >= ys[i + 1])]
    multimodal = len(peaks) > 1 and (max(ys[peaks]) - min(ys[peaks])) > multimodal_tol
    if multimodal:
        xs = np.linspace(a, b, fine_points)
        ys = np.concatenate([f_many(chunk) for chunk in np.array_split(xs, max(1, fine_points // 256))])
    i = int(np.argmax(ys))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": xtol})
    x, fx = float(res.x), float(-res.fun)
    if ys[i] > fx:
        x, fx = float(xs[i]), float(ys[i])
    return x, fx, multimodal
