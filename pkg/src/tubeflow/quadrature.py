"""One-dimensional quadrature and bracketed root finding."""
from __future__ import annotations

import functools
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureError",
    "simpson_weights",
    "adaptive_simpson",
    "gauss_legendre",
    "bisect_root",
    "invert_increasing",
]


class QuadratureError(RuntimeError):
    """Quadrature or inversion could not meet its contract."""


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for the n+1 uniform nodes of an n-cell grid.

    n must be even and >= 2.  sum(w * f(nodes)) approximates the integral with
    O(h^4) error for smooth f.
    """
    if n < 2 or n % 2 != 0:
        raise QuadratureError(f"composite Simpson needs an even cell count >= 2, got n={n}")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def _simpson_halves(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _simpson_halves(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) + _simpson_halves(
        f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1
    )


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-13, max_depth: int = 48) -> float:
    """Adaptive Simpson integral of f over [a, b] with Richardson correction.

    The interval is split until the local Richardson estimate is below the
    (subdivided) tolerance; max_depth bounds the recursion.
    """
    if a == b:
        return 0.0
    fa = float(f(a))
    fb = float(f(b))
    m = 0.5 * (a + b)
    fm = float(f(m))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return float(_simpson_halves(f, a, fa, b, fb, m, fm, whole, tol, max_depth))


@functools.lru_cache(maxsize=8)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached per order."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def bisect_root(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-12, max_iter: int = 200) -> float:
    """Bisection root of f on [lo, hi]; f(lo) and f(hi) must bracket a sign change."""
    flo = float(f(lo))
    fhi = float(f(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise QuadratureError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol:
            return mid
        fm = float(f(mid))
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def invert_increasing(fn: Callable[[float], float], y: float, lo: float, hi: float, xtol: float = 1e-12) -> float:
    """Solve fn(x) = y for increasing fn on [lo, hi] by bisection to |dx| <= xtol."""
    g = lambda x: fn(x) - y
    glo = g(lo)
    ghi = g(hi)
    if glo > 0.0 or ghi < 0.0:
        raise QuadratureError(f"target {y} outside fn range [{fn(lo)}, {fn(hi)}] on [{lo}, {hi}]")
    return bisect_root(g, lo, hi, xtol=xtol)
