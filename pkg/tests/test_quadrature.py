"""Integration and root-finding primitives."""

import math

import numpy as np
import pytest

from tubeflow.quadrature import (
    QuadratureError,
    adaptive_simpson,
    bisect_root,
    gauss_legendre,
    invert_increasing,
    simpson_weights,
)


def test_simpson_weights_exact_on_cubics():
    # Simpson integrates polynomials up to degree 3 exactly.
    n, a, b = 10, 0.0, 2.0
    h = (b - a) / n
    z = np.linspace(a, b, n + 1)
    w = simpson_weights(n, h)
    assert w.sum() == pytest.approx(b - a, rel=1e-14)
    vals = 3.0 * z**3 - z**2 + 4.0 * z - 1.0
    exact = 3.0 * b**4 / 4 - b**3 / 3 + 2.0 * b**2 - b
    assert float(w @ vals) == pytest.approx(exact, rel=1e-13)


def test_simpson_weights_reject_odd_or_tiny_n():
    with pytest.raises(QuadratureError):
        simpson_weights(5, 0.1)
    with pytest.raises(QuadratureError):
        simpson_weights(0, 0.1)


def test_simpson_weights_fourth_order():
    errs = []
    for n in (8, 16, 32):
        h = 1.0 / n
        z = np.linspace(0.0, 1.0, n + 1)
        w = simpson_weights(n, h)
        errs.append(abs(float(w @ np.sin(z)) - (1.0 - math.cos(1.0))))
    assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(16.0, rel=0.1)


def test_adaptive_simpson_known_integrals():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)
    assert adaptive_simpson(lambda x: math.exp(-x * x), 0.0, 3.0) == pytest.approx(
        0.8862073482595214, abs=1e-12
    )  # erf-based reference
    assert adaptive_simpson(lambda x: x, 2.0, 2.0) == 0.0
    assert adaptive_simpson(lambda x: math.sinh(x) * math.cosh(x), 0.0, 1.0) == pytest.approx(
        (math.cosh(2.0) - 1.0) / 4.0, abs=1e-13
    )


def test_gauss_legendre_nodes():
    x, w = gauss_legendre(12)
    assert w.sum() == pytest.approx(2.0, rel=1e-14)
    assert float((w * x**10).sum()) == pytest.approx(2.0 / 11.0, rel=1e-13)
    x2, _ = gauss_legendre(12)
    assert x2 is x  # cached
    with pytest.raises(ValueError):
        x[0] = 0.0  # read-only


def test_bisect_root():
    r = bisect_root(lambda x: x * x - 2.0, 0.0, 2.0, xtol=1e-13)
    assert r == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert bisect_root(lambda x: x, 0.0, 1.0) == 0.0  # endpoint hit
    with pytest.raises(QuadratureError):
        bisect_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_invert_increasing_round_trip():
    fn = lambda x: math.sinh(2.0 * x)
    for y in (0.1, 1.0, 3.0):
        x = invert_increasing(fn, y, 0.0, 5.0, xtol=1e-13)
        assert fn(x) == pytest.approx(y, abs=1e-11)
    with pytest.raises(QuadratureError):
        invert_increasing(fn, -0.5, 0.0, 5.0)
    with pytest.raises(QuadratureError):
        invert_increasing(fn, 1e9, 0.0, 5.0)
