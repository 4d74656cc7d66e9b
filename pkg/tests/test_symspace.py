"""Kernel functions, space parameter validation, and the preset catalog."""

import math

import numpy as np
import pytest

from tubeflow import symspace
from tubeflow.symspace import SpaceError, SpaceParams, catalog_entries, catalog_lookup, focal_radius


THETAS = np.linspace(0.05, 1.4, 17)


def test_kernels_hyperbolic_values():
    assert symspace.sc(-1, 0.7) == pytest.approx(math.cosh(0.7), rel=1e-15)
    assert symspace.ss(-1, 0.7) == pytest.approx(math.sinh(0.7), rel=1e-15)
    assert symspace.tt(-1, 0.7) == pytest.approx(-math.tanh(0.7), rel=1e-15)
    assert symspace.ct(-1, 0.7) == pytest.approx(math.cosh(0.7) / math.sinh(0.7), rel=1e-15)


def test_kernels_circular_values():
    assert symspace.sc(+1, 0.7) == pytest.approx(math.cos(0.7), rel=1e-15)
    assert symspace.ss(+1, 0.7) == pytest.approx(math.sin(0.7), rel=1e-15)
    assert symspace.tt(+1, 0.7) == pytest.approx(math.tan(0.7), rel=1e-15)


@pytest.mark.parametrize("eps", [-1, +1])
def test_tt_ct_product_is_epsilon(eps):
    # tt = eps*ss/sc and ct = sc/ss, so the product collapses to eps.
    for th in THETAS:
        assert symspace.tt(eps, th) * symspace.ct(eps, th) == pytest.approx(eps, rel=1e-13)


@pytest.mark.parametrize("eps", [-1, +1])
def test_sc_derivative_matches_minus_eps_ss(eps):
    h = 1e-6
    for th in THETAS:
        fd = (symspace.sc(eps, th + h) - symspace.sc(eps, th - h)) / (2 * h)
        assert fd == pytest.approx(-eps * symspace.ss(eps, th), abs=5e-10)


def test_kernels_reject_bad_epsilon():
    with pytest.raises(SpaceError):
        symspace.sc(0, 1.0)
    with pytest.raises(SpaceError):
        symspace.tt(2, 1.0)


def test_space_params_normalizes_dict_input():
    sp = SpaceParams(epsilon=-1, b=1.0, mv={2: 1, 1: 2}, mh={1: 2})
    assert sp.mv == ((1, 2), (2, 1))
    assert sp.mh == ((1, 2),)
    assert sp.mult_v(1) == 2 and sp.mult_v(2) == 1
    assert sp.mult_h(1) == 2 and sp.mult_h(0) == 0
    assert sp.mv_total == 3
    assert sp.mh_total == 2


def test_space_params_validation():
    with pytest.raises(SpaceError):
        SpaceParams(epsilon=0, b=1.0, mv={1: 1}, mh={1: 1})
    with pytest.raises(SpaceError):
        SpaceParams(epsilon=-1, b=0.0, mv={1: 1}, mh={1: 1})
    with pytest.raises(SpaceError):
        SpaceParams(epsilon=-1, b=1.0, mv={3: 1}, mh={1: 1})  # bad vertical slot
    with pytest.raises(SpaceError):
        SpaceParams(epsilon=-1, b=1.0, mv={1: 0}, mh={1: 1})  # no vertical mass
    with pytest.raises(SpaceError):
        SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={2: 1}, k0=1)  # k0 slot empty
    with pytest.raises(SpaceError):
        SpaceParams(epsilon=-1, b=1.0, mv={1: -1}, mh={1: 1})


def test_invariant_mode_flag():
    assert SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 1}).invariant_mode
    assert not SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 1, 2: 1}).invariant_mode
    assert not SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={0: 1, 1: 1}).invariant_mode
    sp = SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 1, 2: 1}, k0=2)
    assert not sp.invariant_mode
    with pytest.raises(SpaceError):
        sp.require_invariant("bounds")


def test_density_override():
    sp = SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 2}, density={1: 1, 0: 1})
    assert sp.density_pairs == ((0, 1), (1, 1))
    base = SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 2})
    assert base.density_pairs == base.mh


def test_focal_radius_infinite_for_hyperbolic():
    sp = catalog_lookup("RH3/RH1").params
    assert focal_radius(sp) == math.inf


def test_focal_radius_compact_exact_values():
    # Horizontal slot k=1 dominates: pi/(2b), bit-exact.
    sp = SpaceParams(epsilon=+1, b=2.0, mv={1: 1}, mh={1: 1})
    assert focal_radius(sp) == math.pi / 4.0
    # No horizontal cosine factor and mv[2] == 0: the k=1/2 sine slot gives pi/b.
    sp2 = SpaceParams(epsilon=+1, b=1.0, mv={1: 1}, mh={0: 1}, k0=0)
    assert focal_radius(sp2) == math.pi
    # A k=2 horizontal slot halves the radius again.
    sp3 = SpaceParams(epsilon=+1, b=1.0, mv={1: 1}, mh={2: 1}, k0=2)
    assert focal_radius(sp3) == math.pi / 4.0
    # mv[2] != 0 promotes the vertical zero to k=1.
    sp4 = SpaceParams(epsilon=+1, b=1.0, mv={2: 1}, mh={0: 1}, k0=0)
    assert focal_radius(sp4) == math.pi / 2.0


def test_catalog_preset_multiplicities():
    cases = {
        "RH3/RH1": ({1: 1}, {1: 1}),
        "RH4/RH1": ({1: 2}, {1: 1}),
        "RH4/RH2": ({1: 1}, {1: 2}),
        "CH2/CH1": ({2: 1}, {1: 2}),
        "CH3/CH1": ({1: 2, 2: 1}, {1: 2}),
        "CH3/CH2": ({2: 1}, {1: 4}),
        "QH2/QH1": ({2: 3}, {1: 4}),
        "OH2/OH1": ({2: 7}, {1: 8}),
    }
    def nonzero(pairs):
        return {k: m for k, m in pairs if m}

    for name, (mv, mh) in cases.items():
        sp = catalog_lookup(name).params
        assert sp is not None, name
        assert nonzero(sp.mv) == mv, name
        assert nonzero(sp.mh) == mh, name
        assert sp.epsilon == -1 and sp.k0 == 1
        assert sp.invariant_mode


def test_catalog_parametric_names():
    sp = catalog_lookup("RH7/RH2").params
    assert {k: m for k, m in sp.mv if m} == {1: 4} and {k: m for k, m in sp.mh if m} == {1: 2}
    sp = catalog_lookup("CH4/CH2").params
    assert {k: m for k, m in sp.mv if m} == {1: 2, 2: 1} and {k: m for k, m in sp.mh if m} == {1: 4}
    sp = catalog_lookup("QH3/QH1").params
    assert {k: m for k, m in sp.mv if m} == {1: 4, 2: 3} and {k: m for k, m in sp.mh if m} == {1: 4}


def test_catalog_rejects_degenerate_indices():
    with pytest.raises(SpaceError):
        catalog_lookup("RH2/RH1")  # no vertical mass left
    with pytest.raises(SpaceError):
        catalog_lookup("OH3/OH1")
    with pytest.raises(SpaceError):
        catalog_lookup("XH3/XH1")


def test_catalog_informational_entries():
    entry = catalog_lookup("SU(3)/SO(3)")
    assert entry.informational
    assert entry.params is None
    names = [e.name for e in catalog_entries()]
    assert "RH3/RH1" in names and "Sp(2)" in names
    # informational rows never carry numeric parameters
    for e in catalog_entries():
        if e.name in ("SU(3)/SO(3)", "SU(6)/Sp(3)", "SU(3)", "E6/F4", "Sp(2)"):
            assert e.informational
        else:
            assert not e.informational
