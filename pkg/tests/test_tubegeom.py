"""Curvature formulas, radial densities, volumes, and static bounds.

Frozen reference numbers were produced by an arbitrary-precision evaluation
(mpmath, 40 digits) of the closed-form expressions and are quoted to full
double precision.
"""

import math

import numpy as np
import pytest

from tubeflow import tubegeom
from tubeflow.grid import constant_profile, cosine_profile, profile_from_values
from tubeflow.quadrature import QuadratureError
from tubeflow.symspace import SpaceParams, catalog_lookup
from tubeflow.tubegeom import (
    PointData,
    TubeGeomError,
    avg_h,
    bounds_report,
    delta1,
    delta2,
    delta_inv,
    f_density,
    f_density_log_deriv,
    laplacian_radial,
    mean_curvature,
    psi,
    psi0_values,
    psi_bar,
    rho,
    rho_values,
    unit_sphere_volume,
    vhat_values,
    vol_b,
    vol_d,
    vol_m,
    volume_weights,
)


RH3 = catalog_lookup("RH3/RH1").params
CH2 = catalog_lookup("CH2/CH1").params
MIXED = SpaceParams(epsilon=-1, b=1.0, mv={1: 2, 2: 1}, mh={1: 2})


def test_point_data_validation():
    with pytest.raises(TubeGeomError):
        PointData(r=0.0)
    with pytest.raises(TubeGeomError):
        PointData(r=1.0, g=-0.1)
    with pytest.raises(TubeGeomError):
        PointData(r=math.nan)


def test_psi_scalar_oracles():
    # sinh(1)*cosh(1)
    assert psi(RH3, PointData(r=1.0)) == pytest.approx(1.8134302039235093, rel=1e-14)
    # sinh(0.5)^2 * (sinh(1)/2) * cosh(0.5)^2
    assert psi(MIXED, PointData(r=0.5)) == pytest.approx(0.20288347957745304, rel=1e-14)


def test_psi_slope_factor():
    # psi(r, g)/psi(r, 0) is the graph factor sqrt(sc^2+g^2)/sc.
    for r in (0.3, 0.8, 1.7):
        for g in (0.0, 0.25, 1.5):
            ratio = psi(MIXED, PointData(r=r, g=g)) / psi(MIXED, PointData(r=r))
            expect = math.sqrt(math.cosh(r) ** 2 + g * g) / math.cosh(r)
            assert ratio == pytest.approx(expect, rel=1e-13)


def test_vhat_is_exactly_one_at_zero_slope():
    r = np.linspace(0.2, 2.0, 7)
    v = vhat_values(MIXED, r, np.zeros_like(r))
    assert np.all(v == 1.0)


def test_rho_scalar_oracle():
    # 2*coth(0.5) + 2*coth(1) + 2*tanh(0.5)
    assert rho(MIXED, PointData(r=0.5)) == pytest.approx(7.878211712995988, rel=1e-14)


def test_rho_large_radius_asymptote():
    # All cot/tan kernels flatten to 1, leaving b*(mv1 + 2*mv2 + mh1).
    assert rho(MIXED, PointData(r=20.0)) == pytest.approx(6.0, rel=1e-12)


def test_rho_sign_modes():
    pd0 = PointData(r=0.7)
    assert rho(MIXED, pd0, "eq250") == rho(MIXED, pd0, "eq34")
    pdg = PointData(r=0.7, g=0.4)
    assert rho(MIXED, pdg, "eq250") != rho(MIXED, pdg, "eq34")
    with pytest.raises(TubeGeomError):
        rho(MIXED, pd0, "eq999")


def test_rho_eq34_nonnegative_hyperbolic():
    # Every bracket term is >= 0 in eq34 mode for epsilon=-1.
    rr, gg = np.meshgrid(np.linspace(0.05, 3.0, 40), np.linspace(0.0, 2.0, 15))
    vals = rho_values(CH2, rr.ravel(), gg.ravel(), "eq34")
    assert np.all(vals >= 0.0)


def test_mean_curvature_scalar_oracle():
    # coth(1) + tanh(1) - 0.3/cosh(1)^2
    sp = catalog_lookup("RH3/RH1").params
    got = mean_curvature(sp, PointData(r=1.0, g=0.0, lap=0.3, hess=0.0))
    assert got == pytest.approx(1.9486371389708883, rel=1e-14)


def test_mean_curvature_reduces_to_rho():
    pd = PointData(r=0.9, g=0.6)
    assert mean_curvature(MIXED, pd) == pytest.approx(rho(MIXED, pd), rel=1e-15)


def test_psi_bar_limit_and_oracle():
    assert psi_bar(MIXED, 0.0) == 1.0
    # (sinh 1)^2 * (sinh 2 / 2) * cosh(1)^2
    assert psi_bar(MIXED, 1.0) == pytest.approx(5.963518004585568, rel=1e-13)
    ss = np.linspace(0.0, 2.5, 41)
    vals = np.array([psi_bar(MIXED, s) for s in ss])
    assert np.all(vals > 0.0)


def test_psi_bar_matches_psi0():
    # s^mv * psi_bar(s) is the zero-slope volume density.
    for s in (0.2, 0.7, 1.3):
        lhs = s**MIXED.mv_total * psi_bar(MIXED, s)
        rhs = float(psi0_values(MIXED, np.array([s]))[0])
        assert lhs == pytest.approx(rhs, rel=1e-13)


def test_f_density_oracle_and_pole():
    sp = SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 2})
    assert f_density(sp, 0.5) == pytest.approx(0.2715403174076219, rel=1e-14)  # sinh(0.5)^2
    assert f_density(sp, 0.0) == 0.0
    flat = SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 1}, density={0: 2})
    assert f_density(flat, 0.5) == pytest.approx(0.25, rel=1e-15)
    assert f_density_log_deriv(flat, 0.5) == pytest.approx(4.0, rel=1e-15)
    assert f_density_log_deriv(sp, 0.5) == pytest.approx(2.0 / math.tanh(0.5), rel=1e-14)


def test_delta_closed_forms():
    # RH3/RH1: integrands sinh*cosh and sinh.
    assert delta1(RH3, 0.5) == pytest.approx((math.cosh(1.0) - 1.0) / 4.0, abs=1e-13)
    assert delta2(RH3, 0.5) == pytest.approx(math.cosh(0.5) - 1.0, abs=1e-13)
    # CH2/CH1: sinh*cosh^3 and sinh*cosh^2.
    assert delta1(CH2, 0.7) == pytest.approx((math.cosh(0.7) ** 4 - 1.0) / 4.0, abs=1e-12)
    assert delta2(CH2, 0.7) == pytest.approx((math.cosh(0.7) ** 3 - 1.0) / 3.0, abs=1e-12)
    assert delta1(RH3, 0.0) == 0.0
    assert delta2(RH3, 0.0) == 0.0


def test_delta_ordering_by_curvature_sign():
    # 1/cosh <= 1 shrinks delta2 below delta1; circular kernels reverse it.
    comp = SpaceParams(epsilon=+1, b=1.0, mv={1: 1}, mh={1: 1})
    for s in (0.2, 0.6, 1.1):
        assert delta2(RH3, s) <= delta1(RH3, s)
        assert delta2(comp, s) >= delta1(comp, s)


def test_delta_flat_limit():
    flat = SpaceParams(epsilon=-1, b=1e-4, mv={1: 2}, mh={1: 1})
    for s in (0.3, 0.7):
        assert delta1(flat, s) == pytest.approx(s**3 / 3.0, rel=1e-6)


def test_delta_inv_round_trip():
    for sp in (RH3, CH2, MIXED):
        y = delta1(sp, 0.7)
        assert delta_inv(1, sp, y) == pytest.approx(0.7, abs=1e-10)
        y2 = delta2(sp, 0.7)
        assert delta_inv(2, sp, y2) == pytest.approx(0.7, abs=1e-10)
    with pytest.raises(QuadratureError):
        delta_inv(1, RH3, -1.0)


def test_unit_sphere_volumes():
    assert unit_sphere_volume(0) == pytest.approx(2.0, rel=1e-15)
    assert unit_sphere_volume(1) == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert unit_sphere_volume(2) == pytest.approx(4.0 * math.pi, rel=1e-15)
    assert unit_sphere_volume(3) == pytest.approx(2.0 * math.pi**2, rel=1e-14)


def test_vol_b_oracle():
    # v_0 * integral of sinh over [0, 1] = 2*(cosh 1 - 1)
    assert vol_b(RH3, 1.0) == pytest.approx(1.0861612696304876, rel=1e-13)


def test_constant_profile_volumes():
    p = constant_profile(1.0, 64, 0.5)
    volb = vol_b(RH3, 1.0)
    # Vol(D) = v_mv * Vol(B) * delta1(r0); v_1 = 2*pi.
    want = 2.0 * math.pi * volb * delta1(RH3, 0.5)
    assert vol_d(RH3, p) == pytest.approx(want, rel=1e-9)
    assert vol_d(RH3, p) == pytest.approx(0.926570580157957, rel=1e-9)
    # Vol(M) = v_mv * r0^mv * psi_bar(r0) * Vol(B) for a constant profile.
    wantm = 2.0 * math.pi * 0.5 * psi_bar(RH3, 0.5) * volb
    assert vol_m(RH3, p) == pytest.approx(wantm, rel=1e-9)


def test_weights_sum_is_vol_m_exactly():
    p = cosine_profile(1.0, 96, 0.6, 0.1)
    w = volume_weights(MIXED, p)
    assert float(w.sum()) == vol_m(MIXED, p)
    assert np.all(w[1:] > 0.0)
    assert w[0] == 0.0  # density vanishes at the pole


def test_avg_h_constant_profile_is_rho():
    p = constant_profile(1.0, 32, 0.5)
    want = rho(RH3, PointData(r=0.5))
    for lap_mode in ("paper61", "full"):
        for sign_mode in ("eq250", "eq34"):
            assert avg_h(RH3, p, sign_mode, lap_mode) == pytest.approx(want, rel=1e-14)


def test_laplacian_modes():
    n = 32
    z = np.linspace(0.0, 1.0, n + 1)
    p = profile_from_values(1.0, z**2 + 0.25)
    sp = SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 2})
    bare = laplacian_radial(sp, p, "paper61")
    full = laplacian_radial(sp, p, "full")
    # interior: central differences are exact on quadratics
    i = 16  # z = 0.5
    assert bare[i] == pytest.approx(2.0, abs=1e-10)
    assert full[i] == pytest.approx(2.0 + 2.0 / math.tanh(0.5) * 1.0, abs=1e-9)
    # right end has zero mirrored slope, so the drift term drops out
    assert full[-1] == bare[-1]
    # polar node carries the removable-singularity multiplicity
    assert full[0] == pytest.approx(sp.mh_total * bare[0], rel=1e-15)
    with pytest.raises(TubeGeomError):
        laplacian_radial(sp, p, "spectral")


def test_bounds_report_constant_profile_rhat1():
    p = constant_profile(1.0, 64, 0.5)
    rep = bounds_report(RH3, p)
    assert rep.r_hat1 == pytest.approx(0.5, abs=1e-8)
    assert rep.r_f == math.inf
    assert rep.a_rb == 1.0


def test_bounds_report_frozen_fixture():
    # Canonical cosine fixture; all values frozen from the first oracle run.
    p = cosine_profile(1.0, 200, 0.5, 0.05)
    rep = bounds_report(RH3, p)
    frozen = {
        "r_hat1": 0.4795722504773039,
        "r_hat2": 1.1404238798681945,
        "a_rb": 1.0,
        "prop63_bound": 0.8876840526995693,
        "c_prime": 1.433086385448774,
        "hbar_lower": 0.18375731054949798,
        "k1": 5.804367102736128,
        "k2": 1.065823797824686,
        "vhat_bound": 6.236131715678742,
        "thmc_lhs": 3.8118391886806844,
        "thmc_rhs": 1.4729759763261996,
    }
    flat = rep.to_flat_dict()
    for key, want in frozen.items():
        assert flat[key] == pytest.approx(want, rel=1e-9), key
    assert flat["thmc_satisfied"] is False
    assert flat["r_f"] is None  # infinite focal radius serializes as null


def test_bounds_report_thmc_small_ball():
    # Small base ball drops Vol(M0) below the threshold.
    p = constant_profile(0.25, 64, 0.5)
    rep = bounds_report(CH2, p)
    assert rep.thmc_satisfied
    assert rep.thmc_lhs / rep.thmc_rhs == pytest.approx(0.02724883856935992, rel=1e-9)


def test_bounds_report_requires_invariant_horizontal_structure():
    sp = SpaceParams(epsilon=-1, b=1.0, mv={1: 1}, mh={1: 1, 2: 1})
    p = constant_profile(1.0, 32, 0.5)
    with pytest.raises(Exception):
        bounds_report(sp, p)


def test_prop63_monotone_in_vol_m():
    # delta2-inverse is increasing, so growing Vol(M0) never shrinks the bound.
    base = delta2(RH3, 0.4)
    vals = [
        delta_inv(2, RH3, base + volm / (2.0 * math.pi * 2.0))
        for volm in (1.0, 2.0, 4.0, 8.0)
    ]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_c_prime_positive_on_fixture():
    cp = tubegeom.c_prime(RH3, 0.45, 0.55)
    assert cp > 0.0
    # shrinking the window never lowers the minimum
    assert tubegeom.c_prime(RH3, 0.5, 0.55) >= cp
    with pytest.raises(TubeGeomError):
        tubegeom.c_prime(RH3, 0.0, 1.0)
