"""Monitored pointwise quantities and discrete residual audits.

The slope diagnostics (u, v), the auxiliary curvature potential lambda, the
principal-curvature diagonal, and the graph Laplacian on the evolving tube
live here, together with the residual audits that measure how well the
semi-discrete solution satisfies the three printed evolution identities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid as gridmod
from . import tubegeom
from .symspace import SpaceParams, ct, sc, ss, tt
from .tubegeom import PointData, TubeGeomError

__all__ = [
    "AUDIT_IDS",
    "PointDiagnostics",
    "ResidualReport",
    "AuditContext",
    "u_hat",
    "v_hat",
    "lambda_values",
    "lambda_fn",
    "principal_curvatures_diag",
    "phi_kappa_phi",
    "laplace_beltrami_radial",
    "lb_cell_measures",
    "residual_audit",
]

AUDIT_IDS = ("id416", "id418", "id520")


def u_hat(space: SpaceParams, r: float, g: float) -> float:
    """Cosine of the angle between the tube normal and the radial direction.

    Computed as 1/sqrt(1+(g/sc)^2) so that u == 1.0 bit-exactly at g == 0.
    """
    return float(1.0 / tubegeom.vhat_values(space, r, g))


def v_hat(space: SpaceParams, r: float, g: float) -> float:
    return float(tubegeom.vhat_values(space, r, g))


def lambda_values(space: SpaceParams, r, g, lap, hess):
    """Auxiliary curvature potential, vectorized.

    -u * (horizontal curvature sum + lap/sc^2 + g^2 k0b tt/(sc^2+g^2)
          - hess/(sc^2 (sc^2+g^2)))
    with sc taken in the radial slot.
    """
    r = np.asarray(r, dtype=float)
    g = np.asarray(g, dtype=float)
    b = space.b
    k0b = space.k0 * b
    c0 = sc(space.epsilon, k0b * r)
    c2 = c0 * c0
    s2 = c2 + g * g
    u = 1.0 / np.sqrt(1.0 + (g / c0) ** 2)
    horiz = np.zeros_like(r)
    for k in space.horizontal_keys:
        horiz = horiz + space.mult_h(k) * (k * b) * tt(space.epsilon, k * b * r)
    inner = horiz + lap / c2 + g * g * k0b * tt(space.epsilon, k0b * r) / s2 - hess / (c2 * s2)
    return -u * inner


def lambda_fn(space: SpaceParams, pd: PointData) -> float:
    return float(lambda_values(space, pd.r, pd.g, pd.lap, pd.hess))


@dataclass(frozen=True)
class PointDiagnostics:
    """Per-point monitor bundle.

    kappa_vertical lists (k, multiplicity, value) for the nonzero vertical
    slots; kappa_horizontal is the generic horizontal value carrying
    multiplicity mh_total - 1; kappa_radial absorbs the trace so that
    sum(mult * kappa) == H exactly.  phi_a2 is the graph-slope weighted
    squared second-fundamental-form diagonal (monitor only, never a gate).
    """

    u: float
    v: float
    lam: float
    kappa_vertical: tuple[tuple[int, int, float], ...]
    kappa_horizontal: float
    kappa_radial: float
    phi_a2: float


def phi_kappa_phi(v_sup: float, v: float, a2_diag: float) -> tuple[float, float, float]:
    """Barrier weight chain: kappa = 1/(2 v_sup^2), phi(v) = v^2/(1-kappa v^2).

    Returns (kappa, phi, phi*a2_diag).  Requires v_sup >= v >= 1 so kappa v^2
    never reaches 1 (it is at most 1/2).
    """
    if not (v_sup >= 1.0 and v >= 1.0):
        raise TubeGeomError(f"slope factors must be >= 1, got v_sup={v_sup}, v={v}")
    if v > v_sup * (1.0 + 1e-12):
        raise TubeGeomError(f"v={v} exceeds its supremum {v_sup}")
    v = min(v, v_sup)
    kappa = 1.0 / (2.0 * v_sup * v_sup)
    phi = v * v / (1.0 - kappa * v * v)
    return kappa, phi, phi * a2_diag


def principal_curvatures_diag(
    space: SpaceParams,
    pd: PointData,
    h: float,
    v_sup: float | None = None,
) -> PointDiagnostics:
    """Diagonal estimate of the principal curvatures at one point.

    Off-diagonal shape-operator corrections are excluded by design; the
    radial entry is defined as the trace residual, which makes the trace
    identity hold by construction.
    """
    b = space.b
    u = u_hat(space, pd.r, pd.g)
    v = 1.0 / u
    kv = []
    a2 = 0.0
    trace = 0.0
    for k, m in space.mv:
        if not m:
            continue
        val = (k * b) * ct(space.epsilon, k * b * pd.r) * u
        kv.append((k, m, val))
        trace += m * val
        a2 += m * val * val
    keys = space.horizontal_keys
    if not keys:
        raise TubeGeomError("principal-curvature diagonal needs a positive horizontal slot")
    kh = -(keys[0] * b) * tt(space.epsilon, keys[0] * b * pd.r) * u
    mh_generic = space.mh_total - 1
    trace += mh_generic * kh
    a2 += mh_generic * kh * kh
    k_rad = h - trace
    a2 += k_rad * k_rad
    lam = lambda_fn(space, pd)
    vs = v if v_sup is None else v_sup
    _, _, phi_a2 = phi_kappa_phi(vs, v, a2)
    return PointDiagnostics(
        u=u,
        v=v,
        lam=lam,
        kappa_vertical=tuple(kv),
        kappa_horizontal=kh,
        kappa_radial=k_rad,
        phi_a2=phi_a2,
    )


# -- graph Laplacian on the evolving tube --------------------------------------


def _omega(space: SpaceParams, z, r, g):
    return (
        tubegeom.f_density(space, z)
        * tubegeom.psi0_values(space, r)
        * tubegeom.vhat_values(space, r, g)
    )


def lb_cell_measures(space: SpaceParams, profile: gridmod.RadialProfile) -> np.ndarray:
    """Cell measures of the discrete graph Laplacian.

    These are the inner-product weights under which laplace_beltrami_radial
    is self-adjoint to round-off.
    """
    h = profile.h
    z = profile.z
    r = profile.r
    rp, _ = gridmod.derivatives(profile)
    w_node = _omega(space, z, r, np.abs(rp))
    rf = 0.5 * (r[:-1] + r[1:])
    gf = np.abs(r[1:] - r[:-1]) / h
    w_face0 = float(_omega(space, 0.5 * h, rf[0], gf[0]))
    q_pole = sum(m for _, m in space.density_pairs)
    out = np.empty_like(r)
    # the z=0 cell integrates the z^q_pole vanishing of the density exactly
    # in the local power model; elsewhere the midpoint rule is enough
    out[0] = 0.5 * h * w_face0 / (q_pole + 1.0)
    out[1:-1] = h * w_node[1:-1]
    out[-1] = 0.5 * h * w_node[-1]
    return out


def laplace_beltrami_radial(space: SpaceParams, profile: gridmod.RadialProfile, f) -> np.ndarray:
    """Radial Laplacian of f with respect to the induced tube metric.

    Conservative flux form with zero end fluxes (the discrete Neumann
    condition), face coefficients evaluated at midpoints, and the polar cell
    closed with the density's local vanishing power.  Self-adjoint to
    round-off under lb_cell_measures.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != profile.r.shape:
        raise TubeGeomError("field shape does not match the profile grid")
    h = profile.h
    z = profile.z
    r = profile.r
    k0b = space.k0 * space.b
    zf = 0.5 * (z[:-1] + z[1:])
    rf = 0.5 * (r[:-1] + r[1:])
    gf = np.abs(r[1:] - r[:-1]) / h
    wf = _omega(space, zf, rf, gf)
    czf = sc(space.epsilon, k0b * rf)
    gzzf = czf * czf + gf * gf
    flux = wf / gzzf * (f[1:] - f[:-1]) / h
    m = lb_cell_measures(space, profile)
    out = np.empty_like(f)
    out[0] = flux[0] / m[0]
    out[1:-1] = (flux[1:] - flux[:-1]) / m[1:-1]
    out[-1] = -flux[-1] / m[-1]
    return out


# -- residual audits ------------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    """Norms of one discrete identity residual at a given resolution."""

    which: str
    grid_n: int
    dt: float
    sup_norm: float
    l2_norm: float

    def to_flat_dict(self) -> dict:
        return {
            "which": self.which,
            "n": self.grid_n,
            "dt": self.dt,
            "sup": self.sup_norm,
            "l2": self.l2_norm,
        }


@dataclass(frozen=True)
class AuditContext:
    """Three consecutive states plus tracked markers, as the audits need them.

    profiles/hbars are time-ordered; marker_z[j] holds the marker base
    positions at time j.  dt is the uniform spacing between the states.
    """

    space: SpaceParams
    lap_mode: str
    sign_mode: str
    dt: float
    profiles: tuple[gridmod.RadialProfile, gridmod.RadialProfile, gridmod.RadialProfile]
    hbars: tuple[float, float, float]
    marker_z: tuple[np.ndarray, np.ndarray, np.ndarray]


def _point_arrays(space: SpaceParams, profile: gridmod.RadialProfile, lap_mode: str):
    rp, rpp = gridmod.derivatives(profile)
    g = np.abs(rp)
    lap = tubegeom.laplacian_radial(space, profile, lap_mode)
    hess = rp * rp * rpp
    return rp, rpp, g, lap, hess


def _norms(res: np.ndarray) -> tuple[float, float]:
    return float(np.max(np.abs(res))), float(math.sqrt(float(np.mean(res * res))))


def residual_audit(which: str, ctx: AuditContext) -> ResidualReport:
    """Discrete residual of one printed evolution identity.

    id416 is a pointwise spatial identity checked on the middle state's
    interior nodes (the radial chart degenerates at the pole, where the
    operators use their limit forms).  id418 and id520 compare a centered
    Lagrangian time difference along the markers against the printed
    right-hand side evaluated on the middle state.
    """
    if which not in AUDIT_IDS:
        raise TubeGeomError(f"unknown audit {which!r}; expected one of {AUDIT_IDS}")
    space = ctx.space
    b = space.b
    k0b = space.k0 * b
    p0, p1, p2 = ctx.profiles
    h = p1.h
    rp, rpp, g, lap, hess = _point_arrays(space, p1, ctx.lap_mode)
    c0 = sc(space.epsilon, k0b * p1.r)
    s2 = c0 * c0 + g * g

    if which == "id416":
        lt_r = laplace_beltrami_radial(space, p1, p1.r)
        rhs = (
            s2 * lt_r
            - space.epsilon * k0b * ss(space.epsilon, k0b * p1.r) * c0 * g * g / s2
            + hess / s2
        )
        res = (lap - rhs)[1:-1]
        sup, l2 = _norms(res)
        return ResidualReport(which, p1.n, ctx.dt, sup, l2)

    z0, z1, z2 = ctx.marker_z
    two_dt = 2.0 * ctx.dt
    rp_arr = rp
    u_arr = 1.0 / tubegeom.vhat_values(space, p1.r, g)

    rm = gridmod.cubic_interp(p1.r, h, z1)
    gm = np.abs(gridmod.cubic_interp(rp_arr, h, z1))
    um = 1.0 / tubegeom.vhat_values(space, rm, gm)
    c0m = sc(space.epsilon, k0b * rm)
    s2m = c0m * c0m + gm * gm

    if which == "id418":
        rhat0 = gridmod.cubic_interp(p0.r, p0.h, z0)
        rhat2 = gridmod.cubic_interp(p2.r, p2.h, z2)
        ddt = (rhat2 - rhat0) / two_dt
        lt_r = laplace_beltrami_radial(space, p1, p1.r)
        ltm = gridmod.cubic_interp(lt_r, h, z1)
        rho_m = tubegeom.rho_values(space, rm, gm, ctx.sign_mode)
        rhs = (
            um * (ctx.hbars[1] - rho_m)
            - space.epsilon * k0b * ss(space.epsilon, k0b * rm) * c0m * gm * gm / (s2m * s2m)
        )
        res = ddt - ltm - rhs
        sup, l2 = _norms(res)
        return ResidualReport(which, p1.n, ctx.dt, sup, l2)

    # id520
    def u_of(profile: gridmod.RadialProfile) -> np.ndarray:
        rp_j, _ = gridmod.derivatives(profile)
        return 1.0 / tubegeom.vhat_values(space, profile.r, np.abs(rp_j))

    uhat0 = gridmod.cubic_interp(u_of(p0), p0.h, z0)
    uhat2 = gridmod.cubic_interp(u_of(p2), p2.h, z2)
    ddt = (uhat2 - uhat0) / two_dt
    lt_u = laplace_beltrami_radial(space, p1, u_arr)
    ltm = gridmod.cubic_interp(lt_u, h, z1)
    lam_arr = lambda_values(space, p1.r, g, lap, hess)
    lamm = gridmod.cubic_interp(lam_arr, h, z1)

    one_mu2 = 1.0 - um * um
    tt0 = tt(space.epsilon, k0b * rm)
    horiz = np.zeros_like(rm)
    for k in space.horizontal_keys:
        horiz = horiz + space.mult_h(k) * (k * b) * tt(space.epsilon, k * b * rm)
    vert_ct = np.zeros_like(rm)
    vert_inv_ss2 = np.zeros_like(rm)
    for k, mult in space.mv:
        if not mult:
            continue
        vert_ct = vert_ct + mult * (k * b) * ct(space.epsilon, k * b * rm)
        vert_inv_ss2 = vert_inv_ss2 + mult * (k * b) ** 2 / ss(space.epsilon, k * b * rm) ** 2
    horiz_grad = np.zeros_like(rm)
    for k in space.horizontal_keys:
        horiz_grad = horiz_grad + space.mult_h(k) * space.epsilon * (k * b) ** 2 / sc(
            space.epsilon, k * b * rm
        ) ** 2
    t1 = ctx.hbars[1] * k0b * tt0 * one_mu2
    t2 = -um * one_mu2 * vert_inv_ss2
    t3 = -um * one_mu2 * k0b * tt0 * vert_ct
    t4 = -um * one_mu2 * k0b * tt0 * horiz
    t5 = um * (lamm + um * horiz) ** 2
    t6 = um * one_mu2 * horiz_grad * gm
    res = ddt - ltm - (t1 + t2 + t3 + t4 + t5 + t6)
    sup, l2 = _norms(res)
    return ResidualReport(which, p1.n, ctx.dt, sup, l2)
