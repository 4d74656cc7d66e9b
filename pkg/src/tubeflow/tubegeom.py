"""Pointwise tube geometry and integrated quantities over the base ball.

Conventions used throughout: r is the tube radius, g = |r'| the radial slope
magnitude, lap the chosen Laplacian of the profile, hess = r'^2 r''.  All
kernels come from symspace and are sign-unified in epsilon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import grid as gridmod
from .quadrature import (
    QuadratureError,
    adaptive_simpson,
    gauss_legendre,
    invert_increasing,
    simpson_weights,
)
from .symspace import SpaceParams, ct, focal_radius, sc, ss, tt

__all__ = [
    "TubeGeomError",
    "PointData",
    "psi",
    "rho",
    "mean_curvature",
    "psi0_values",
    "vhat_values",
    "rho_values",
    "mean_curvature_values",
    "psi_bar",
    "f_density",
    "f_density_log_deriv",
    "delta1",
    "delta2",
    "delta_inv",
    "unit_sphere_volume",
    "vol_b",
    "vol_m",
    "vol_d",
    "avg_h",
    "volume_weights",
    "laplacian_radial",
    "c_prime",
    "k1_k2",
    "vhat_bound_value",
    "a_rb",
    "BoundsReport",
    "bounds_report",
    "SIGN_MODES",
    "LAP_MODES",
    "GL_ORDER",
]

SIGN_MODES = ("eq250", "eq34")
LAP_MODES = ("paper61", "full")

# Fixed Gauss-Legendre order for vectorized radial integrals; far below 1e-13
# error for these entire integrands at tube radii of interest.
GL_ORDER = 64


class TubeGeomError(ValueError):
    """Invalid geometric input."""


def _sigma(sign_mode: str) -> float:
    if sign_mode == "eq250":
        return -1.0
    if sign_mode == "eq34":
        return 1.0
    raise TubeGeomError(f"sign_mode must be one of {SIGN_MODES}, got {sign_mode!r}")


def _check_lap_mode(lap_mode: str) -> None:
    if lap_mode not in LAP_MODES:
        raise TubeGeomError(f"lap_mode must be one of {LAP_MODES}, got {lap_mode!r}")


@dataclass(frozen=True)
class PointData:
    """State of the tube above one base point."""

    r: float
    g: float = 0.0
    lap: float = 0.0
    hess: float = 0.0

    def __post_init__(self) -> None:
        for name in ("r", "g", "lap", "hess"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise TubeGeomError(f"PointData.{name} must be finite, got {v!r}")
        if self.r <= 0:
            raise TubeGeomError(f"PointData.r must be positive, got {self.r!r}")
        if self.g < 0:
            raise TubeGeomError(f"PointData.g is a norm and must be >= 0, got {self.g!r}")


def _sc0(space: SpaceParams, r):
    # cosine factor of the radial slot; k0=0 degenerates to 1 exactly
    return sc(space.epsilon, (space.k0 * space.b) * np.asarray(r, dtype=float))


def vhat_values(space: SpaceParams, r, g):
    """Graph-slope factor sqrt(sc^2+g^2)/sc, computed as sqrt(1+(g/sc)^2).

    This form is exactly 1.0 wherever g == 0, which the endpoint monitors rely
    on.
    """
    x = np.asarray(g, dtype=float) / _sc0(space, r)
    return np.sqrt(1.0 + x * x)


def psi0_values(space: SpaceParams, r):
    """Tube area density per unit core-sphere volume at zero slope.

    Product of (ss(kbr)/(kb))^mv_k over vertical slots and sc(kbr)^mh_k over
    horizontal slots (the k=0 slot contributes 1).
    """
    r = np.asarray(r, dtype=float)
    b = space.b
    out = np.ones_like(r)
    for k, m in space.mv:
        if m:
            out = out * (ss(space.epsilon, k * b * r) / (k * b)) ** m
    for k, m in space.mh:
        if m and k > 0:
            out = out * sc(space.epsilon, k * b * r) ** m
    return out


def psi(space: SpaceParams, pd: PointData) -> float:
    """Tube area density factor at a point, slope included."""
    base = psi0_values(space, pd.r)
    if not base > 0.0:
        raise TubeGeomError(f"non-positive area factor at r={pd.r}; radius at or beyond the focal radius")
    return float(base * vhat_values(space, pd.r, pd.g))


def rho_values(space: SpaceParams, r, g, sign_mode: str = "eq250"):
    """Zeroth-order mean curvature term (no profile-derivative contributions)."""
    sigma = _sigma(sign_mode)
    r = np.asarray(r, dtype=float)
    g = np.asarray(g, dtype=float)
    b = space.b
    c0 = _sc0(space, r)
    s2 = c0 * c0 + g * g
    bracket = np.zeros_like(r)
    for k, m in space.mv:
        if m:
            bracket = bracket + m * (k * b) * ct(space.epsilon, k * b * r)
    for k, m in space.mh:
        if m and k > 0:
            bracket = bracket - m * (k * b) * tt(space.epsilon, k * b * r)
    k0b = space.k0 * b
    if k0b:
        bracket = bracket + sigma * g * g * k0b * tt(space.epsilon, k0b * r) / s2
    return c0 / np.sqrt(s2) * bracket


def rho(space: SpaceParams, pd: PointData, sign_mode: str = "eq250") -> float:
    return float(rho_values(space, pd.r, pd.g, sign_mode))


def mean_curvature_values(space: SpaceParams, r, g, lap, hess, sign_mode: str = "eq250"):
    """Mean curvature from the radius, slope, Laplacian and Hessian terms."""
    r = np.asarray(r, dtype=float)
    g = np.asarray(g, dtype=float)
    c0 = _sc0(space, r)
    s2 = c0 * c0 + g * g
    root = np.sqrt(s2)
    return rho_values(space, r, g, sign_mode) - lap / (c0 * root) + hess / (c0 * s2 * root)


def mean_curvature(space: SpaceParams, pd: PointData, sign_mode: str = "eq250") -> float:
    return float(mean_curvature_values(space, pd.r, pd.g, pd.lap, pd.hess, sign_mode))


def psi_bar(space: SpaceParams, s):
    """Normalized radial area factor with psi_bar(0) = 1.

    Equals psi0(s)/s^mv pointwise; the removable singularity at s=0 is filled
    with the limit value.
    """
    space.require_invariant("psi_bar")
    s = np.asarray(s, dtype=float)
    b = space.b
    out = np.ones_like(s)
    with np.errstate(invalid="ignore", divide="ignore"):
        for k, m in space.mv:
            if m:
                x = k * b * s
                fac = np.where(s == 0.0, 1.0, ss(space.epsilon, x) / np.where(s == 0.0, 1.0, x))
                out = out * fac**m
    out = out * sc(space.epsilon, b * s) ** space.mh_total
    if out.ndim == 0:
        return float(out)
    return out


def f_density(space: SpaceParams, z):
    """Radial volume density of the base ball (up to the sphere-volume constant).

    Product over the density multiplicities of (ss(kbz)/(kb))^m for k>0 and
    z^m for the flat slot.
    """
    z = np.asarray(z, dtype=float)
    b = space.b
    out = np.ones_like(z)
    for k, m in space.density_pairs:
        if not m:
            continue
        if k == 0:
            out = out * z**m
        else:
            out = out * (ss(space.epsilon, k * b * z) / (k * b)) ** m
    if out.ndim == 0:
        return float(out)
    return out


def f_density_log_deriv(space: SpaceParams, z):
    """d/dz log f_density; pole at z=0 (callers handle the polar node)."""
    z = np.asarray(z, dtype=float)
    b = space.b
    out = np.zeros_like(z)
    for k, m in space.density_pairs:
        if not m:
            continue
        if k == 0:
            out = out + m / z
        else:
            out = out + m * (k * b) * ct(space.epsilon, k * b * z)
    if out.ndim == 0:
        return float(out)
    return out


# -- radial integrals ---------------------------------------------------------


def _kb_mv(space: SpaceParams) -> tuple[tuple[float, int], ...]:
    return tuple((k * space.b, m) for k, m in space.mv if m)


def _delta_integrand_scalar(space: SpaceParams, s: float, which: int) -> float:
    # scalar fast path: psi0(s) (and /sc(bs) for which=2) via math functions
    hyp = space.epsilon == -1
    out = 1.0
    for kb, m in _kb_mv(space):
        out *= ((math.sinh(kb * s) if hyp else math.sin(kb * s)) / kb) ** m
    cosb = math.cosh(space.b * s) if hyp else math.cos(space.b * s)
    out *= cosb ** space.mh_total
    if which == 2:
        out /= cosb
    return out


def delta1(space: SpaceParams, s: float) -> float:
    """Core-ball volume share below radius s: integral of sigma^mv psi_bar."""
    space.require_invariant("delta1")
    if s < 0:
        raise TubeGeomError("delta1 needs s >= 0")
    return adaptive_simpson(lambda x: _delta_integrand_scalar(space, x, 1), 0.0, float(s))


def delta2(space: SpaceParams, s: float) -> float:
    """Companion integral with the extra 1/sc(b sigma) factor."""
    space.require_invariant("delta2")
    if s < 0:
        raise TubeGeomError("delta2 needs s >= 0")
    return adaptive_simpson(lambda x: _delta_integrand_scalar(space, x, 2), 0.0, float(s))


def _delta_many(space: SpaceParams, s: np.ndarray, which: int) -> np.ndarray:
    """delta1/delta2 at many radii via fixed-order Gauss-Legendre, vectorized."""
    space.require_invariant("delta")
    s = np.asarray(s, dtype=float)
    x, w = gauss_legendre(GL_ORDER)
    # map [-1,1] -> [0, s_i] per node
    pts = 0.5 * s[..., None] * (x + 1.0)
    vals = psi0_values(space, pts)
    if which == 2:
        vals = vals / sc(space.epsilon, space.b * pts)
    return 0.5 * s * (vals * w).sum(axis=-1)


def delta_inv(which: int, space: SpaceParams, y: float, xtol: float = 1e-12) -> float:
    """Invert delta1 (which=1) or delta2 (which=2) by bracketed bisection."""
    if which not in (1, 2):
        raise TubeGeomError(f"which must be 1 or 2, got {which!r}")
    fn = delta1 if which == 1 else delta2
    if y < 0:
        raise QuadratureError(f"delta{which} inverse target must be >= 0, got {y}")
    if y == 0.0:
        return 0.0
    if space.epsilon == 1:
        hi = focal_radius(space) * (1.0 - 1e-12)
    else:
        hi = 1.0 / space.b
        while fn(space, hi) < y:
            hi *= 2.0
            if hi * space.b > 700.0:
                raise QuadratureError(f"delta{which} inverse target {y} out of reach")
    return invert_increasing(lambda x: fn(space, x), y, 0.0, hi, xtol=xtol)


def _gamma_half(two_x: int) -> float:
    # Gamma(two_x/2) by recurrence from Gamma(1/2) = sqrt(pi) and Gamma(1) = 1
    if two_x == 1:
        return math.sqrt(math.pi)
    if two_x == 2:
        return 1.0
    return (two_x - 2) / 2.0 * _gamma_half(two_x - 2)


def unit_sphere_volume(m: int) -> float:
    """Volume of the unit m-sphere: 2 pi^((m+1)/2) / Gamma((m+1)/2)."""
    if m < 0:
        raise TubeGeomError(f"sphere dimension must be >= 0, got {m}")
    return 2.0 * math.pi ** ((m + 1) / 2.0) / _gamma_half(m + 1)


def vol_b(space: SpaceParams, rb: float) -> float:
    """Volume of the base geodesic ball of radius rb."""
    if rb <= 0:
        raise TubeGeomError("rb must be positive")
    integral = adaptive_simpson(lambda z: float(f_density(space, z)), 0.0, float(rb))
    return unit_sphere_volume(space.mh_total - 1) * integral


def _prefactor(space: SpaceParams) -> float:
    return unit_sphere_volume(space.mv_total) * unit_sphere_volume(space.mh_total - 1)


def volume_weights(space: SpaceParams, profile: gridmod.RadialProfile, rp: np.ndarray | None = None) -> np.ndarray:
    """Shared quadrature weights w_i of the tube-volume integral.

    vol_m == sum(w) and the discrete average of H uses exactly these weights,
    which is what makes the enclosed-volume balance exact in the semi-discrete
    limit.
    """
    if rp is None:
        rp, _ = gridmod.derivatives(profile)
    q = simpson_weights(profile.n, profile.h)
    fd = f_density(space, profile.z)
    return _prefactor(space) * q * fd * psi0_values(space, profile.r) * vhat_values(space, profile.r, np.abs(rp))


def vol_m(space: SpaceParams, profile: gridmod.RadialProfile) -> float:
    """Tube hypersurface volume on the solver grid."""
    return float(volume_weights(space, profile).sum())


def vol_d(space: SpaceParams, profile: gridmod.RadialProfile) -> float:
    """Enclosed-domain volume on the solver grid (inner radial integral exact)."""
    q = simpson_weights(profile.n, profile.h)
    fd = f_density(space, profile.z)
    return float(_prefactor(space) * (q * fd * _delta_many(space, profile.r, 1)).sum())


def laplacian_radial(space: SpaceParams, profile: gridmod.RadialProfile, lap_mode: str) -> np.ndarray:
    """Profile Laplacian per mode: bare r'' or r'' plus the density drift.

    In full mode the polar node uses the pinned removable-singularity
    coefficient mh_total * rpp_0.
    """
    _check_lap_mode(lap_mode)
    rp, rpp = gridmod.derivatives(profile)
    if lap_mode == "paper61":
        return rpp
    out = rpp.copy()
    z = profile.z
    out[1:] += f_density_log_deriv(space, z[1:]) * rp[1:]
    out[0] = space.mh_total * rpp[0]
    return out


def avg_h(
    space: SpaceParams,
    profile: gridmod.RadialProfile,
    sign_mode: str = "eq250",
    lap_mode: str = "paper61",
) -> float:
    """Weight-matched discrete average of the mean curvature over the tube."""
    rp, rpp = gridmod.derivatives(profile)
    g = np.abs(rp)
    lap = laplacian_radial(space, profile, lap_mode)
    hess = rp * rp * rpp
    h_vals = mean_curvature_values(space, profile.r, g, lap, hess, sign_mode)
    w = volume_weights(space, profile, rp)
    return float((w * h_vals).sum() / w.sum())


# -- runtime bounds -----------------------------------------------------------


def c_prime(space: SpaceParams, a: float, r_hi: float, npts: int = 2048) -> float:
    """Grid minimum of rho*psi over radii in [a, r_hi] at zero slope.

    Both sign modes agree at g=0; the value is tagged with the mode whose
    monitor consumes it.
    """
    if a <= 0:
        raise TubeGeomError("c_prime needs a > 0")
    hi = max(float(r_hi), float(a))
    rr = np.linspace(float(a), hi, npts) if hi > a else np.array([float(a)])
    vals = rho_values(space, rr, 0.0, "eq34") * psi0_values(space, rr)
    return float(vals.min())


def k1_k2(space: SpaceParams, beta1: float, beta2: float, c_hat: float) -> tuple[float, float]:
    """Slope-bound constants from observed radius extrema and curvature floor."""
    if space.epsilon != -1:
        raise TubeGeomError("slope-bound constants are defined for epsilon=-1 only")
    b = space.b
    k1 = 0.0
    for kb, m in _kb_mv(space):
        k1 += m * kb * kb / math.sinh(kb * beta1) ** 2
    k1 += b * math.tanh(b * beta2) * sum(m * kb / math.tanh(kb * beta1) for kb, m in _kb_mv(space))
    k2 = c_hat * b * math.tanh(b * beta1)
    return k1, k2


def vhat_bound_value(k1: float, k2: float, c_sup: float) -> float:
    """Printed slope bound (K1 + sqrt(K1^2 + 4 K2 C))/2."""
    return 0.5 * (k1 + math.sqrt(k1 * k1 + 4.0 * k2 * c_sup))


def a_rb(space: SpaceParams, rb: float) -> float:
    """Boundary density floor: 1 for epsilon=-1, f_density(rb) for epsilon=+1."""
    if space.epsilon == -1:
        return 1.0
    return float(f_density(space, rb))


@dataclass(frozen=True)
class BoundsReport:
    """All static bounds of a run, computed from the initial profile."""

    r_f: float
    r_hat1: float
    r_hat2: float
    a_rb: float
    prop63_bound: float
    c_prime: float
    hbar_lower: float
    k1: float
    k2: float
    vhat_bound: float
    thmc_lhs: float
    thmc_rhs: float
    thmc_satisfied: bool

    def to_flat_dict(self) -> dict:
        def clean(v):
            if isinstance(v, bool):
                return v
            return v if math.isfinite(v) else None

        return {
            "r_f": clean(self.r_f),
            "r_hat1": clean(self.r_hat1),
            "r_hat2": clean(self.r_hat2),
            "a_rb": clean(self.a_rb),
            "prop63_bound": clean(self.prop63_bound),
            "c_prime": clean(self.c_prime),
            "hbar_lower": clean(self.hbar_lower),
            "k1": clean(self.k1),
            "k2": clean(self.k2),
            "vhat_bound": clean(self.vhat_bound),
            "thmc_lhs": clean(self.thmc_lhs),
            "thmc_rhs": clean(self.thmc_rhs),
            "thmc_satisfied": bool(self.thmc_satisfied),
        }


def bounds_report(
    space: SpaceParams,
    profile: gridmod.RadialProfile,
    sign_mode: str = "eq250",
    lap_mode: str = "paper61",
) -> BoundsReport:
    """Compute every static bound from the initial profile.

    The slope-bound constants are seeded with the initial radius extrema and
    the initial average curvature standing in for the running extrema.
    """
    space.require_invariant("bounds_report")
    vmv = unit_sphere_volume(space.mv_total)
    vmh1 = unit_sphere_volume(space.mh_total - 1)
    volb = vol_b(space, profile.rb)
    volm0 = vol_m(space, profile)
    vold0 = vol_d(space, profile)
    hbar0 = avg_h(space, profile, sign_mode, lap_mode)
    r_hat1 = delta_inv(1, space, vold0 / (vmv * volb))
    arb = a_rb(space, profile.rb)

    def _try_inv(which: int, y: float) -> float:
        try:
            return delta_inv(which, space, y)
        except QuadratureError:
            return math.nan

    r_hat2 = _try_inv(2, volm0 / vmv + delta2(space, r_hat1))
    prop63 = _try_inv(2, delta2(space, r_hat1) + volm0 / (arb * vmv * vmh1))
    a0 = float(profile.r.min())
    cp = c_prime(space, a0, float(profile.r.max()))
    hbar_lo = a0**space.mv_total * cp * volb / volm0
    if space.epsilon == -1:
        k1, k2 = k1_k2(space, a0, float(profile.r.max()), hbar0)
        vbound = vhat_bound_value(k1, k2, hbar0)
    else:
        k1 = k2 = vbound = math.nan
    thmc_rhs = vmh1 * vmv * delta2(space, r_hat1)
    return BoundsReport(
        r_f=focal_radius(space),
        r_hat1=r_hat1,
        r_hat2=r_hat2,
        a_rb=arb,
        prop63_bound=prop63,
        c_prime=cp,
        hbar_lower=hbar_lo,
        k1=k1,
        k2=k2,
        vhat_bound=vbound,
        thmc_lhs=volm0,
        thmc_rhs=thmc_rhs,
        thmc_satisfied=bool(volm0 <= thmc_rhs),
    )
