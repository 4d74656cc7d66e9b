"""Uniform radial grid with Neumann ends: profiles, stencils, interpolation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridError",
    "RadialProfile",
    "constant_profile",
    "cosine_profile",
    "profile_from_values",
    "derivative_arrays",
    "derivatives",
    "cubic_interp",
]

MIN_CELLS = 16


class GridError(ValueError):
    """Invalid grid or profile data."""


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radius samples r_i on the uniform grid z_i = i*rb/n, i = 0..n.

    n (the cell count) must be even and >= 16 so the composite Simpson weights
    attached to the grid exist.  Values must be finite; positivity is a flow
    initial-condition requirement, checked there, so that post-contact states
    remain representable.
    """

    rb: float
    r: np.ndarray

    def __post_init__(self) -> None:
        if not (self.rb > 0 and math.isfinite(self.rb)):
            raise GridError(f"rb must be positive and finite, got {self.rb!r}")
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1:
            raise GridError("profile values must be one-dimensional")
        n = r.size - 1
        if n < MIN_CELLS or n % 2 != 0:
            raise GridError(f"cell count must be even and >= {MIN_CELLS}, got n={n}")
        if not np.all(np.isfinite(r)):
            raise GridError("profile values must be finite")
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "rb", float(self.rb))

    @property
    def n(self) -> int:
        return self.r.size - 1

    @property
    def h(self) -> float:
        return self.rb / self.n

    @property
    def z(self) -> np.ndarray:
        return np.linspace(0.0, self.rb, self.n + 1)


def constant_profile(rb: float, n: int, r0: float) -> RadialProfile:
    return RadialProfile(rb, np.full(n + 1, float(r0)))


def cosine_profile(rb: float, n: int, r0: float, amplitude: float) -> RadialProfile:
    """r(z) = r0 + amplitude*cos(pi z/rb); zero slope at both ends exactly."""
    z = np.linspace(0.0, rb, n + 1)
    return RadialProfile(rb, r0 + amplitude * np.cos(np.pi * z / rb))


def profile_from_values(rb: float, values) -> RadialProfile:
    return RadialProfile(rb, np.asarray(values, dtype=float))


def derivative_arrays(r: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Central first/second differences with mirror ghosts r[-1]=r[1], r[n+1]=r[n-1].

    The mirror ghosts make the reconstructed slope exactly zero at both ends.
    """
    rp = np.empty_like(r)
    rpp = np.empty_like(r)
    rp[1:-1] = (r[2:] - r[:-2]) / (2.0 * h)
    rp[0] = 0.0
    rp[-1] = 0.0
    rpp[1:-1] = (r[2:] - 2.0 * r[1:-1] + r[:-2]) / (h * h)
    rpp[0] = 2.0 * (r[1] - r[0]) / (h * h)
    rpp[-1] = 2.0 * (r[-2] - r[-1]) / (h * h)
    return rp, rpp


def derivatives(profile: RadialProfile) -> tuple[np.ndarray, np.ndarray]:
    """Profile slope and curvature on the grid (Neumann ghost stencils)."""
    return derivative_arrays(profile.r, profile.h)


def cubic_interp(values: np.ndarray, h: float, zq) -> np.ndarray:
    """Cubic Lagrange interpolation of grid samples at query points zq.

    Nodes sit at i*h, i = 0..n.  The four-node window is clamped at the ends,
    so queries in [0, n*h] stay well-defined.  Returns an array shaped like zq.
    """
    values = np.asarray(values, dtype=float)
    n = values.size - 1
    if n < 3:
        raise GridError("cubic interpolation needs at least 4 nodes")
    zq = np.atleast_1d(np.asarray(zq, dtype=float))
    cell = np.floor(zq / h).astype(int)
    base = np.clip(cell - 1, 0, n - 3)
    t = zq / h - base
    l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0
    l1 = t * (t - 2.0) * (t - 3.0) / 2.0
    l2 = -t * (t - 1.0) * (t - 3.0) / 2.0
    l3 = t * (t - 1.0) * (t - 2.0) / 6.0
    return l0 * values[base] + l1 * values[base + 1] + l2 * values[base + 2] + l3 * values[base + 3]
