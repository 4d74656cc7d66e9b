"""Curvature-sign-unified trig kernels and ambient-space parameter sets."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

__all__ = [
    "SpaceError",
    "SpaceParams",
    "sc",
    "ss",
    "tt",
    "ct",
    "focal_radius",
    "CatalogEntry",
    "catalog_entries",
    "catalog_lookup",
]


class SpaceError(ValueError):
    """Invalid space parameters or unknown catalog name."""


def _check_epsilon(epsilon: int) -> None:
    if epsilon not in (1, -1):
        raise SpaceError(f"epsilon must be +1 or -1, got {epsilon!r}")


def sc(epsilon: int, theta):
    """Cosine kernel: cos(theta) for epsilon=+1, cosh(theta) for epsilon=-1.

    Accepts scalars or numpy arrays.
    """
    _check_epsilon(epsilon)
    return np.cos(theta) if epsilon == 1 else np.cosh(theta)


def ss(epsilon: int, theta):
    """Sine kernel: sin(theta) for epsilon=+1, sinh(theta) for epsilon=-1."""
    _check_epsilon(epsilon)
    return np.sin(theta) if epsilon == 1 else np.sinh(theta)


def tt(epsilon: int, theta):
    """Tangent kernel epsilon*ss/sc: tan(theta) for epsilon=+1, -tanh(theta) for epsilon=-1.

    Satisfies tt*ct = epsilon wherever both are finite.
    """
    _check_epsilon(epsilon)
    return np.tan(theta) if epsilon == 1 else -np.tanh(theta)


def ct(epsilon: int, theta):
    """Cotangent kernel sc/ss: cot(theta) for epsilon=+1, coth(theta) for epsilon=-1.

    Pole at theta=0.
    """
    _check_epsilon(epsilon)
    if epsilon == 1:
        return np.cos(theta) / np.sin(theta)
    return np.cosh(theta) / np.sinh(theta)


def _normalize_mult(raw, *, allowed_keys: tuple[int, ...], label: str) -> tuple[tuple[int, int], ...]:
    if isinstance(raw, Mapping):
        items = raw.items()
    else:
        items = tuple(raw)
    out = []
    for k, m in items:
        if k not in allowed_keys:
            raise SpaceError(f"{label} key {k!r} not in {allowed_keys}")
        if not isinstance(m, int) or isinstance(m, bool) or m < 0:
            raise SpaceError(f"{label}[{k}] must be a non-negative integer, got {m!r}")
        out.append((int(k), m))
    out.sort()
    if len({k for k, _ in out}) != len(out):
        raise SpaceError(f"duplicate {label} keys")
    return tuple(out)


@dataclass(frozen=True)
class SpaceParams:
    """Parameters of the ambient space seen by the tube formulas.

    epsilon: +1 (compact, circular kernels) or -1 (noncompact, hyperbolic kernels).
    b: curvature scale, > 0.
    mv: vertical multiplicities, keys k in {1, 2}.
    mh: horizontal multiplicities, keys k in {0, 1, 2} (k=0 is the flat slot).
    k0: eigenvalue slot of the radial direction, in {0} or a key of mh.
    density: optional override of the multiplicities used by the base radial
        density; defaults to mh.
    """

    epsilon: int
    b: float
    mv: tuple[tuple[int, int], ...]
    mh: tuple[tuple[int, int], ...]
    k0: int = 1
    density: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        _check_epsilon(self.epsilon)
        if not (self.b > 0 and math.isfinite(self.b)):
            raise SpaceError(f"b must be a positive finite real, got {self.b!r}")
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "mv", _normalize_mult(self.mv, allowed_keys=(1, 2), label="mv"))
        object.__setattr__(self, "mh", _normalize_mult(self.mh, allowed_keys=(0, 1, 2), label="mh"))
        if self.density is not None:
            object.__setattr__(
                self, "density", _normalize_mult(self.density, allowed_keys=(0, 1, 2), label="density")
            )
        if self.mv_total < 1:
            raise SpaceError("total vertical multiplicity must be >= 1")
        if self.mh_total < 1:
            raise SpaceError("total horizontal multiplicity must be >= 1")
        if self.k0 != 0 and self.mult_h(self.k0) < 1:
            raise SpaceError(f"k0={self.k0} needs a positive horizontal multiplicity")

    def mult_v(self, k: int) -> int:
        return dict(self.mv).get(k, 0)

    def mult_h(self, k: int) -> int:
        return dict(self.mh).get(k, 0)

    @property
    def mv_total(self) -> int:
        return sum(m for _, m in self.mv)

    @property
    def mh_total(self) -> int:
        return sum(m for _, m in self.mh)

    @property
    def horizontal_keys(self) -> tuple[int, ...]:
        """Nonzero-multiplicity horizontal eigenvalue slots, k > 0."""
        return tuple(k for k, m in self.mh if k > 0 and m > 0)

    @property
    def density_pairs(self) -> tuple[tuple[int, int], ...]:
        return self.mh if self.density is None else self.density

    @property
    def invariant_mode(self) -> bool:
        """True when all horizontal weight sits at k=1 and the radial slot is k0=1."""
        return self.horizontal_keys == (1,) and self.k0 == 1 and self.mult_h(0) == 0

    def require_invariant(self, context: str) -> None:
        if not self.invariant_mode:
            raise SpaceError(f"{context} requires horizontal multiplicities at k=1 only (k0=1)")


def focal_radius(space: SpaceParams) -> float:
    """Largest admissible tube radius.

    Infinite for epsilon=-1.  For epsilon=+1 it is the smallest positive zero
    among the horizontal cosine factors (k with positive multiplicity) and the
    vertical sine factor, i.e. min of pi/(2 k b) over those k plus k=1 when
    mv[2] != 0, or k=1/2 when mv[2] == 0.
    """
    if space.epsilon == -1:
        return math.inf
    ks = list(space.horizontal_keys)
    ks.append(1.0 if space.mult_v(2) != 0 else 0.5)
    return min(math.pi / (2.0 * k * space.b) for k in ks)


@dataclass(frozen=True)
class CatalogEntry:
    """A named ambient/core pairing; params is None for names-only entries."""

    name: str
    params: SpaceParams | None
    f_density_multiplicities: tuple[tuple[int, int], ...] | None
    notes: str = ""

    @property
    def informational(self) -> bool:
        return self.params is None


_RH = re.compile(r"^RH(\d+)/RH(\d+)$")
_CH = re.compile(r"^CH(\d+)/CH(\d+)$")
_QH = re.compile(r"^QH(\d+)/QH(\d+)$")
_OH = re.compile(r"^OH(\d+)/OH(\d+)$")

_DEFAULT_B = 1.0

# Compact rank-two ambients are listed by name only; they carry no numeric
# multiplicities here and the flow rejects them.
_INFORMATIONAL = (
    ("SU(3)/SO(3)", "compact ambient, meridian tubes; eigenvalue slots K={1,2}"),
    ("SU(6)/Sp(3)", "compact ambient, meridian tubes; eigenvalue slots K={1,2}"),
    ("SU(3)", "compact group ambient, meridian tubes; eigenvalue slots K={1,2}"),
    ("E6/F4", "compact ambient, meridian tubes; eigenvalue slots K={1,2}"),
    ("Sp(2)", "compact group ambient, meridian tubes; eigenvalue slot K={1}"),
)


def _hyperbolic_entry(name: str) -> CatalogEntry | None:
    m = _RH.match(name)
    if m:
        amb, p = int(m.group(1)), int(m.group(2))
        n = amb - 1
        if p < 1 or n - p < 1:
            raise SpaceError(f"{name}: need core dimension >= 1 and codimension >= 2")
        mv, mh = {1: n - p}, {1: p}
    elif _CH.match(name):
        m = _CH.match(name)
        amb, p = int(m.group(1)), int(m.group(2))
        if p < 1 or amb - p < 1:
            raise SpaceError(f"{name}: need 1 <= core index < ambient index")
        mv, mh = {1: 2 * (amb - p) - 2, 2: 1}, {1: 2 * p}
    elif _QH.match(name):
        m = _QH.match(name)
        amb, p = int(m.group(1)), int(m.group(2))
        if p < 1 or amb - p < 1:
            raise SpaceError(f"{name}: need 1 <= core index < ambient index")
        mv, mh = {1: 4 * (amb - p) - 4, 2: 3}, {1: 4 * p}
    elif _OH.match(name):
        m = _OH.match(name)
        amb, p = int(m.group(1)), int(m.group(2))
        if (amb, p) != (2, 1):
            raise SpaceError(f"{name}: only OH2/OH1 exists")
        mv, mh = {1: 0, 2: 7}, {1: 8}
    else:
        return None
    params = SpaceParams(epsilon=-1, b=_DEFAULT_B, mv=mv, mh=mh, k0=1)
    return CatalogEntry(name=name, params=params, f_density_multiplicities=params.mh)


def catalog_lookup(name: str) -> CatalogEntry:
    """Resolve a catalog name to an entry.

    Hyperbolic names are parametric (RH<n+1>/RH<p>, CH<m>/CH<p>, QH<m>/QH<p>,
    OH2/OH1); compact names resolve to informational entries without numeric
    parameters.
    """
    for info_name, notes in _INFORMATIONAL:
        if name == info_name:
            return CatalogEntry(name=name, params=None, f_density_multiplicities=None, notes=notes)
    entry = _hyperbolic_entry(name)
    if entry is None:
        raise SpaceError(f"unknown catalog name {name!r}")
    return entry


_PRESETS = (
    "RH3/RH1",
    "RH4/RH1",
    "RH4/RH2",
    "CH2/CH1",
    "CH3/CH1",
    "CH3/CH2",
    "QH2/QH1",
    "OH2/OH1",
)


def catalog_entries() -> tuple[CatalogEntry, ...]:
    """The built-in table: canonical hyperbolic presets plus names-only compact rows."""
    rows = [catalog_lookup(name) for name in _PRESETS]
    rows.extend(
        CatalogEntry(name=n, params=None, f_density_multiplicities=None, notes=notes)
        for n, notes in _INFORMATIONAL
    )
    return tuple(rows)
