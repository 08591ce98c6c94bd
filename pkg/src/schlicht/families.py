"""Extreme-point families of the two hulls and their finite convex combinations.

Both families are indexed by a unimodular parameter ``x``::

    koebe_family:  F(z, x) = z / (1 - x z)**2             a_n(x) = n x**(n-1)
    g_family:      F(z, x) = (z - x z**2 / 2) / (1 - x z)**2  a_n(x) = (n+1)/2 x**(n-1)

A probability measure with finitely many atoms ``(lambda_k, x_k)`` gives the
hull member ``sum lambda_k F(z, x_k)``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidMeasureError
from .series import DEFAULT_ORDER, TaylorSeries, linear_combine

TWO_PI = 2.0 * math.pi
WEIGHT_TOL = 1e-12
ATOM_SEPARATION = 1e-9


class FamilyId(str, enum.Enum):
    KOEBE = "koebe_family"
    G = "g_family"

    @classmethod
    def parse(cls, name: "str | FamilyId") -> "FamilyId":
        if isinstance(name, FamilyId):
            return name
        aliases = {"koebe": cls.KOEBE, "u": cls.KOEBE, "g": cls.G, "g-extreme": cls.G}
        key = str(name).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown family {name!r}") from None


@dataclass(frozen=True, order=True)
class CirclePoint:
    """A point ``x = exp(i theta)`` of the unit circle, stored by its angle."""

    theta: float

    def __post_init__(self):
        t = float(self.theta)
        if not math.isfinite(t):
            raise ValueError("angle must be finite")
        t = math.fmod(t, TWO_PI)
        if t < 0:
            t += TWO_PI
        if t >= TWO_PI:
            t = 0.0
        object.__setattr__(self, "theta", t)

    @property
    def x(self) -> complex:
        return complex(math.cos(self.theta), math.sin(self.theta))

    def conjugate(self) -> "CirclePoint":
        return CirclePoint(-self.theta)

    def distance(self, other: "CirclePoint") -> float:
        """Angular distance in ``[0, pi]``."""
        d = abs(self.theta - other.theta) % TWO_PI
        return min(d, TWO_PI - d)

    @classmethod
    def from_complex(cls, x: complex) -> "CirclePoint":
        return cls(math.atan2(x.imag, x.real))


def angular_distance(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite probability measure on the circle: atoms ``(lambda_k, x_k)``."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(lam), pt if isinstance(pt, CirclePoint) else CirclePoint(pt))
                      for lam, pt in self.atoms)
        if not atoms:
            raise InvalidMeasureError("a measure needs at least one atom")
        weights = [lam for lam, _ in atoms]
        if any(not math.isfinite(w) or w < 0 for w in weights):
            raise InvalidMeasureError(f"weights must be finite and non-negative: {weights}")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_TOL:
            raise InvalidMeasureError(f"weights sum to {math.fsum(weights)!r}, not 1")
        for i in range(len(atoms)):
            for j in range(i + 1, len(atoms)):
                if atoms[i][1].distance(atoms[j][1]) <= ATOM_SEPARATION:
                    raise InvalidMeasureError(
                        f"atoms {i} and {j} coincide (theta {atoms[i][1].theta!r})")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def point_mass(cls, x: "CirclePoint | float") -> "AtomicMeasure":
        return cls(((1.0, x),))

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "AtomicMeasure":
        return cls(tuple(pairs))

    @property
    def m(self) -> int:
        return len(self.atoms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.atoms])

    @property
    def points(self) -> list[CirclePoint]:
        return [pt for _, pt in self.atoms]

    def support(self) -> list[CirclePoint]:
        """Atoms carrying positive mass."""
        return [pt for lam, pt in self.atoms if lam > 0]

    def mix(self, other: "AtomicMeasure", t: float) -> "AtomicMeasure":
        """The measure ``t * self + (1 - t) * other`` with coinciding atoms merged."""
        merged: list[list] = []
        for scale, mu in ((t, self), (1.0 - t, other)):
            for lam, pt in mu.atoms:
                for entry in merged:
                    if entry[1].distance(pt) <= ATOM_SEPARATION:
                        entry[0] += scale * lam
                        break
                else:
                    merged.append([scale * lam, pt])
        total = math.fsum(e[0] for e in merged)
        return AtomicMeasure(tuple((e[0] / total, e[1]) for e in merged))

    def to_dict(self) -> dict:
        return {"atoms": [{"lambda": lam, "theta": pt.theta} for lam, pt in self.atoms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "AtomicMeasure":
        try:
            pairs = [(float(a["lambda"]), float(a["theta"])) for a in data["atoms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidMeasureError(f"malformed measure JSON: {exc}") from exc
        return cls(tuple(pairs))

    @classmethod
    def from_json(cls, text: str) -> "AtomicMeasure":
        return cls.from_dict(json.loads(text))


def _as_point(x) -> CirclePoint:
    return x if isinstance(x, CirclePoint) else CirclePoint(float(x))


def coefficient_weights(family: FamilyId, order: int) -> np.ndarray:
    """``w_n`` with ``a_n(x) = w_n x**(n-1)``; ``w_0 = 0``."""
    family = FamilyId.parse(family)
    n = np.arange(order + 1, dtype=float)
    w = n.copy() if family is FamilyId.KOEBE else (n + 1) / 2
    w[0] = 0.0
    return w


# ulp offsets tried, smallest first, when repairing a coefficient modulus
_ULP_STEPS = sorted(((i, j) for i in range(-4, 5) for j in range(-4, 5)),
                    key=lambda p: (abs(p[0]) + abs(p[1]), p))


def _polar_exact(w: np.ndarray, phase: np.ndarray) -> np.ndarray:
    """``w * exp(i phase)`` whose correctly rounded modulus (``math.hypot``, Python's
    ``abs``) equals ``w`` bit for bit.  numpy's complex ``abs`` rounds differently
    and may still be off by an ulp.

    cos**2 + sin**2 is 1 only up to rounding, so a plain product misses ``w``
    by an ulp about one time in seven.  Those entries are moved by a few ulps
    in the real or imaginary part until the modulus is exact.
    """
    re, im = w * np.cos(phase), w * np.sin(phase)
    bad = np.flatnonzero(np.hypot(re, im) != w)
    if bad.size:
        r0, i0, target = re[bad], im[bad], w[bad]
        open_ = np.ones(bad.size, dtype=bool)
        for i, j in _ULP_STEPS:
            rr, ii = r0 + i * np.spacing(r0), i0 + j * np.spacing(i0)
            ok = open_ & (np.hypot(rr, ii) == target)
            re[bad[ok]], im[bad[ok]] = rr[ok], ii[ok]
            open_ &= ~ok
            if not open_.any():
                break
    return re + 1j * im


def family_series(family: FamilyId, x, order: int = DEFAULT_ORDER) -> TaylorSeries:
    if order < 2:
        raise ValueError("extreme-family series need order >= 2")
    pt = _as_point(x)
    w = coefficient_weights(family, order)
    n = np.arange(order + 1)
    # x**(n-1) from the angle keeps every power on the circle; repeated products would drift
    coeffs = _polar_exact(w, (n - 1) * pt.theta)
    coeffs[0] = 0
    coeffs[1] = 1.0
    return TaylorSeries(coeffs)


def koebe_series(x, order: int = DEFAULT_ORDER) -> TaylorSeries:
    """Rotated Koebe function ``z / (1 - x z)**2``."""
    return family_series(FamilyId.KOEBE, x, order)


def g_extreme_series(x, order: int = DEFAULT_ORDER) -> TaylorSeries:
    """``(z - x z**2 / 2) / (1 - x z)**2``, the equality case of ``|a_n| <= (n+1)/2``."""
    return family_series(FamilyId.G, x, order)


def extreme_function(family: FamilyId, z, x):
    """Closed-form value of the family member at ``x`` (complex ``x`` allowed)."""
    family = FamilyId.parse(family)
    x = x.x if isinstance(x, CirclePoint) else x
    z = np.asarray(z, dtype=np.complex128)
    den = (1 - x * z) ** 2
    if family is FamilyId.KOEBE:
        out = z / den
    else:
        out = (z - 0.5 * x * z * z) / den
    return out[()] if out.ndim == 0 else out


def hull_member(mu: AtomicMeasure, family: FamilyId, order: int = DEFAULT_ORDER) -> TaylorSeries:
    """``sum lambda_k F(z, x_k)`` as a series; normalized because the weights sum to 1."""
    return linear_combine([(lam, family_series(family, pt, order)) for lam, pt in mu.atoms])


def hull_function(mu: AtomicMeasure, family: FamilyId, z):
    """Closed-form value of the hull member, used by oracles independent of truncation."""
    return sum(lam * extreme_function(family, z, pt.x) for lam, pt in mu.atoms)


def pole_set(mu: AtomicMeasure) -> list[tuple[complex, int]]:
    """Double poles at ``conj(x_k)`` for every atom with positive mass.

    Both families share the denominator ``(1 - x z)**2``; the numerator of the
    g-family member at ``z = conj(x)`` is ``conj(x) / 2 != 0``, so no
    cancellation happens.
    """
    return [(pt.conjugate().x, 2) for lam, pt in mu.atoms if lam > 0]
