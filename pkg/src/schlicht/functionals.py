"""Continuous linear functionals ``J(f) = sum b_n a_n`` and their maximization
over the extreme families.

Restricted to the family ``F(., x)``, a functional becomes the function of the
circle parameter::

    G(x) = J(F(., x)) = sum_n b_n w_n x**(n-1)

with ``w_n = n`` (Koebe) or ``(n+1)/2`` (G-family).  Because ``Re J`` is
linear, its maximum over the closed convex hull equals ``max Re G`` on the
circle, so every maximization problem here is one-dimensional in ``theta``.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import optimize

from .errors import InvalidFunctionalError
from .families import (TWO_PI, CirclePoint, FamilyId, angular_distance, coefficient_weights,
                       extreme_function)
from .series import TaylorSeries, tail_bound

DEFAULT_SAMPLES = 4096
REFINE_TOL = 1e-12
CLUSTER_TOL = 1e-6
GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True, eq=False)
class FunctionalSpec:
    """Coefficients of ``J``: either a finite list ``b_1..b_M`` or the geometric
    generator ``b_n = c * rho**n``.  ``b_0`` is irrelevant for normalized series."""

    b: np.ndarray | None = None
    generator: tuple | None = None
    decay_ratio: float = 0.0

    def __post_init__(self):
        if (self.b is None) == (self.generator is None):
            raise InvalidFunctionalError("give exactly one of b or generator")
        if self.b is not None:
            b = np.array(self.b, dtype=np.complex128).ravel()
            if b.size < 2:
                b = np.concatenate([b, np.zeros(2 - b.size, dtype=np.complex128)])
            if not np.all(np.isfinite(b)):
                raise InvalidFunctionalError("functional coefficients must be finite")
            b[0] = 0
            b.setflags(write=False)
            object.__setattr__(self, "b", b)
        else:
            c, rho = self.generator
            c, rho = complex(c), float(rho)
            if not (math.isfinite(rho) and math.isfinite(abs(c))):
                raise InvalidFunctionalError("generator parameters must be finite")
            if rho <= 0:
                raise InvalidFunctionalError("generator rho must be positive")
            object.__setattr__(self, "generator", (c, rho))
            object.__setattr__(self, "decay_ratio", rho)

    # -- constructors -------------------------------------------------------

    @classmethod
    def finite(cls, coeffs: Mapping[int, complex] | Sequence[complex]) -> "FunctionalSpec":
        """From ``{n: b_n}`` or from the list ``[b_1, b_2, ...]``."""
        if isinstance(coeffs, Mapping):
            if any(int(n) < 0 for n in coeffs):
                raise InvalidFunctionalError("coefficient indices must be non-negative")
            top = max(int(n) for n in coeffs) if coeffs else 1
            b = np.zeros(max(top, 1) + 1, dtype=np.complex128)
            for n, v in coeffs.items():
                b[int(n)] = v
        else:
            b = np.concatenate([[0], np.asarray(list(coeffs), dtype=np.complex128)])
        return cls(b=b)

    @classmethod
    def geometric(cls, c: complex, rho: float) -> "FunctionalSpec":
        """``b_n = c * rho**n``; ``J(f) = c f(rho)``, a scaled point evaluation."""
        return cls(generator=(c, rho))

    @property
    def is_finite(self) -> bool:
        return self.b is not None

    @property
    def support(self) -> int:
        """Largest index with a (possibly) nonzero coefficient; infinite for generators."""
        if self.b is None:
            return math.inf
        nz = np.flatnonzero(self.b)
        return int(nz[-1]) if nz.size else 0

    def coefficients(self, order: int) -> np.ndarray:
        """``b_0..b_order`` (zero-padded)."""
        out = np.zeros(order + 1, dtype=np.complex128)
        if self.b is not None:
            k = min(self.b.size, order + 1)
            out[:k] = self.b[:k]
        else:
            c, rho = self.generator
            out[1:] = c * rho ** np.arange(1, order + 1)
        return out

    def rotated(self, omega: complex) -> "FunctionalSpec":
        """``b_n -> b_n conj(omega)**(n-1)``; moves maximizers by ``arg(omega)``."""
        if self.b is None:
            raise InvalidFunctionalError("rotation is only defined for finite functionals")
        n = np.arange(self.b.size)
        return FunctionalSpec(b=self.b * np.conj(omega) ** (n - 1))

    def __add__(self, other: "FunctionalSpec") -> "FunctionalSpec":
        if self.b is None or other.b is None:
            raise InvalidFunctionalError("only finite functionals can be added")
        m = max(self.b.size, other.b.size)
        return FunctionalSpec(b=np.pad(self.b, (0, m - self.b.size)) +
                              np.pad(other.b, (0, m - other.b.size)))

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        if self.b is not None:
            top = max(self.support, 1)
            return {"b": [[float(v.real), float(v.imag)] for v in self.b[1 : top + 1]]}
        c, rho = self.generator
        return {"generator": {"c": [c.real, c.imag], "rho": rho}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "FunctionalSpec":
        try:
            if "b" in data:
                return cls.finite([complex(float(re), float(im)) for re, im in data["b"]])
            gen = data["generator"]
            re, im = gen["c"]
            return cls.geometric(complex(float(re), float(im)), float(gen["rho"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidFunctionalError(f"malformed functional JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "FunctionalSpec":
        return cls.from_dict(json.loads(text))


def _check_computable(J: FunctionalSpec):
    if not J.is_finite and not J.decay_ratio < 1:
        raise InvalidFunctionalError(f"decay ratio {J.decay_ratio} >= 1: tail is not summable")


def evaluate_functional(J: FunctionalSpec, f: TaylorSeries,
                        coefficient_bound: Callable[[np.ndarray], np.ndarray] | None = None
                        ) -> tuple[complex, float]:
    """``(sum_{n<=N} b_n a_n, tail_bound)``.

    The tail past the series order uses ``|a_n| <= coefficient_bound(n)``,
    defaulting to ``n`` (true for every univalent function).
    """
    _check_computable(J)
    n_top = f.order
    b = J.coefficients(n_top)
    value = complex(np.dot(b, f.coeffs))
    bound = coefficient_bound or (lambda n: n)
    if J.is_finite:
        if J.support <= n_top:
            tail = 0.0
        else:
            n = np.arange(n_top + 1, J.support + 1)
            tail = float(np.sum(np.abs(J.b[n]) * bound(n)))
    elif coefficient_bound is None:
        c, rho = J.generator
        tail = tail_bound(n_top, rho, scale=abs(c), power=1)
    else:
        c, rho = J.generator
        n = np.arange(n_top + 1, n_top + 1 + 20000)
        tail = float(np.sum(abs(c) * rho**n * bound(n)))
    return value, tail


def _x_of(x):
    if isinstance(x, CirclePoint):
        return x.x
    if isinstance(x, (list, tuple)) and x and isinstance(x[0], CirclePoint):
        return np.array([p.x for p in x])
    return x


def G_of_x(J: FunctionalSpec, family: FamilyId, x):
    """``J(F(., x))``; ``x`` may be a CirclePoint, a complex number or an array.

    Finite functionals are summed by Horner in ``x``; generators use the closed
    form ``c F(rho, x)``.
    """
    _check_computable(J)
    family = FamilyId.parse(family)
    xv = np.asarray(_x_of(x), dtype=np.complex128)
    if J.is_finite:
        m = max(J.support, 1)
        g = J.b[1 : m + 1] * coefficient_weights(family, m)[1:]
        acc = np.full(xv.shape, g[-1], dtype=np.complex128)
        for k in range(g.size - 2, -1, -1):
            acc = acc * xv + g[k]
    else:
        c, rho = J.generator
        acc = c * extreme_function(family, rho, xv)
    return acc[()] if np.ndim(acc) == 0 else acc


def H_of_x(J: FunctionalSpec, family: FamilyId, x):
    """``(G(x) + conj(G(1/conj(x)))) / 2``: analytic near the circle and equal to
    ``Re G`` on it (up to rounding)."""
    xv = np.asarray(_x_of(x), dtype=np.complex128)
    out = 0.5 * (G_of_x(J, family, xv) + np.conj(G_of_x(J, family, 1.0 / np.conj(xv))))
    return out[()] if np.ndim(out) == 0 else out


def _re_g(J: FunctionalSpec, family: FamilyId, theta: np.ndarray) -> np.ndarray:
    return np.real(G_of_x(J, family, np.exp(1j * theta)))


def dG_dx(J: FunctionalSpec, family: FamilyId, x):
    """Derivative of ``G`` in ``x``."""
    _check_computable(J)
    family = FamilyId.parse(family)
    xv = np.asarray(_x_of(x), dtype=np.complex128)
    if J.is_finite:
        m = max(J.support, 1)
        g = J.b[1 : m + 1] * coefficient_weights(family, m)[1:]
        acc = np.zeros(xv.shape, dtype=np.complex128)
        for k in range(g.size - 1, 0, -1):
            acc = acc * xv + k * g[k]
    else:
        c, z = J.generator
        den = 1 - xv * z
        if family is FamilyId.KOEBE:
            acc = c * 2 * z * z / den**3
        else:
            acc = c * (-0.5 * z * z / den**2 + (z - 0.5 * xv * z * z) * 2 * z / den**3)
    return acc[()] if np.ndim(acc) == 0 else acc


def _dre_g(J: FunctionalSpec, family: FamilyId, theta):
    # d/dtheta Re G(e^{i theta}) = Re(i x G'(x))
    x = np.exp(1j * np.asarray(theta, dtype=float))
    return np.real(1j * x * dG_dx(J, family, x))


def _polish(J: FunctionalSpec, family: FamilyId, theta: float, value: float,
            width: float) -> tuple[float, float]:
    """Sharpen a refined maximizer by solving ``d Re G / d theta = 0``.

    Values near a smooth maximum are flat to second order, so comparisons alone
    locate the argmax only to about ``sqrt(eps)``; the derivative root does better.
    """
    lo, hi = theta - width, theta + width
    dlo, dhi = _dre_g(J, family, lo), _dre_g(J, family, hi)
    if not (dlo > 0 > dhi):
        return theta, value
    t = optimize.brentq(lambda u: float(_dre_g(J, family, u)), lo, hi, xtol=1e-15, rtol=1e-15)
    v = float(_re_g(J, family, np.array(t)))
    if v < value - 4 * np.finfo(float).eps * max(1.0, abs(value)):
        return theta, value
    return t, max(v, value)


def sweep(J: FunctionalSpec, family: FamilyId, samples: int = DEFAULT_SAMPLES):
    """``theta, G(e^{i theta}), H(e^{i theta})`` on an equispaced grid from 0."""
    theta = TWO_PI * np.arange(samples) / samples
    x = np.exp(1j * theta)
    return theta, G_of_x(J, family, x), H_of_x(J, family, x)


def sweep_csv(J: FunctionalSpec, family: FamilyId, samples: int = DEFAULT_SAMPLES) -> str:
    theta, g, h = sweep(J, family, samples)
    buf = io.StringIO()
    buf.write("theta,reG,imG,H\n")
    for t, gv, hv in zip(theta, g, h):
        buf.write(f"{float(t)!r},{float(gv.real)!r},{float(gv.imag)!r},{float(hv.real)!r}\n")
    return buf.getvalue()


def golden_section_max(func, lo: np.ndarray, hi: np.ndarray, xtol: float = REFINE_TOL,
                       max_iter: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Golden-section ascent on many brackets at once.

    ``func`` maps an array of abscissae to values.  Returns the best abscissa
    evaluated in each bracket and its value.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = func(x1), func(x2)
    for _ in range(max_iter):
        if np.all(hi - lo <= xtol):
            break
        right = f2 > f1
        # keep [x1, hi] where f2 wins, [lo, x2] otherwise
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        nx1 = np.where(right, x2, hi - GOLDEN * (hi - lo))
        nx2 = np.where(right, lo + GOLDEN * (hi - lo), x1)
        nf1 = np.where(right, f2, np.nan)
        nf2 = np.where(right, np.nan, f1)
        fresh = np.where(right, nx2, nx1)
        fv = func(fresh)
        f1 = np.where(right, nf1, fv)
        f2 = np.where(right, fv, nf2)
        x1, x2 = nx1, nx2
    best_x = np.where(f2 > f1, x2, x1)
    best_f = np.maximum(f1, f2)
    return best_x, best_f


@dataclass(frozen=True)
class CircleMaxResult:
    max_value: float
    maximizers: list
    is_constant: bool
    samples: int
    min_value: float
    refine_tol: float = REFINE_TOL
    cluster_tol: float = CLUSTER_TOL
    maximizer_values: list = field(default_factory=list)

    @property
    def thetas(self) -> list[float]:
        return [p.theta for p in self.maximizers]

    def to_dict(self) -> dict:
        return {
            "max_value": self.max_value,
            "maximizers": self.thetas,
            "is_constant": self.is_constant,
            "samples": self.samples,
            "min_value": self.min_value,
            "refine_tol": self.refine_tol,
            "cluster_tol": self.cluster_tol,
        }


def _cluster(thetas: np.ndarray, values: np.ndarray, tol: float) -> list[tuple[float, float]]:
    """Merge maximizers closer than ``tol`` (circularly), keeping the best of each group."""
    order = np.argsort(thetas, kind="stable")
    groups: list[list[int]] = []
    for i in order:
        if groups and angular_distance(thetas[groups[-1][-1]], thetas[i]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and angular_distance(thetas[groups[0][0]], thetas[groups[-1][-1]]) <= tol:
        groups[0] = groups.pop() + groups[0]
    out = []
    for g in groups:
        k = max(g, key=lambda i: (values[i], -i))
        out.append((float(thetas[k]), float(values[k])))
    return sorted(out, key=lambda tv: CirclePoint(tv[0]).theta)


def maximize_on_circle(J: FunctionalSpec, family: FamilyId, coarse_samples: int = DEFAULT_SAMPLES,
                       refine_tol: float = REFINE_TOL, cluster_tol: float = CLUSTER_TOL
                       ) -> CircleMaxResult:
    """Global maximum of ``Re G`` over the circle.

    Dense sampling, then golden-section refinement of every discrete local
    maximum of the samples, then angular clustering of the refined points whose
    value lies within ``refine_tol`` of the best.  ``Re G`` counts as constant
    when the sampled spread is below ``10 * refine_tol``.
    """
    if coarse_samples < 256:
        raise ValueError("coarse_samples must be at least 256")
    family = FamilyId.parse(family)
    theta = TWO_PI * np.arange(coarse_samples) / coarse_samples
    v = _re_g(J, family, theta)
    vmax, vmin = float(np.max(v)), float(np.min(v))
    if vmax - vmin < 10 * refine_tol:
        return CircleMaxResult(vmax, [], True, coarse_samples, vmin, refine_tol, cluster_tol)
    peaks = np.flatnonzero((v >= np.roll(v, 1)) & (v >= np.roll(v, -1)))
    h = TWO_PI / coarse_samples
    tx, fx = golden_section_max(lambda t: _re_g(J, family, t),
                                theta[peaks] - h, theta[peaks] + h, xtol=refine_tol)
    # a sample can beat its refinement only through rounding
    better = v[peaks] > fx
    tx = np.where(better, theta[peaks], tx)
    fx = np.where(better, v[peaks], fx)
    best = float(np.max(fx))
    near = fx >= best - refine_tol
    clusters = _cluster(np.mod(tx[near], TWO_PI), fx[near], cluster_tol)
    clusters = [_polish(J, family, t, val, max(cluster_tol, 1e3 * refine_tol)) for t, val in clusters]
    return CircleMaxResult(best, [CirclePoint(t) for t, _ in clusters], False, coarse_samples,
                           vmin, refine_tol, cluster_tol, [val for _, val in clusters])


def nonconstancy_check(J: FunctionalSpec, family: FamilyId, samples: int = DEFAULT_SAMPLES,
                       refine_tol: float = REFINE_TOL) -> bool:
    """Sampled spread of ``Re G`` exceeds ``10 * refine_tol``."""
    if samples < 256:
        raise ValueError("samples must be at least 256")
    v = _re_g(J, FamilyId.parse(family), TWO_PI * np.arange(samples) / samples)
    return bool(np.max(v) - np.min(v) > 10 * refine_tol)
