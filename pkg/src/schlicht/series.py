"""Truncated complex power series about the origin.

A :class:`TaylorSeries` holds the coefficients ``a_0 .. a_N`` of an analytic
function on the unit disk.  Every operation keeps the truncation order fixed,
so products and quotients are exact up to ``z**N``.  Operations that lose the
top coefficient (differentiation) zero-pad it back; callers that need to know
which coefficients are trustworthy use :func:`truncate`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, NonInvertibleError, OrderMismatchError

DEFAULT_ORDER = 128
RHO_MAX = 0.999
INVERT_TOL = 1e-12

__all__ = [
    "DEFAULT_ORDER",
    "RHO_MAX",
    "INVERT_TOL",
    "TaylorSeries",
    "linear_combine",
    "cauchy_product",
    "reciprocal",
    "derivative",
    "evaluate",
    "evaluate_with_derivative",
    "shift_up",
    "shift_down",
    "truncate",
    "tail_bound",
    "required_order",
]


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    """Coefficients ``coeffs[n] = a_n`` for ``n = 0..order``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128, copy=True).ravel()
        if c.size < 2:
            raise ValueError("a TaylorSeries needs order >= 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def normalized(self) -> bool:
        """True when ``a_0 = 0`` and ``a_1 = 1`` (the class of normalized functions)."""
        return abs(self.coeffs[0]) <= INVERT_TOL and abs(self.coeffs[1] - 1) <= INVERT_TOL

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return self.coeffs.size

    def __eq__(self, other):
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        return self.order == other.order and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __add__(self, other):
        return linear_combine([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return linear_combine([(1.0, self), (-1.0, other)])

    def __neg__(self):
        return TaylorSeries(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TaylorSeries):
            return cauchy_product(self, other)
        return TaylorSeries(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __call__(self, z, rho_max: float = RHO_MAX):
        return evaluate(self, z, rho_max=rho_max)

    def __repr__(self):
        head = ", ".join(f"{c:.4g}" for c in self.coeffs[:4])
        return f"TaylorSeries(order={self.order}, coeffs=[{head}, ...])"

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[complex], order: int | None = None) -> "TaylorSeries":
        """Build from a coefficient list, zero-padding (or cutting) to ``order``."""
        c = np.asarray(list(coeffs), dtype=np.complex128)
        if order is None:
            order = max(c.size - 1, 1)
        out = np.zeros(order + 1, dtype=np.complex128)
        k = min(c.size, order + 1)
        out[:k] = c[:k]
        return cls(out)

    @classmethod
    def constant(cls, value: complex, order: int = DEFAULT_ORDER) -> "TaylorSeries":
        return cls.from_coeffs([value], order)

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> "TaylorSeries":
        """The series of ``f(z) = z``."""
        return cls.from_coeffs([0, 1], order)

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "TaylorSeries":
        try:
            order = int(data["order"])
            pairs = data["coeffs"]
            coeffs = [complex(float(re), float(im)) for re, im in pairs]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed series JSON: {exc}") from exc
        if len(coeffs) != order + 1:
            raise ValueError(f"series JSON declares order {order} but has {len(coeffs)} coefficients")
        return cls(np.array(coeffs, dtype=np.complex128))

    @classmethod
    def from_json(cls, text: str) -> "TaylorSeries":
        return cls.from_dict(json.loads(text))


def _same_order(series: Sequence[TaylorSeries]) -> int:
    orders = {s.order for s in series}
    if len(orders) != 1:
        raise OrderMismatchError(f"series orders differ: {sorted(orders)}")
    return orders.pop()


def linear_combine(terms: Sequence[tuple[complex, TaylorSeries]]) -> TaylorSeries:
    """Coefficientwise ``sum(w * s for w, s in terms)``."""
    if not terms:
        raise ValueError("linear_combine needs at least one term")
    _same_order([s for _, s in terms])
    acc = np.zeros_like(terms[0][1].coeffs)
    for w, s in terms:
        acc = acc + complex(w) * s.coeffs
    return TaylorSeries(acc)


def cauchy_product(a: TaylorSeries, b: TaylorSeries) -> TaylorSeries:
    n = _same_order([a, b])
    return TaylorSeries(np.convolve(a.coeffs, b.coeffs)[: n + 1])


def reciprocal(a: TaylorSeries, tol: float = INVERT_TOL) -> TaylorSeries:
    """Series ``b`` with ``a * b = 1 + O(z**(N+1))``."""
    c = a.coeffs
    if abs(c[0]) <= tol:
        raise NonInvertibleError(f"constant term {c[0]!r} is not invertible (tol {tol:g})")
    n = a.order
    b = np.zeros(n + 1, dtype=np.complex128)
    inv0 = 1.0 / c[0]
    b[0] = inv0
    for k in range(1, n + 1):
        # b[k-1::-1] is b_{k-1}, ..., b_0
        b[k] = -np.dot(c[1 : k + 1], b[k - 1 :: -1]) * inv0
    return TaylorSeries(b)


def derivative(a: TaylorSeries) -> TaylorSeries:
    """``f'``; the top coefficient is unknown after differentiation and is set to 0."""
    c = a.coeffs
    out = np.zeros_like(c)
    out[:-1] = c[1:] * np.arange(1, c.size)
    return TaylorSeries(out)


def shift_up(a: TaylorSeries) -> TaylorSeries:
    """Multiply by ``z``, dropping the coefficient pushed past the order."""
    out = np.zeros_like(a.coeffs)
    out[1:] = a.coeffs[:-1]
    return TaylorSeries(out)


def shift_down(a: TaylorSeries) -> TaylorSeries:
    """Divide by ``z`` (discards ``a_0``); the top slot is zero-padded."""
    out = np.zeros_like(a.coeffs)
    out[:-1] = a.coeffs[1:]
    return TaylorSeries(out)


def truncate(a: TaylorSeries, valid: int) -> TaylorSeries:
    """Zero every coefficient above index ``valid`` (order is unchanged)."""
    out = a.coeffs.copy()
    out[valid + 1 :] = 0
    return TaylorSeries(out)


def _check_domain(z, rho_max):
    za = np.asarray(z)
    if not np.all(np.isfinite(za)):
        raise DomainError("evaluation point must be finite")
    if np.any(np.abs(za) > rho_max):
        worst = float(np.max(np.abs(za)))
        raise DomainError(f"|z| = {worst:.6g} exceeds the evaluation ceiling {rho_max}")
    return za


# Horner's loop costs one numpy call per coefficient; for few points and a long
# series a power table times the coefficient vector is much cheaper.
POWER_TABLE_POINTS = 128
POWER_TABLE_CELLS = 1 << 20


def _power_table_eval(c: np.ndarray, z: np.ndarray, derivative: bool):
    flat = z.ravel()
    val = np.empty(flat.size, dtype=np.complex128)
    der = np.empty(flat.size, dtype=np.complex128) if derivative else None
    dc = np.arange(1, c.size) * c[1:]
    step = max(1, POWER_TABLE_CELLS // c.size)
    for lo in range(0, flat.size, step):
        zb = flat[lo : lo + step]
        table = np.empty((zb.size, c.size), dtype=np.complex128)
        table[:, 0] = 1.0
        table[:, 1:] = zb[:, None]
        np.cumprod(table[:, 1:], axis=1, out=table[:, 1:])
        val[lo : lo + step] = table @ c
        if derivative:
            der[lo : lo + step] = table[:, :-1] @ dc
    if derivative:
        return val.reshape(z.shape), der.reshape(z.shape)
    return val.reshape(z.shape)


def _use_table(za: np.ndarray, c: np.ndarray) -> bool:
    return 0 < za.size <= POWER_TABLE_POINTS and c.size > 64


def evaluate(a: TaylorSeries, z, rho_max: float = RHO_MAX):
    """Value of the truncated polynomial.  ``z`` may be a scalar or an array.

    Horner (highest degree first) for many points; a power table for few points
    and long series.
    """
    za = _check_domain(z, rho_max)
    c = a.coeffs
    if _use_table(za, c):
        acc = _power_table_eval(c, za, False)
    else:
        acc = np.full(za.shape, c[-1], dtype=np.complex128)
        for k in range(c.size - 2, -1, -1):
            acc = acc * za + c[k]
    return acc[()] if acc.ndim == 0 else acc


def evaluate_with_derivative(a: TaylorSeries, z, rho_max: float = RHO_MAX):
    """``(f(z), f'(z))`` of the truncated polynomial in one pass."""
    za = _check_domain(z, rho_max)
    c = a.coeffs
    if _use_table(za, c):
        p, dp = _power_table_eval(c, za, True)
    else:
        p = np.full(za.shape, c[-1], dtype=np.complex128)
        dp = np.zeros(za.shape, dtype=np.complex128)
        for k in range(c.size - 2, -1, -1):
            dp = dp * za + p
            p = p * za + c[k]
    if p.ndim == 0:
        return p[()], dp[()]
    return p, dp


def tail_bound(order: int, radius: float, scale: float = 1.0, power: int = 1) -> float:
    """Bound on ``sum_{n > order} scale * n**power * radius**n``.

    Closed forms for ``power`` 0 and 1; higher powers are summed numerically.
    """
    r = float(radius)
    if r <= 0:
        return 0.0
    if r >= 1:
        return math.inf
    n1 = order + 1
    if power == 0:
        return scale * r**n1 / (1 - r)
    if power == 1:
        return scale * r**n1 * (n1 - order * r) / (1 - r) ** 2
    total = 0.0
    n = n1
    while True:
        term = n**power * r**n
        total += term
        if term < 1e-18 * total and n > power / (-math.log(r)):
            break
        n += 1
    return scale * total


def required_order(radius: float, tol: float, scale: float = 1.0, power: int = 1,
                   minimum: int = DEFAULT_ORDER) -> int:
    """Smallest order >= ``minimum`` whose :func:`tail_bound` is at most ``tol``."""
    if not 0 < radius < 1:
        raise DomainError("required_order needs 0 < radius < 1")
    lo = minimum
    if tail_bound(lo, radius, scale, power) <= tol:
        return lo
    hi = lo * 2
    while tail_bound(hi, radius, scale, power) > tol:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(mid, radius, scale, power) <= tol:
            hi = mid
        else:
            lo = mid
    return hi
