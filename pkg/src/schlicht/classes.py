"""Grid-based membership oracles for classes of normalized analytic functions.

Every class is defined by a strict pointwise inequality on the open disk.  The
oracles evaluate the defining quantity on a compact :class:`DiskGrid` and
report a signed margin; a verdict never claims anything about the boundary.

Derived quantities (``f'(z/f)**2 - 1``, ``z f'/f``, ``1 + z f''/f'``, ...) are
formed with series arithmetic and evaluated by Horner.  Differentiation loses
the top coefficient, so derived series are trusted up to order ``N - 1`` only
and their higher slots are cleared before evaluation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.spatial import cKDTree

from . import series as ps
from .errors import DegenerateSeriesError, NonInvertibleError
from .series import RHO_MAX, TaylorSeries

HOLDS = "holds_on_grid"
VIOLATED = "violated"
NONVANISHING_TOL = 1e-6
COLLISION_RTOL = 1e-6
PROBE_CHUNK = 512

Kind = Literal["starlike", "convex_shift"]


@dataclass(frozen=True)
class DiskGrid:
    """Polar grid: every radius carries ``angles`` equispaced points starting at angle 0."""

    radii: tuple
    angles: int = 256

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii:
            raise ValueError("grid needs at least one radius")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("grid radii must be strictly ascending")
        if radii[0] <= 0 or radii[-1] > RHO_MAX:
            raise ValueError(f"grid radii must lie in (0, {RHO_MAX}]")
        if int(self.angles) < 8:
            raise ValueError("grid needs at least 8 angles per radius")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "angles", int(self.angles))

    @classmethod
    def geometric(cls, count: int = 32, angles: int = 256, r_min: float = 0.1,
                  r_max: float = 0.99) -> "DiskGrid":
        return cls(tuple(np.geomspace(r_min, r_max, count)), angles)

    @classmethod
    def default(cls) -> "DiskGrid":
        return cls.geometric()

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.radii), self.angles

    def thetas(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angles) / self.angles

    def points(self) -> np.ndarray:
        """Complex array of shape ``(len(radii), angles)``, radius-major."""
        return np.asarray(self.radii)[:, None] * np.exp(1j * self.thetas())[None, :]

    def refine(self) -> "DiskGrid":
        """A grid containing every point of this one: doubled angles, geometric radius midpoints."""
        r = np.asarray(self.radii)
        mids = np.sqrt(r[:-1] * r[1:])
        return DiskGrid(tuple(np.sort(np.concatenate([r, mids]))), 2 * self.angles)

    def to_dict(self) -> dict:
        return {"radii": list(self.radii), "angles": self.angles}

    @classmethod
    def from_dict(cls, data: dict) -> "DiskGrid":
        return cls(tuple(data["radii"]), int(data["angles"]))


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: str
    margin: float
    witness: complex
    tail_bound: float
    grid: DiskGrid
    conditional: bool = False
    quantity: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "margin": self.margin,
            "witness": [self.witness.real, self.witness.imag],
            "tail_bound": self.tail_bound,
            "grid": self.grid.to_dict(),
        }
        if self.quantity:
            out["quantity"] = self.quantity
        if self.conditional:
            out["conditional"] = True
        return out


def _verdict(margin: float, witness: complex, tail: float, grid: DiskGrid, quantity: str,
             conditional: bool = False) -> MembershipVerdict:
    return MembershipVerdict(VIOLATED if margin < 0 else HOLDS, float(margin), complex(witness),
                             float(tail), grid, conditional, quantity)


def _tail_estimate(s: TaylorSeries, valid: int, radius: float) -> float:
    """Tail of a derived series at ``radius`` assuming its coefficients stay below
    the largest modulus seen in the top quarter of the trusted range.

    An estimate, not a rigorous bound: truncated data cannot bound what lies past it.
    """
    lo = max(1, (3 * valid) // 4)
    envelope = float(np.max(np.abs(s.coeffs[lo : valid + 1])))
    return ps.tail_bound(valid, radius, scale=envelope, power=0)


def _quotient_over_z(f: TaylorSeries) -> TaylorSeries:
    """Series of ``z / f(z)`` for normalized ``f``."""
    try:
        return ps.reciprocal(ps.shift_down(f))
    except NonInvertibleError as exc:
        raise DegenerateSeriesError(f"f(z)/z is not invertible: {exc}") from None


# -- class U(lambda) --------------------------------------------------------


def u_defect_series(f: TaylorSeries) -> TaylorSeries:
    """Series of ``f'(z) (z/f(z))**2 - 1``, trusted up to order ``N - 1``."""
    q = _quotient_over_z(f)
    d = ps.cauchy_product(ps.derivative(f), ps.cauchy_product(q, q))
    d = ps.truncate(d, f.order - 1)
    return d - TaylorSeries.constant(1.0, f.order)


def u_defect(f: TaylorSeries, z):
    return ps.evaluate(u_defect_series(f), z)


def membership_u(f: TaylorSeries, lam: float = 1.0, grid: DiskGrid | None = None) -> MembershipVerdict:
    """Check ``|f'(z)(z/f(z))**2 - 1| < lam`` on the grid."""
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    grid = grid or DiskGrid.default()
    d = u_defect_series(f)
    pts = grid.points()
    mod = np.abs(ps.evaluate(d, pts))
    k = np.unravel_index(np.argmax(mod), mod.shape)
    tail = _tail_estimate(d, f.order - 1, grid.r_max)
    return _verdict(lam - mod[k], pts[k], tail, grid, f"U({lam:g})")


# -- half-plane classes -----------------------------------------------------


def halfplane_field_series(f: TaylorSeries, kind: Kind) -> TaylorSeries:
    """``z f'/f`` (starlike) or ``1 + z f''/f'`` (convex_shift), trusted to order ``N - 1``."""
    df = ps.derivative(f)
    if kind == "starlike":
        out = ps.cauchy_product(df, _quotient_over_z(f))
    elif kind == "convex_shift":
        try:
            inv = ps.reciprocal(df)
        except NonInvertibleError as exc:
            raise DegenerateSeriesError(f"f' is not invertible: {exc}") from None
        zf2 = ps.shift_up(ps.derivative(df))
        out = ps.cauchy_product(zf2, inv) + TaylorSeries.constant(1.0, f.order)
    else:
        raise ValueError(f"unknown field kind {kind!r}")
    return ps.truncate(out, f.order - 1)


def halfplane_field(f: TaylorSeries, kind: Kind, z):
    return ps.evaluate(halfplane_field_series(f, kind), z)


def _check_denominator(s: TaylorSeries, pts: np.ndarray, what: str):
    vals = np.abs(ps.evaluate(s, pts))
    if np.min(vals) <= ps.INVERT_TOL:
        k = np.unravel_index(np.argmin(vals), vals.shape)
        raise DegenerateSeriesError(f"{what} vanishes near z = {pts[k]:.6g}")


def _min_real_verdict(field_series: TaylorSeries, valid: int, threshold: float,
                      grid: DiskGrid, quantity: str, rotation: complex = 1.0,
                      conditional: bool = False) -> MembershipVerdict:
    pts = grid.points()
    re = (rotation * ps.evaluate(field_series, pts)).real
    k = np.unravel_index(np.argmin(re), re.shape)
    tail = _tail_estimate(field_series, valid, grid.r_max)
    return _verdict(re[k] - threshold, pts[k], tail, grid, quantity, conditional)


def membership_halfplane(f: TaylorSeries, kind: Kind, threshold: float,
                         grid: DiskGrid | None = None) -> MembershipVerdict:
    """``min Re(field) - threshold`` over the grid.

    Thresholds: 0 for starlike (``kind="starlike"``) and convex
    (``kind="convex_shift"``); -1/2 for the class G (``kind="convex_shift"``).
    """
    grid = grid or DiskGrid.default()
    if kind == "convex_shift":
        _check_denominator(ps.derivative(f), grid.points(), "f'")
    s = halfplane_field_series(f, kind)
    return _min_real_verdict(s, f.order - 1, threshold, grid, f"Re {kind} > {threshold:g}")


def membership_ctc(f: TaylorSeries, g: TaylorSeries, alpha: float,
                   grid: DiskGrid | None = None) -> MembershipVerdict:
    """Close-to-convexity with argument ``alpha``: ``Re(exp(i alpha) z f'/g) > 0``.

    The verdict is marked conditional when ``g`` itself fails the starlike check.
    """
    if not -math.pi / 2 < alpha < math.pi / 2:
        raise ValueError("alpha must lie in (-pi/2, pi/2)")
    grid = grid or DiskGrid.default()
    conditional = not membership_halfplane(g, "starlike", 0.0, grid).holds
    s = ps.truncate(ps.cauchy_product(ps.derivative(f), _quotient_over_z(g)), f.order - 1)
    return _min_real_verdict(s, f.order - 1, 0.0, grid, f"Re e^(i{alpha:g}) zf'/g > 0",
                             rotation=cmath.exp(1j * alpha), conditional=conditional)


def alexander_check(f: TaylorSeries, grid: DiskGrid | None = None) -> bool:
    """Whether the convexity test on ``f`` and the starlikeness test on ``z f'`` agree."""
    grid = grid or DiskGrid.default()
    convex = membership_halfplane(f, "convex_shift", 0.0, grid)
    starlike = membership_halfplane(ps.shift_up(ps.derivative(f)), "starlike", 0.0, grid)
    return convex.verdict == starlike.verdict


# -- zeros ------------------------------------------------------------------


MAX_ARG_STEP = np.pi / 4
MAX_WINDING_SAMPLES = 1 << 16


def _winding_number(h: TaylorSeries, r: float, vals: np.ndarray) -> int | None:
    """Winding of ``h`` along ``|z| = r`` about the origin, or None if unresolved.

    Samples are doubled until no step turns by more than ``MAX_ARG_STEP``;
    otherwise a fast turn near a boundary singularity would alias.
    """
    while True:
        steps = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(steps)) <= MAX_ARG_STEP:
            return int(np.rint(np.sum(steps) / (2 * np.pi)))
        m = 2 * vals.size
        if m > MAX_WINDING_SAMPLES:
            return None
        vals = ps.evaluate(h, r * np.exp(2j * np.pi * np.arange(m) / m))


def _newton_zero(h: TaylorSeries, z0: complex, r_max: float, steps: int = 60) -> complex:
    z = complex(z0)
    for _ in range(steps):
        v, dv = ps.evaluate_with_derivative(h, z)
        if dv == 0:
            break
        step = v / dv
        if abs(step) > 0.1:
            step *= 0.1 / abs(step)
        znew = z - step
        if abs(znew) > r_max:
            znew *= r_max / abs(znew)
        z = znew
        if abs(step) < 1e-15:
            break
    return z


def _zero_free_verdict(h: TaylorSeries, valid: int, grid: DiskGrid, quantity: str,
                       tol: float = NONVANISHING_TOL) -> MembershipVerdict:
    pts = grid.points()
    vals = ps.evaluate(h, pts)
    mod = np.abs(vals)
    k = np.unravel_index(np.argmin(mod), mod.shape)
    witness, smallest = pts[k], mod[k]
    if smallest >= tol:
        hits = [i for i, r in enumerate(grid.radii) if _winding_number(h, r, vals[i])]
        if hits:
            # a zero lies inside circle hits[0] but was not sampled; locate it
            i = hits[0]
            band = mod[max(i - 1, 0) : i + 1]
            j = np.unravel_index(np.argmin(band), band.shape)
            start = pts[max(i - 1, 0) + j[0], j[1]]
            witness = _newton_zero(h, start, grid.r_max)
            smallest = abs(ps.evaluate(h, witness))
            if smallest >= tol:
                # Newton stalled; the winding count alone still proves a zero
                smallest = 0.0
    tail = _tail_estimate(h, valid, grid.r_max)
    return _verdict(smallest - tol, witness, tail, grid, quantity)


def nonvanishing_check(f: TaylorSeries, grid: DiskGrid | None = None) -> MembershipVerdict:
    """``min |f(z)/z|`` over the grid, shifted by the 1e-6 floor so that a negative
    margin means violated.  Zeros between grid points are caught by winding numbers."""
    grid = grid or DiskGrid.default()
    return _zero_free_verdict(ps.shift_down(f), f.order - 1, grid, "f(z)/z != 0")


def local_univalence_check(f: TaylorSeries, grid: DiskGrid | None = None) -> MembershipVerdict:
    """``f' != 0`` on the grid: a necessary condition for local univalence only."""
    grid = grid or DiskGrid.default()
    return _zero_free_verdict(ps.derivative(f), f.order - 1, grid, "f' != 0")


# -- coefficients -----------------------------------------------------------


@dataclass(frozen=True)
class CoefficientRow:
    n: int
    modulus: float
    bound: float
    slack: float

    @property
    def violated(self) -> bool:
        return self.modulus > self.bound * (1 + 1e-12)


def g_coefficient_report(f: TaylorSeries) -> list[CoefficientRow]:
    """Compare ``|a_n|`` against ``(n+1)/2`` for ``n = 2..N`` (necessary for class G)."""
    rows = []
    for n in range(2, f.order + 1):
        mod = abs(complex(f.coeffs[n]))  # correctly rounded hypot
        bound = (n + 1) / 2
        rows.append(CoefficientRow(n, mod, bound, bound - mod))
    return rows


def g_coefficient_violations(f: TaylorSeries) -> list[int]:
    return [row.n for row in g_coefficient_report(f) if row.violated]


# -- injectivity ------------------------------------------------------------


@dataclass(frozen=True)
class InjectivityResult:
    collision: tuple | None = None
    level: int | None = None
    candidates_tried: int = 0
    grid: DiskGrid | None = field(default=None, compare=False)

    @property
    def injective_on_grid(self) -> bool:
        return self.collision is None

    def to_dict(self) -> dict:
        if self.collision is None:
            return {"result": "injective_on_grid", "candidates_tried": self.candidates_tried}
        z1, z2 = self.collision
        return {
            "result": "collision",
            "z1": [z1.real, z1.imag],
            "z2": [z2.real, z2.imag],
            "level": self.level,
            "candidates_tried": self.candidates_tried,
        }


def _local_spacing(radii: np.ndarray, m: int) -> np.ndarray:
    """Largest distance to a neighbouring grid point, per radius."""
    if radii.size > 1:
        gaps = np.diff(radii)
        radial = np.maximum(np.concatenate([gaps[:1], gaps]), np.concatenate([gaps, gaps[-1:]]))
    else:
        radial = radii * 0.5
    return np.maximum(radial, radii * 2 * np.pi / m)


def _image_spacing(w: np.ndarray) -> np.ndarray:
    """Largest image distance from each grid point to its four grid neighbours."""
    s = np.maximum(np.abs(w - np.roll(w, 1, axis=1)), np.abs(w - np.roll(w, -1, axis=1)))
    if w.shape[0] > 1:
        up = np.abs(np.diff(w, axis=0))
        s[1:] = np.maximum(s[1:], up)
        s[:-1] = np.maximum(s[:-1], up)
    return s


def _short(f: TaylorSeries, mod: np.ndarray, n: np.ndarray, r: float) -> TaylorSeries:
    """``f`` cut where the dropped terms (and their derivatives) sum below 1e-17 at radius ``r``."""
    terms = (mod * np.maximum(n, 1)) * r ** n.astype(float)
    tail = np.cumsum(terms[::-1])[::-1]
    keep = np.flatnonzero(tail > 1e-17 * max(1.0, terms.max()))
    top = int(keep[-1]) + 1 if keep.size else 1
    if top >= f.order:
        return f
    return TaylorSeries(f.coeffs[: max(top, 1) + 1])


def _solve_preimages(f: TaylorSeries, targets: np.ndarray, starts: np.ndarray, r_max: float,
                     steps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised damped Newton for ``f(z) = target``; returns (z, converged)."""
    z = starts.astype(np.complex128).copy()
    alive = np.ones(z.shape, dtype=bool)
    done = np.zeros(z.shape, dtype=bool)
    scale = np.maximum(1.0, np.abs(targets))
    mod = np.abs(f.coeffs)
    n = np.arange(f.order + 1)
    for _ in range(steps):
        idx = np.flatnonzero(alive & ~done)
        if idx.size == 0:
            break
        v, dv = ps.evaluate_with_derivative(_short(f, mod, n, float(np.max(np.abs(z[idx])))), z[idx])
        res = v - targets[idx]
        conv = np.abs(res) <= 1e-13 * scale[idx]
        done[idx[conv]] = True
        with np.errstate(divide="ignore", invalid="ignore"):
            step = res / dv
        bad = ~np.isfinite(step) & ~conv
        big = np.abs(step) > 0.1
        step[big] *= 0.1 / np.abs(step[big])
        znew = z[idx] - np.where(bad | conv, 0, step)
        escaped = np.abs(znew) > r_max
        alive[idx[bad | escaped]] = False
        keep = ~(bad | escaped)
        z[idx[keep]] = znew[keep]
    v = ps.evaluate(f, np.where(alive, z, 0))
    done |= alive & (np.abs(v - targets) <= 1e-13 * scale)
    return z, alive & done


def injectivity_probe(f: TaylorSeries, grid: DiskGrid | None = None,
                      separation_tol: float = 1e-3, budget: int = 8192,
                      slack: float = 1.5) -> InjectivityResult:
    """Search for ``z1 != z2`` in the grid's disk with ``f(z1) = f(z2)``.

    Coarse-to-fine over sub-grids (every 4th, 2nd, then every point).  At each
    level a pair of grid points is a candidate when their images are closer than
    ``slack`` times the sum of the local image spacings while the points
    themselves are well separated.  Candidates are tried in order of normalised
    image distance, at most ``budget`` per level: Newton's method solves
    ``f(z) = f(z1)`` from ``z2``.  The first solution farther than
    ``separation_tol`` from ``z1`` with ``|f(z1) - f(z2)| < 1e-6 max(1, |f(z1)|)``
    is reported; ``z1`` is a grid point and ``z2`` the refined preimage.
    """
    grid = grid or DiskGrid.default()
    all_pts = grid.points()
    radii = np.asarray(grid.radii)
    tried = 0
    seen = set()
    for level, stride in enumerate((4, 2, 1)):
        ri = np.arange(0, radii.size, stride)
        ai = np.arange(0, grid.angles, stride)
        key = (ri.size, ai.size)
        if key in seen or ai.size < 8:
            continue
        seen.add(key)
        pts = all_pts[np.ix_(ri, ai)]
        w2 = ps.evaluate(f, pts)
        s = _image_spacing(w2).ravel()
        spacing = np.repeat(_local_spacing(radii[ri], ai.size), ai.size)
        z, w = pts.ravel(), w2.ravel()
        xy = np.column_stack([w.real, w.imag])
        neigh = cKDTree(xy).query_ball_point(xy, r=2 * slack * s)
        counts = np.fromiter((len(js) for js in neigh), dtype=np.int64, count=len(neigh))
        if counts.sum() == 0:
            continue
        a = np.repeat(np.arange(len(neigh)), counts)
        b = np.fromiter((j for js in neigh for j in js), dtype=np.int64, count=int(counts.sum()))
        ratio = np.abs(w[a] - w[b]) / (s[a] + s[b])
        sel = (a != b) & (ratio <= slack)
        # each unordered pair once, via a 1-d key
        keys = np.unique(np.minimum(a[sel], b[sel]) * z.size + np.maximum(a[sel], b[sel]))
        if keys.size == 0:
            continue
        a, b = keys // z.size, keys % z.size
        ratio = np.abs(w[a] - w[b]) / (s[a] + s[b])
        far = np.abs(z[a] - z[b]) > np.maximum(separation_tol,
                                               2.5 * np.maximum(spacing[a], spacing[b]))
        keep = (ratio <= slack) & far
        a, b, ratio = a[keep], b[keep], ratio[keep]
        order = np.lexsort((b, a, ratio))[:budget]
        a, b = a[order], b[order]
        # ranked candidates go to Newton in chunks; the first chunk with a hit decides
        for lo in range(0, a.size, PROBE_CHUNK):
            ca, cb = a[lo : lo + PROBE_CHUNK], b[lo : lo + PROBE_CHUNK]
            tried += ca.size
            z2, ok = _solve_preimages(f, w[ca], z[cb], grid.r_max)
            gap = np.abs(z2 - z[ca])
            match = np.abs(ps.evaluate(f, np.where(ok, z2, 0)) - w[ca])
            good = ok & (gap > separation_tol) & (match < COLLISION_RTOL * np.maximum(1, np.abs(w[ca])))
            hit = np.flatnonzero(good)
            if hit.size:
                k = hit[0]
                return InjectivityResult((complex(z[ca[k]]), complex(z2[k])), level, tried, grid)
    return InjectivityResult(None, None, tried, grid)
