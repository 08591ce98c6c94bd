"""Support-point certificates for the classes U and G.

A function ``f`` of a compact family is a support point when some continuous
linear functional with non-constant real part attains its maximum over the
family at ``f``.  For both classes the maximum over the family equals the
maximum over the closed convex hull, which equals ``max Re G`` over the circle.
The maximizers of a hull functional are exactly the measures supported on the
finitely many circle maximizers; a class member must moreover be univalent,
which rules out every measure with two or more atoms (each atom contributes a
double pole on the circle).

This module assembles that chain of evidence into :class:`SupportCertificate`
objects.
"""
from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import series as ps
from .classes import DiskGrid, InjectivityResult, MembershipVerdict, injectivity_probe, \
    membership_halfplane, membership_u
from .errors import NonconstantRequiredError, SchlichtError
from .families import AtomicMeasure, CirclePoint, FamilyId, hull_member, pole_set
from .functionals import (CLUSTER_TOL, DEFAULT_SAMPLES, REFINE_TOL, FunctionalSpec,
                          G_of_x, evaluate_functional, maximize_on_circle,
                          nonconstancy_check)
from .series import DEFAULT_ORDER, TaylorSeries

CERT_TOL = 1e-8
MEMBERSHIP_TAIL_TOL = 1e-7
PROBE_TAIL_TOL = 1e-8

CERTIFIED = "certified_support_point"
CERTIFIED_HULL = "certified_hull_support_point"
REJECTED = "rejected"

# extremal value of Re(conj(x0) a_2) over each class
SECOND_COEFF_MAX = {FamilyId.KOEBE: 2.0, FamilyId.G: 1.5}


def seed_from_env(default: int = 0) -> int:
    """Seed for randomized validator draws, overridable by ``SCHLICHT_SEED``."""
    raw = os.environ.get("SCHLICHT_SEED")
    return int(raw) if raw not in (None, "") else default


def membership_order(family: FamilyId, grid: DiskGrid) -> int:
    """Series order at which the family's class oracle is accurate on ``grid``.

    The Koebe defect ``-x**2 z**2`` is a polynomial, so any order works.  The
    G-family field ``1 + 3xz/(1 - xz)`` has coefficients of modulus 3.
    """
    if FamilyId.parse(family) is FamilyId.KOEBE:
        return DEFAULT_ORDER
    return ps.required_order(grid.r_max, MEMBERSHIP_TAIL_TOL, scale=3.0, power=0)


def probe_order(grid: DiskGrid) -> int:
    """Order at which hull members (``|a_n| <= n``) evaluate accurately on ``grid``."""
    return ps.required_order(grid.r_max, PROBE_TAIL_TOL, power=1)


def class_membership(f: TaylorSeries, family: FamilyId, grid: DiskGrid) -> MembershipVerdict:
    """Membership in U (``lambda = 1``) for the Koebe family, in G for the G-family."""
    if FamilyId.parse(family) is FamilyId.KOEBE:
        return membership_u(f, 1.0, grid)
    return membership_halfplane(f, "convex_shift", -0.5, grid)


@dataclass(frozen=True)
class SupportCertificate:
    functional: FunctionalSpec
    family: FamilyId
    candidate: "AtomicMeasure | TaylorSeries"
    max_value: float
    candidate_value: float
    nonconstant: bool
    class_membership: MembershipVerdict | None
    verdict: str
    reason: str = ""
    maximizers: list = field(default_factory=list)
    poles: list = field(default_factory=list)
    collision: InjectivityResult | None = None
    config: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict in (CERTIFIED, CERTIFIED_HULL)

    def to_dict(self) -> dict:
        cand = self.candidate
        out = {
            "verdict": self.verdict,
            "reason": self.reason,
            "family": self.family.value,
            "functional": self.functional.to_dict(),
            "candidate": ({"measure": cand.to_dict()} if isinstance(cand, AtomicMeasure)
                          else {"series": cand.to_dict()}),
            "max_value": self.max_value,
            "candidate_value": self.candidate_value,
            "nonconstant": self.nonconstant,
            "maximizers": [p.theta for p in self.maximizers],
            "class_membership": None if self.class_membership is None
            else self.class_membership.to_dict(),
            "poles": [{"location": [z.real, z.imag], "order": k} for z, k in self.poles],
            "collision": None if self.collision is None else self.collision.to_dict(),
            "config": self.config,
        }
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def second_coeff_functional(x0: CirclePoint) -> FunctionalSpec:
    """``phi(f) = conj(x0) a_2``."""
    x0 = x0 if isinstance(x0, CirclePoint) else CirclePoint(x0)
    return FunctionalSpec.finite({2: np.conj(x0.x)})


def _config(grid: DiskGrid, order: int, samples: int, **extra) -> dict:
    cfg = {"grid": grid.to_dict(), "order": order, "coarse_samples": samples,
           "refine_tol": REFINE_TOL, "cluster_tol": CLUSTER_TOL, "cert_tol": CERT_TOL}
    cfg.update(extra)
    return cfg


def certify_extreme_support(x0, family: FamilyId, functional: FunctionalSpec | None = None,
                            grid: DiskGrid | None = None, order: int | None = None,
                            coarse_samples: int = DEFAULT_SAMPLES) -> SupportCertificate:
    """Certify that the family member at ``x0`` is a support point of its class.

    Uses ``phi = conj(x0) a_2`` unless another functional is supplied.  The
    certificate records class membership on the grid, the circle maximum, and
    the candidate's own functional value.
    """
    family = FamilyId.parse(family)
    x0 = x0 if isinstance(x0, CirclePoint) else CirclePoint(x0)
    grid = grid or DiskGrid.default()
    J = functional if functional is not None else second_coeff_functional(x0)
    order = order or max(membership_order(family, grid), _functional_order(J))
    mu = AtomicMeasure.point_mass(x0)
    cfg = _config(grid, order, coarse_samples)
    return _certify_single(J, family, mu, grid, order, coarse_samples, cfg)


def _certify_single(J, family, mu, grid, order, samples, cfg) -> SupportCertificate:
    f = hull_member(mu, family, order)
    try:
        member = class_membership(f, family, grid)
    except SchlichtError as exc:
        return SupportCertificate(J, family, mu, math.nan, math.nan, False, None, REJECTED,
                                  f"class oracle failed: {exc}", config=cfg)
    nonconstant = nonconstancy_check(J, family, samples)
    result = maximize_on_circle(J, family, samples)
    value = float(evaluate_functional(J, f)[0].real)
    if not nonconstant:
        verdict, reason = REJECTED, "nonconstant = false: Re J is constant on the extreme family"
    elif not member.holds:
        verdict, reason = REJECTED, f"candidate fails its class oracle (margin {member.margin:.3g})"
    elif abs(value - result.max_value) > CERT_TOL:
        verdict, reason = REJECTED, (f"candidate value {value!r} is below the maximum "
                                     f"{result.max_value!r}")
    else:
        verdict, reason = CERTIFIED, "maximizes Re J over the class"
    return SupportCertificate(J, family, mu, result.max_value, value, nonconstant, member,
                              verdict, reason, list(result.maximizers), pole_set(mu), None, cfg)


@dataclass(frozen=True)
class HullSupportSet:
    """All maximizers of ``Re J`` over the hull: measures supported on ``maximizers``."""

    functional: FunctionalSpec
    family: FamilyId
    maximizers: list
    max_value: float
    description: str
    validation: dict = field(default_factory=dict)

    def contains(self, mu: AtomicMeasure, tol: float = CLUSTER_TOL) -> bool:
        return all(any(pt.distance(m) <= tol for m in self.maximizers) for pt in mu.support())

    def member(self, weights, order: int = DEFAULT_ORDER) -> TaylorSeries:
        mu = AtomicMeasure(tuple(zip(weights, self.maximizers)))
        return hull_member(mu, self.family, order)


def _off_point(rng, avoid: list[CirclePoint], min_gap: float) -> CirclePoint:
    while True:
        pt = CirclePoint(rng.uniform(0, 2 * math.pi))
        if all(pt.distance(a) > min_gap for a in avoid):
            return pt


def validate_hull_set(J: FunctionalSpec, family: FamilyId, maximizers: list, max_value: float,
                      seed: int | None = None, draws: int = 20, order: int = DEFAULT_ORDER,
                      min_gap: float = 0.05) -> dict:
    """Random measures on the maximizers attain ``max_value``; measures with an atom
    off the maximizers (by more than ``min_gap`` rad) fall strictly below it."""
    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    on_gap, off_gap = 0.0, math.inf
    for _ in range(draws):
        w = rng.dirichlet(np.ones(len(maximizers)))
        mu = AtomicMeasure(tuple(zip(w / math.fsum(w), maximizers)))
        val = evaluate_functional(J, hull_member(mu, family, order))[0].real
        on_gap = max(on_gap, abs(val - max_value))

        off = _off_point(rng, maximizers, min_gap)
        pts = [maximizers[int(rng.integers(len(maximizers)))], off]
        t = rng.uniform(0.1, 0.9)
        mu = AtomicMeasure(((t, pts[0]), (1 - t, pts[1])))
        val = evaluate_functional(J, hull_member(mu, family, order))[0].real
        off_gap = min(off_gap, max_value - val)
    return {"draws": draws, "on_support_max_gap": float(on_gap), "off_support_min_gap": float(off_gap),
            "on_support_attains": bool(on_gap <= CERT_TOL), "off_support_below": bool(off_gap > CERT_TOL)}


def hull_support_set(J: FunctionalSpec, family: FamilyId, coarse_samples: int = DEFAULT_SAMPLES,
                     seed: int | None = None, draws: int = 20) -> HullSupportSet:
    """Maximizer set ``X*`` of ``Re G`` with a sampling validation of the hull claim."""
    family = FamilyId.parse(family)
    if not nonconstancy_check(J, family, coarse_samples):
        raise NonconstantRequiredError("Re J is constant on the extreme family; no support points")
    res = maximize_on_circle(J, family, coarse_samples)
    order = _functional_order(J)
    check = validate_hull_set(J, family, res.maximizers, res.max_value, seed, draws, order)
    desc = (f"all atomic measures supported on {len(res.maximizers)} maximizer(s); "
            "hull members sum_k lambda_k F(z, x_k) with x_k in X*")
    return HullSupportSet(J, family, list(res.maximizers), res.max_value, desc, check)


def _functional_order(J: FunctionalSpec) -> int:
    if J.is_finite:
        return max(DEFAULT_ORDER, J.support)
    c, rho = J.generator
    return ps.required_order(rho, 1e-14 / max(abs(c), 1e-300), power=1) if rho < 1 else DEFAULT_ORDER


def _reject_mixture(J, family, mu, max_value, maximizers, grid, order, separation_tol, cfg
                    ) -> SupportCertificate:
    f = hull_member(mu, family, order)
    value = float(evaluate_functional(J, f)[0].real)
    poles = pole_set(mu)
    probe = injectivity_probe(f, grid, separation_tol)
    if value < max_value - CERT_TOL:
        verdict, reason = REJECTED, "not a maximizer of Re J over the hull"
    elif probe.collision is not None and len(poles) >= 2:
        verdict, reason = REJECTED, "univalence obstruction: two double poles on the circle and a found collision"
    else:
        verdict, reason = CERTIFIED_HULL, "maximizes Re J over the hull; no collision found on the grid"
    return SupportCertificate(J, family, mu, max_value, value, True, None, verdict, reason,
                              list(maximizers), poles, probe, cfg)


def class_support_filter(J: FunctionalSpec, family: FamilyId, grid: DiskGrid | None = None,
                         coarse_samples: int = DEFAULT_SAMPLES, separation_tol: float = 1e-3,
                         seed: int | None = None) -> list[SupportCertificate]:
    """Certificates for every element class of the hull support set.

    Each maximizer ``x*`` yields a single-atom candidate with a full certificate;
    each pair of maximizers yields the equal-weight mixture, rejected once the
    injectivity probe finds a collision.
    """
    family = FamilyId.parse(family)
    grid = grid or DiskGrid.default()
    hull = hull_support_set(J, family, coarse_samples, seed)
    m_order = max(membership_order(family, grid), _functional_order(J))
    p_order = max(probe_order(grid), _functional_order(J))
    cfg = _config(grid, m_order, coarse_samples, probe_order=p_order,
                  separation_tol=separation_tol, validation=hull.validation)
    certs = [_certify_single(J, family, AtomicMeasure.point_mass(x), grid, m_order,
                             coarse_samples, cfg) for x in hull.maximizers]
    for a, b in itertools.combinations(hull.maximizers, 2):
        mu = AtomicMeasure(((0.5, a), (0.5, b)))
        certs.append(_reject_mixture(J, family, mu, hull.max_value, hull.maximizers, grid,
                                     p_order, separation_tol, cfg))
    return certs


def certify_candidate(J: FunctionalSpec, family: FamilyId, mu: AtomicMeasure,
                      grid: DiskGrid | None = None, coarse_samples: int = DEFAULT_SAMPLES,
                      separation_tol: float = 1e-3) -> SupportCertificate:
    """Certificate for a caller-supplied hull member."""
    family = FamilyId.parse(family)
    grid = grid or DiskGrid.default()
    if not nonconstancy_check(J, family, coarse_samples):
        raise NonconstantRequiredError("Re J is constant on the extreme family; no support points")
    support = AtomicMeasure(tuple((lam, pt) for lam, pt in mu.atoms if lam > 0))
    if support.m == 1:
        order = max(membership_order(family, grid), _functional_order(J))
        cfg = _config(grid, order, coarse_samples)
        return _certify_single(J, family, support, grid, order, coarse_samples, cfg)
    res = maximize_on_circle(J, family, coarse_samples)
    order = max(probe_order(grid), _functional_order(J))
    cfg = _config(grid, order, coarse_samples, separation_tol=separation_tol)
    return _reject_mixture(J, family, support, res.max_value, res.maximizers, grid, order,
                           separation_tol, cfg)


def hull_values(J: FunctionalSpec, family: FamilyId, mu: AtomicMeasure) -> float:
    """``Re J`` of the hull member via the circle function: ``sum lambda_k Re G(x_k)``."""
    return float(sum(lam * G_of_x(J, family, pt).real for lam, pt in mu.atoms))
