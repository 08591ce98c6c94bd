"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the report lines are written
straight to the terminal (not captured) so they appear in every log.
"""
import math
import time

import numpy as np
import pytest

from conftest import brute_force_max, random_functional
from schlicht.classes import DiskGrid, g_coefficient_report, injectivity_probe, u_defect
from schlicht.families import (AtomicMeasure, CirclePoint, FamilyId, g_extreme_series,
                               hull_member, koebe_series, pole_set)
from schlicht.functionals import (FunctionalSpec, G_of_x, H_of_x, evaluate_functional,
                                  maximize_on_circle)
from schlicht.support import certify_extreme_support, probe_order, second_coeff_functional

SEED = 31337


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail
    return emit


def _draw_measure(rng, k):
    while True:
        thetas = rng.uniform(0, 2 * math.pi, k)
        pts = [CirclePoint(t) for t in thetas]
        if all(p.distance(q) > 1e-3 for i, p in enumerate(pts) for q in pts[i + 1:]):
            return AtomicMeasure(tuple(zip(rng.dirichlet(np.ones(k)), pts)))


def test_criterion_1_koebe_maximization(report):
    rng = np.random.default_rng(SEED + 1)
    start = time.perf_counter()
    value_err, arg_err, all_certified = 0.0, 0.0, True
    for t in rng.uniform(0, 2 * math.pi, 20):
        cert = certify_extreme_support(t, FamilyId.KOEBE)
        all_certified &= cert.certified and len(cert.maximizers) == 1
        value_err = max(value_err, abs(cert.max_value - 2.0))
        arg_err = max(arg_err, max(p.distance(CirclePoint(t)) for p in cert.maximizers))
    elapsed = time.perf_counter() - start
    ok = all_certified and value_err <= 1e-9 and arg_err <= 1e-6 and elapsed < 5.0
    report(1, "Koebe-family maximization", ok,
           f"max|max_value-2| = {value_err:.2e} (tol 1e-9), max argmax error = {arg_err:.2e} rad "
           f"(tol 1e-6), unique maximizer and certified for 20/20: {all_certified}, "
           f"runtime {elapsed:.2f} s (limit 5 s)")


def test_criterion_2_g_family_maximization(report):
    rng = np.random.default_rng(SEED + 2)
    value_err, arg_err, all_certified = 0.0, 0.0, True
    for t in rng.uniform(0, 2 * math.pi, 20):
        cert = certify_extreme_support(t, FamilyId.G)
        all_certified &= cert.certified and len(cert.maximizers) == 1
        value_err = max(value_err, abs(cert.max_value - 1.5))
        arg_err = max(arg_err, max(p.distance(CirclePoint(t)) for p in cert.maximizers))
    ok = all_certified and value_err <= 1e-9 and arg_err <= 1e-6
    report(2, "G-family maximization", ok,
           f"max|max_value-3/2| = {value_err:.2e} (tol 1e-9), max argmax error = {arg_err:.2e} rad, "
           f"certified for 20/20: {all_certified}")


def test_criterion_3_u_defect_closed_form(report):
    rng = np.random.default_rng(SEED + 3)
    grid = DiskGrid.default()
    pts = grid.points()
    worst = 0.0
    for t in rng.uniform(0, 2 * math.pi, 20):
        peak = float(np.max(np.abs(u_defect(koebe_series(t), pts))))
        worst = max(worst, abs(peak - grid.r_max**2))
    report(3, "U-defect of the Koebe function", worst <= 1e-6,
           f"max over 20 rotations of |max|defect| - r_max^2| = {worst:.2e} (tol 1e-6), "
           f"r_max = {grid.r_max}")


def test_criterion_4_coefficient_equality(report):
    rng = np.random.default_rng(SEED + 4)
    nonzero, worst, rows = 0, 0.0, 0
    for t in rng.uniform(0, 2 * math.pi, 20):
        for row in g_coefficient_report(g_extreme_series(t, 128)):
            rows += 1
            nonzero += row.slack != 0
            worst = max(worst, abs(row.slack))
    report(4, "coefficient bound equality for the G-family", nonzero == 0,
           f"{rows} rows (n = 2..128, 20 rotations), rows with nonzero slack: {nonzero}, "
           f"max |slack| = {worst:.1e}")


def test_criterion_5_circle_identity(report):
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for family in FamilyId:
        for _ in range(20):
            J = random_functional(rng, family, max_degree=16)
            x = np.exp(1j * rng.uniform(0, 2 * math.pi, 100))
            worst = max(worst, float(np.max(np.abs(H_of_x(J, family, x) - G_of_x(J, family, x).real))))
    report(5, "H(x) = Re G(x) on the circle", worst < 1e-12,
           f"max |H - Re G| = {worst:.2e} over 2 x 20 functionals x 100 points (tol 1e-12)")


def test_criterion_6_finite_maximizer_sets(report):
    res = maximize_on_circle(FunctionalSpec.finite({3: 1}), FamilyId.KOEBE)
    b3_err = max(min(p.distance(CirclePoint(w)) for p in res.maximizers) for w in (0.0, math.pi))
    b3_ok = len(res.maximizers) == 2 and b3_err <= 1e-6
    rng = np.random.default_rng(SEED + 6)
    stable, counts = 0, []
    for i in range(20):
        family = list(FamilyId)[i % 2]
        J = random_functional(rng, family)
        a = maximize_on_circle(J, family, 4096)
        b = maximize_on_circle(J, family, 8192)
        counts.append(len(a.maximizers))
        same = (len(a.maximizers) == len(b.maximizers) and not a.is_constant
                and all(p.distance(q) <= 1e-6 for p, q in zip(a.maximizers, b.maximizers)))
        stable += same
    ok = b3_ok and stable == 20 and all(1 <= c < math.inf for c in counts)
    report(6, "finite maximizer sets", ok,
           f"b3-only: {len(res.maximizers)} maximizers, max angle error {b3_err:.1e} rad; "
           f"random: {stable}/20 stable under doubling samples, counts {sorted(set(counts))}")


def test_criterion_7_univalence_obstruction(report):
    rng = np.random.default_rng(SEED + 7)
    grid = DiskGrid.default()
    order = probe_order(grid)
    start = time.perf_counter()
    found, poles_ok = 0, 0
    for _ in range(10):
        mu = _draw_measure(rng, 2)
        res = injectivity_probe(hull_member(mu, FamilyId.KOEBE, order), grid)
        found += not res.injective_on_grid
        poles = pole_set(mu)
        poles_ok += (len(poles) == 2 and all(k == 2 for _, k in poles) and
                     all(abs(z - pt.conjugate().x) < 1e-15 for (z, _), pt in zip(poles, mu.points)))
    elapsed = time.perf_counter() - start
    ok = found == 10 and poles_ok == 10 and elapsed < 30
    report(7, "univalence obstruction for two-atom members", ok,
           f"collisions found {found}/10, two double poles at conj atoms {poles_ok}/10, "
           f"runtime {elapsed:.1f} s (limit 30 s)")


def test_criterion_8_oracle_equivalence(report):
    rng = np.random.default_rng(SEED + 8)
    worst = 0.0
    for family in FamilyId:
        for _ in range(20):
            J = random_functional(rng, family)
            worst = max(worst, abs(maximize_on_circle(J, family).max_value - brute_force_max(J, family)))
    report(8, "maximizer agrees with a 1e5-point brute-force sweep", worst <= 1e-8,
           f"max deviation {worst:.2e} over 2 x 20 functionals (tol 1e-8)")


def test_criterion_9_hull_maximum_equals_family_maximum(report):
    rng = np.random.default_rng(SEED + 9)
    cases = [(second_coeff_functional(CirclePoint(t)), fam)
             for t, fam in zip(rng.uniform(0, 2 * math.pi, 4), list(FamilyId) * 2)]
    cases.append((FunctionalSpec.finite({3: 1}), FamilyId.KOEBE))
    above, on_gap, n_checks = 0.0, 0.0, 0
    for J, family in cases:
        res = maximize_on_circle(J, family)
        for _ in range(10):
            mu = _draw_measure(rng, int(rng.integers(1, 5)))
            val = evaluate_functional(J, hull_member(mu, family, 16))[0].real
            above = max(above, val - res.max_value)
            w = rng.dirichlet(np.ones(len(res.maximizers)))
            on = AtomicMeasure(tuple(zip(w, res.maximizers)))
            val_on = evaluate_functional(J, hull_member(on, family, 16))[0].real
            on_gap = max(on_gap, abs(val_on - res.max_value))
            n_checks += 1
    ok = above <= 1e-8 and on_gap <= 1e-8
    report(9, "hull values never exceed the family maximum", ok,
           f"{n_checks} random measures over {len(cases)} certified functionals: "
           f"max excess {max(above, 0):.2e}, max |value - max| on the maximizer set {on_gap:.2e} (tol 1e-8)")
