import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schlicht import series as ps
from schlicht.classes import (HOLDS, VIOLATED, DiskGrid, alexander_check, g_coefficient_report,
                              g_coefficient_violations, halfplane_field, injectivity_probe,
                              local_univalence_check, membership_ctc, membership_halfplane,
                              membership_u, nonvanishing_check, u_defect)
from schlicht.errors import DegenerateSeriesError
from schlicht.families import (AtomicMeasure, FamilyId, g_extreme_series, hull_function,
                               hull_member, koebe_series)
from schlicht.support import membership_order, probe_order

Z = ps.TaylorSeries.identity(128)


def poly(*coeffs, order=128):
    """Series with a_1 = 1 followed by the given a_2, a_3, ..."""
    return ps.TaylorSeries.from_coeffs([0, 1, *coeffs], order)


def brute_min(values):
    return float(np.min(values))


class TestDiskGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            DiskGrid((0.5, 0.3), 64)
        with pytest.raises(ValueError):
            DiskGrid((0.5, 1.0), 64)
        with pytest.raises(ValueError):
            DiskGrid((0.5,), 4)

    def test_default(self):
        g = DiskGrid.default()
        assert g.shape == (32, 256)
        assert g.r_max == pytest.approx(0.99)
        assert g.radii[0] == pytest.approx(0.1)

    def test_refine_is_superset(self, small_grid):
        fine = small_grid.refine()
        coarse = set(np.round(small_grid.points().ravel(), 12))
        assert coarse <= set(np.round(fine.points().ravel(), 12))
        assert fine.angles == 2 * small_grid.angles

    def test_round_trip(self, small_grid):
        assert DiskGrid.from_dict(small_grid.to_dict()) == small_grid


class TestUDefect:
    def test_identity(self):
        assert abs(u_defect(Z, 0.7 + 0.2j)) < 1e-15

    def test_koebe_value(self):
        assert u_defect(koebe_series(0.0), 0.5) == pytest.approx(-0.25, abs=1e-12)

    @settings(max_examples=25)
    @given(st.floats(0, 2 * math.pi, exclude_max=True), st.floats(0, 0.9), st.floats(0, 2 * math.pi))
    def test_koebe_closed_form(self, t, r, phi):
        # for z/(1-xz)^2 the defect is exactly -x^2 z^2
        x, z = complex(math.cos(t), math.sin(t)), r * complex(math.cos(phi), math.sin(phi))
        # rounding in a_n ~ n eps is amplified like sum n^2 r^n by the series quotient
        noise = 500 * np.finfo(float).eps * r * (1 + r) / (1 - r) ** 3
        assert u_defect(koebe_series(t), z) == pytest.approx(-(x * z) ** 2, abs=noise + 1e-15)

    def test_degenerate(self):
        with pytest.raises(DegenerateSeriesError):
            u_defect(ps.TaylorSeries.from_coeffs([0, 0, 1], 16), 0.1)


class TestMembershipU:
    def test_koebe_margin(self, default_grid):
        v = membership_u(koebe_series(0.0), 1.0, default_grid)
        assert v.verdict == HOLDS
        assert v.margin == pytest.approx(1 - 0.99**2, abs=1e-6)

    def test_identity_half(self, default_grid):
        v = membership_u(Z, 0.5, default_grid)
        assert v.verdict == HOLDS and v.margin == pytest.approx(0.5, abs=1e-12)

    def test_quartic_violates(self, small_grid):
        f = poly(0, 0, 0.4)
        v = membership_u(f, 1.0, small_grid)
        # closed form: f'(z) (z/f)^2 - 1 with f = z + 0.4 z^4
        pts = small_grid.points()
        w = pts**3
        oracle = np.max(np.abs((1 + 1.6 * w) / (1 + 0.4 * w) ** 2 - 1))
        assert v.verdict == VIOLATED
        assert v.margin == pytest.approx(1 - oracle, rel=1e-9)

    def test_lambda_range(self):
        with pytest.raises(ValueError):
            membership_u(Z, 1.5)


class TestHalfplane:
    def test_identity_fields(self):
        for kind in ("starlike", "convex_shift"):
            assert halfplane_field(Z, kind, 0.3 - 0.4j) == pytest.approx(1)

    @pytest.mark.parametrize("r", [0.1, 0.5, 0.8])
    def test_g_extreme_field_on_axis(self, r):
        assert halfplane_field(g_extreme_series(0.0, 512), "convex_shift", r) == \
            pytest.approx(1 + 3 * r / (1 - r), rel=1e-10)

    def test_g_extreme_field_negative_axis(self):
        val = halfplane_field(g_extreme_series(0.0, 512), "convex_shift", -0.9)
        assert val.real == pytest.approx(1 - 2.7 / 1.9, abs=1e-9)
        assert val.real == pytest.approx(-0.42105, abs=1e-5)

    def test_g_extreme_margin(self, default_grid):
        order = membership_order(FamilyId.G, default_grid)
        v = membership_halfplane(g_extreme_series(0.0, order), "convex_shift", -0.5, default_grid)
        assert v.verdict == HOLDS
        assert v.margin == pytest.approx(1 - 2.97 / 1.99 + 0.5, abs=1e-6)
        assert v.margin == pytest.approx(0.00754, abs=5e-6)
        assert v.witness == pytest.approx(-0.99, abs=1e-9)

    def test_identity_starlike(self, default_grid):
        v = membership_halfplane(Z, "starlike", 0.0, default_grid)
        assert v.margin == pytest.approx(1.0)

    def test_koebe_fails_g_threshold(self, default_grid):
        # 1 + z k''/k' = (1 + 4w + w^2)/(1 - w^2) with w = xz is unbounded below
        order = membership_order(FamilyId.G, default_grid)
        v = membership_halfplane(koebe_series(0.0, order), "convex_shift", -0.5, default_grid)
        w = default_grid.points()
        oracle = brute_min(((1 + 4 * w + w * w) / (1 - w * w)).real) + 0.5
        assert v.verdict == VIOLATED
        assert v.margin == pytest.approx(oracle, rel=1e-6)

    def test_koebe_starlike(self, default_grid):
        k = koebe_series(1.0, probe_order(default_grid))
        v = membership_halfplane(k, "starlike", 0.0, default_grid)
        assert v.holds
        assert v.margin == pytest.approx(0.01 / 1.99, abs=1e-6)

    def test_convex_denominator(self, small_grid):
        # f' = 1 + 2z vanishes at -1/2 only approximately on the grid; force a grid hit
        grid = DiskGrid((0.25, 0.5), 8)
        with pytest.raises(DegenerateSeriesError):
            membership_halfplane(poly(1.0, order=16), "convex_shift", 0.0, grid)


class TestCtc:
    def test_identity_rotated(self, small_grid):
        v = membership_ctc(Z, Z, 1.4, small_grid)
        assert v.margin == pytest.approx(math.cos(1.4), abs=1e-12)
        assert not v.conditional

    def test_koebe_self(self, default_grid):
        k = koebe_series(0.0, probe_order(default_grid))
        v = membership_ctc(k, k, 0.0, default_grid)
        assert v.holds and v.margin == pytest.approx(0.01 / 1.99, abs=1e-6)

    def test_conditional_reference(self, small_grid):
        g = poly(1.0)  # z + z^2 is not starlike: z g'/g = (1+2z)/(1+z)
        v = membership_ctc(Z, g, 0.0, small_grid)
        assert v.conditional
        assert v.to_dict()["conditional"] is True

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            membership_ctc(Z, Z, 2.0)


class TestAlexander:
    def test_examples(self, small_grid):
        assert alexander_check(Z, small_grid)
        convex = ps.TaylorSeries.from_coeffs([0] + [1] * 128, 128)  # z/(1-z)
        assert alexander_check(convex, small_grid)
        assert alexander_check(koebe_series(0.0), small_grid)

    def test_random_perturbations(self, rng, small_grid):
        for _ in range(50):
            c = np.zeros(8, complex)
            c[1] = 1
            c[2:] = (rng.normal(size=6) + 1j * rng.normal(size=6)) * rng.uniform(0.01, 0.3) \
                / np.arange(2, 8) ** 2
            assert alexander_check(ps.TaylorSeries(c), small_grid)


class TestZeros:
    def test_truncation_is_visible(self, default_grid):
        # a low order cannot resolve the boundary pole; the reported tail says so
        v = nonvanishing_check(koebe_series(0.3, 128), default_grid)
        assert v.tail_bound > 1.0

    def test_koebe_nonvanishing(self, default_grid):
        v = nonvanishing_check(koebe_series(0.3, probe_order(default_grid)), default_grid)
        assert v.holds
        x = np.exp(0.3j)
        oracle = brute_min(np.abs(1 / (1 - x * default_grid.points()) ** 2))
        assert v.margin == pytest.approx(oracle - 1e-6, abs=1e-9)
        assert v.margin >= 1 / 1.99**2 - 1e-6 - 1e-12

    def test_identity(self, default_grid):
        assert nonvanishing_check(Z, default_grid).margin == pytest.approx(1 - 1e-6)

    def test_interior_zero(self, default_grid):
        v = nonvanishing_check(poly(-2.0), default_grid)
        assert v.verdict == VIOLATED
        assert abs(v.witness - 0.5) < 1e-6

    def test_zero_between_grid_points(self):
        # zero at 0.37 e^{0.05 i}, far from every node of a coarse grid
        z0 = 0.37 * np.exp(0.05j)
        f = poly(-1 / z0, order=16)
        grid = DiskGrid((0.2, 0.5, 0.9), 16)
        v = nonvanishing_check(f, grid)
        assert v.verdict == VIOLATED
        assert abs(v.witness - z0) < 1e-9

    def test_local_univalence(self, default_grid):
        order = probe_order(default_grid)
        assert local_univalence_check(koebe_series(0.0, order), default_grid).holds
        mu = AtomicMeasure(((0.5, 0.0), (0.5, math.pi)))
        v = local_univalence_check(hull_member(mu, FamilyId.KOEBE, order), default_grid)
        assert v.verdict == VIOLATED
        assert abs(abs(v.witness) - (math.sqrt(2) - 1)) < 1e-6
        assert abs(v.witness.real) < 1e-6


@pytest.mark.parametrize("make", [
    lambda o: koebe_series(0.4, o),
    lambda o: g_extreme_series(1.1, o),
    lambda o: poly(0.3, -0.2j, 0.05, order=o),
])
def test_margin_monotone_under_refinement(make, small_grid):
    f = make(512)
    fine = small_grid.refine()
    for check in (lambda g: membership_u(f, 1.0, g),
                  lambda g: membership_halfplane(f, "convex_shift", -0.5, g),
                  lambda g: membership_halfplane(f, "starlike", 0.0, g),
                  lambda g: nonvanishing_check(f, g)):
        assert check(fine).margin <= check(small_grid).margin + 1e-12


class TestCoefficientReport:
    def test_g_extreme_equality(self):
        rows = g_coefficient_report(g_extreme_series(0.9, 64))
        assert all(r.slack == 0 for r in rows)
        assert not g_coefficient_violations(g_extreme_series(0.9, 64))

    def test_identity(self):
        rows = g_coefficient_report(ps.TaylorSeries.identity(8))
        assert [r.slack for r in rows] == [(n + 1) / 2 for n in range(2, 9)]

    def test_koebe(self):
        assert g_coefficient_violations(koebe_series(0.0, 16)) == list(range(2, 17))


def _closed_form_collision(mu):
    """Independent oracle: solve F(z) = F(z1) exactly as a polynomial equation in z.

    For a two-atom Koebe combination, clearing denominators gives a quartic whose
    roots other than z1 are the other preimages."""
    (l1, p1), (l2, p2) = mu.atoms
    x1, x2 = p1.x, p2.x
    P = np.polynomial.Polynomial
    z = P([0, 1])
    d1, d2 = (1 - x1 * z) ** 2, (1 - x2 * z) ** 2
    num = l1 * z * d2 + l2 * z * d1
    return num, d1 * d2


class TestInjectivity:
    def test_identity(self, small_grid):
        assert injectivity_probe(Z, small_grid).injective_on_grid

    def test_opposite_pair_collision(self):
        mu = AtomicMeasure(((0.5, math.pi / 2), (0.5, 3 * math.pi / 2)))
        grid = DiskGrid.geometric(64, 256, r_max=0.99)
        f = hull_member(mu, FamilyId.KOEBE, probe_order(grid))
        res = injectivity_probe(f, grid)
        assert not res.injective_on_grid
        z1, z2 = res.collision
        w1 = hull_function(mu, "koebe", z1)
        assert abs(w1 - hull_function(mu, "koebe", z2)) < 1e-6 * max(1, abs(w1))
        assert abs(z1 - z2) > 1e-3
        # z2 must be one of the roots of the quartic N(z) - w1 D(z)
        num, den = _closed_form_collision(mu)
        roots = (num - w1 * den).roots()
        assert np.min(np.abs(roots - z2)) < 1e-6

    def test_random_pairs_against_polynomial_oracle(self, rng, default_grid):
        order = probe_order(default_grid)
        for _ in range(2):
            lam = rng.uniform(0.2, 0.8)
            a, b = rng.uniform(0, 2 * math.pi, 2)
            mu = AtomicMeasure(((lam, a), (1 - lam, b)))
            res = injectivity_probe(hull_member(mu, FamilyId.KOEBE, order), default_grid)
            assert not res.injective_on_grid
            z1, z2 = res.collision
            num, den = _closed_form_collision(mu)
            w1 = num(z1) / den(z1)
            roots = (num - w1 * den).roots()
            assert np.min(np.abs(roots - z2)) < 1e-6
            assert np.min(np.abs(roots - z1)) < 1e-6

    @pytest.mark.slow
    def test_koebe_injective(self, default_grid):
        f = koebe_series(0.0, probe_order(default_grid))
        res = injectivity_probe(f, default_grid)
        assert res.injective_on_grid
        assert res.to_dict()["result"] == "injective_on_grid"
