from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torrec.errors import OddPowerWithNegativeEigenvalue
from torrec.geometry import (
    area_ratio,
    circumscribed_overlap_threshold,
    component_geometry,
    components_disjoint,
    contains,
    contains_batch,
    convex_polygons_overlap,
    ellipses_disjoint,
    in_E_n,
    measure_E_n,
    min_disjoint_n,
    regime,
    separation_constant,
    separation_profile,
    torus_distance,
)
from torrec.periodic import enumerate_periodic
from torrec.spectral import IntMatrix, validate_hyperbolic

from conftest import ACCEPTANCE_MATRICES, CAT, L_CAT


def test_torus_distance():
    assert torus_distance([0.05, 0.5], [0.95, 0.5]) == pytest.approx(0.1)
    assert torus_distance([0.0, 0.0], [0.5, 0.5]) == pytest.approx(math.sqrt(0.5))


def test_min_disjoint_n():
    assert min_disjoint_n(2 * L_CAT) == 1
    assert min_disjoint_n(0.1) == 7  # e^{-0.7} < 1/2 < e^{-0.6}
    for tau in (0.05, 0.3, 0.69, 0.7, 1.5):
        n = min_disjoint_n(tau)
        assert math.exp(-n * tau) < 0.5 and (n == 1 or math.exp(-(n - 1) * tau) >= 0.5)


def test_periodic_points_are_members(cat):
    for p in enumerate_periodic(cat, 5).points():
        assert contains(cat, 1.0, 5, p) is True


def test_contains_batch_agrees_with_exact(cat):
    tau, n = L_CAT, 6
    comp = component_geometry(cat, tau, n, (Fraction(1, 4), Fraction(1, 4)))
    rng = np.random.default_rng(7)
    X = (comp.sample_boundary("circumscribed", 400, rng) + rng.normal(0, 1e-6, (400, 2))) % 1.0
    codes = contains_batch(cat, tau, n, X)
    for x, code in zip(X, codes):
        want = contains(cat, tau, n, [Fraction(float(v)) for v in x])
        assert code == (2 if want is None else int(want))


def test_component_axes(cat):
    comp = component_geometry(cat, 1.0, 4)
    e = math.exp(-4.0)
    lam2 = (3 + math.sqrt(5)) / 2
    assert comp.semi_axis_major == pytest.approx(e / (1 - lam2**-4))
    assert comp.semi_axis_minor == pytest.approx(e / (lam2**4 - 1))
    Af = cat.to_float()
    assert np.allclose(Af @ comp.axis_unstable, lam2 * comp.axis_unstable)
    assert np.allclose(Af @ comp.axis_stable, comp.axis_stable / lam2)


@pytest.mark.parametrize("rows", ACCEPTANCE_MATRICES)
@pytest.mark.parametrize("n", [2, 4, 6])
def test_sandwich_and_vertices(rows, n):
    A = IntMatrix.of(rows)
    L = math.log(max(abs(v) for v in np.linalg.eigvals(A.to_float())))
    comp = component_geometry(A, L, n)
    rng = np.random.default_rng(n)
    assert np.all(comp.ellipse_form(comp.sample_boundary("inscribed", 2000, rng)) <= 1 + 1e-9)
    assert np.all(comp.box_form(comp.sample_boundary("ellipse", 2000, rng), comp.c1) <= 1 + 1e-9)
    # inscribed vertices lie on or inside the ellipse, circumscribed vertices outside it
    assert np.all(comp.ellipse_form(comp.inscribed) <= 1 + 1e-9)
    assert np.all(comp.ellipse_form(comp.circumscribed) >= 1 - 1e-9)


def test_odd_power_with_negative_eigenvalue():
    A = IntMatrix.of([[2, 1], [1, 0]])
    with pytest.raises(OddPowerWithNegativeEigenvalue):
        component_geometry(A, 1.0, 3)
    component_geometry(A, 1.0, 4)


def test_area_ratio_symmetric_is_quarter():
    for rows in ACCEPTANCE_MATRICES:
        assert area_ratio(IntMatrix.of(rows)) == pytest.approx(0.25)
    # non-symmetric: c1 > 1
    assert area_ratio(IntMatrix.of([[3, 2], [1, 1]])) < 0.25


def test_area_ratio_by_shoelace():
    A = IntMatrix.of([[3, 2], [1, 1]])
    comp = component_geometry(A, 1.0, 2)

    def area(P):
        x, y = P[:, 0], P[:, 1]
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    assert area(comp.inscribed) / area(comp.circumscribed) == pytest.approx(area_ratio(A), rel=1e-9)


def test_measure_E_n_monte_carlo(cat):
    tau, n = 0.3, 3
    X = np.random.default_rng(1).random((200_000, 2))
    frac = np.mean(in_E_n(cat, tau, n, X) == 1)
    want = measure_E_n(cat, tau, n)
    se = math.sqrt(want * (1 - want) / len(X))
    assert abs(frac - want) < 5 * se


def test_disjointness_thresholds(cat):
    thr = circumscribed_overlap_threshold(cat)
    assert thr == pytest.approx(0.42532540417601994, rel=1e-9)
    n = 3
    tau_hi = -math.log(0.9 * thr) / n
    tau_lo = -math.log(1.1 * thr) / n
    assert components_disjoint(cat, tau_hi, n)
    assert not components_disjoint(cat, tau_lo, n)
    assert ellipses_disjoint(tau_lo, n)
    assert not ellipses_disjoint(math.log(2) / n - 0.01, n)


def test_circumscribed_overlap_is_geometric(cat):
    # brute-force polygon test against the closed-form threshold
    thr = circumscribed_overlap_threshold(cat)
    n = 2
    pts = enumerate_periodic(cat, n).points()
    for factor, expect in ((0.95, False), (1.05, True)):
        tau = -math.log(factor * thr) / n
        polys = [component_geometry(cat, tau, n, p).circumscribed for p in pts]
        shifts = [np.array([i, j]) for i in (-1, 0, 1) for j in (-1, 0, 1)]
        hit = any(
            convex_polygons_overlap(polys[a], polys[b] + s)
            for a in range(len(polys))
            for b in range(len(polys))
            for s in shifts
            if a != b or s.any()
        )
        assert hit == expect


def test_regimes_and_separation(cat):
    assert regime(cat, L_CAT) == "Case1"
    assert regime(cat, L_CAT / 4) == "Case2"
    assert regime(cat, L_CAT / 2) == "Case3"
    c2 = separation_constant(cat)
    # c* = 1 - gamma for the golden slope, attained at q = 1
    gamma = (math.sqrt(5) - 1) / 2
    assert c2 == pytest.approx((1 - gamma) / (4 * math.sqrt(1 + gamma**2)), rel=1e-12)
    p1 = separation_profile(cat, L_CAT, 6)
    e2 = ((3 + math.sqrt(5)) / 2) ** 6 - 1
    assert p1.gap_unstable == pytest.approx(2 / math.sqrt(e2))
    p2 = separation_profile(cat, L_CAT / 4, 6)
    assert p2.c3 == pytest.approx(c2 / 2)
    assert p2.gap_unstable == pytest.approx(2 * p2.c3 * math.exp(6 * L_CAT / 4) / e2)


@given(st.integers(2, 8), st.floats(0.2, 3.0))
def test_component_is_inside_circumscribed_cell(n, tau):
    comp = component_geometry(CAT, tau, n)
    X = comp.sample_boundary("ellipse", 200, np.random.default_rng(n))
    assert np.all(comp.box_form(X, comp.c1) <= 1 + 1e-9)
    assert np.all(comp.ellipse_form(X) == pytest.approx(1.0, rel=1e-6))


@pytest.mark.parametrize("n, tau", [(4, L_CAT / 2), (6, L_CAT), (8, 2 * L_CAT)])
def test_membership_matches_geometry(n, tau):
    rng = np.random.default_rng(n)
    p = enumerate_periodic(CAT, n).points()[5]
    comp = component_geometry(CAT, tau, n, p)
    c = comp.center_float
    # inside E: members
    ab = rng.uniform(-0.499, 0.499, (2000, 2)) * np.array([comp.semi_axis_major, comp.semi_axis_minor])
    X = (c + ab @ comp.frame.T) % 1.0
    assert np.all(contains_batch(CAT, tau, n, X) == 1)
    # outside E~ but within three diameters: not members
    ab = rng.uniform(-3, 3, (20000, 2)) * np.array([comp.semi_axis_major, comp.semi_axis_minor]) * comp.c1
    outside = np.max(np.abs(ab) / (comp.c1 * np.array([comp.semi_axis_major, comp.semi_axis_minor])), axis=1) > 1.001
    X = (c + ab[outside] @ comp.frame.T) % 1.0
    assert np.all(contains_batch(CAT, tau, n, X) == 0)


def test_measure_prefactor():
    sd = validate_hyperbolic(CAT)
    g, b = (float(sd.gamma), float(sd.beta))
    pref = abs(g - b) / math.sqrt((1 + b * b) * (1 + g * g))
    assert measure_E_n(CAT, 1.0, 3) == pytest.approx(pref * math.exp(-6.0), rel=1e-12)
