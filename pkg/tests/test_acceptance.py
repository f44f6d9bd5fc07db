"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

from __future__ import annotations

import math
import time

import mpmath as mp
import numpy as np
import pytest

from torrec.dimension import (
    dim_2d,
    dim_3d_example,
    generic_upper_bound,
    hausdorff_partial_sum,
    covering_exponent,
)
from torrec.equidist import badly_approximable_constant, star_discrepancy
from torrec.estimators import box_count, measure_scan
from torrec.geometry import component_geometry
from torrec.periodic import brute_force_periodic, count_in_balls, enumerate_periodic
from torrec.spectral import IntMatrix, count_H_n, matrix_power, validate_hyperbolic

from conftest import ACCEPTANCE_MATRICES, CAT, L_CAT


@pytest.fixture
def verdict(capsys, request):
    def emit(ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {request.node.name}: {detail}")
        assert ok, detail

    return emit


def test_ac01_periodic_point_law(verdict):
    t0 = time.perf_counter()
    frozen = [1, 5, 16, 45, 121, 320, 841, 2205]
    got, ok = [], True
    for n in range(1, 9):
        fast = enumerate_periodic(CAT, n)
        slow = brute_force_periodic(CAT, n)
        trace_form = matrix_power(CAT, n).trace - 2
        ok &= fast.count == slow.count == count_H_n(CAT, n) == trace_form == frozen[n - 1]
        ok &= set(fast.points()) == set(slow.points())
        got.append(fast.count)
    dt = time.perf_counter() - t0
    ok &= dt < 60
    verdict(ok, f"counts {got} (expected {frozen}), point sets equal, {dt:.1f} s")


def test_ac02_closed_form(verdict):
    tie = dim_2d(L_CAT, L_CAT).value
    half = dim_2d(L_CAT, 2 * L_CAT).value
    rng = np.random.default_rng(2024)
    worst = 0.0
    for L, tau in zip(rng.uniform(0.01, 5, 1000), rng.uniform(0.01, 10, 1000)):
        worst = max(worst, abs(dim_2d(L, tau).value - generic_upper_bound((0.0, L), tau).value))
    ok = abs(tie - 1) <= 1e-12 and abs(half - 0.5) <= 1e-12 and worst <= 1e-12
    verdict(ok, f"tau=L -> {tie!r}, tau=2L -> {half!r}, max |dim_2d - generic| over 1000 draws = {worst:.2e}")


def test_ac03_box_counting(verdict):
    results, ok = [], True
    for tau, target, tol in ((2 * L_CAT, 0.5, 0.15), (L_CAT / 2, 4 / 3, 0.2)):
        t0 = time.perf_counter()
        rep = box_count(CAT, tau, 3, 8)
        dt = time.perf_counter() - t0
        good = abs(rep.fitted_slope - target) <= tol and rep.r_squared >= 0.98 and dt < 600
        ok &= good
        results.append(
            f"tau={tau:.4f}: slope {rep.fitted_slope:.4f} vs {target:.4f}±{tol} "
            f"(axis {rep.best_axis}, R2 {rep.r_squared:.4f}, {dt:.0f} s)"
        )
    verdict(ok, "; ".join(results))


def test_ac04_periodic_points_equidistribute(verdict):
    r = 0.2
    rng = np.random.default_rng(4)
    lines, ok = [], True
    levels = [n for n in range(1, 20) if 10**3 <= count_H_n(CAT, n) <= 10**5]
    for n in levels:
        pts = enumerate_periodic(CAT, n)
        counts = count_in_balls(pts, rng.random((100, 2)), r)
        ratios = counts / (math.pi * r * r * pts.count)
        lo, hi = ratios.min(), ratios.max()
        ok &= hi / lo <= 10 and lo <= 1 <= hi
        lines.append(f"n={n} [{lo:.4f}, {hi:.4f}]")
    ok &= len(levels) > 0
    verdict(ok, "ratio spreads " + ", ".join(lines))


def test_ac05_measure_hypotheses(verdict):
    tau, n = 2 * L_CAT, 12
    s0 = dim_2d(L_CAT, tau).value
    centers = np.random.default_rng(5).random((50, 2))
    rep = measure_scan(CAT, tau, n, centers, radii=[0.025, 0.05, 0.1, 0.2, 0.4], k=200_000, seed=5)
    ratios = np.array([b.ratio for b in rep.balls if b.radius >= 0.1])
    ok = len(ratios) == 150 and ratios.min() >= 0.1 and ratios.max() <= 10
    ok &= rep.fitted_local_exponent >= s0 - 0.2
    verdict(
        ok,
        f"mu_n(B)/mu(B) in [{ratios.min():.3f}, {ratios.max():.3f}] over {len(ratios)} balls with r >= 0.1; "
        f"local exponent {rep.fitted_local_exponent:.4f} >= s0 - 0.2 = {s0 - 0.2:.4f}",
    )


def test_ac06_covering_exponents(verdict):
    lines, ok = [], True
    for tau in (L_CAT / 2, 2 * L_CAT):
        major = covering_exponent(CAT, tau, "major", 10, 30).exponent
        minor = covering_exponent(CAT, tau, "minor", 10, 30).exponent
        want_major, want_minor = L_CAT / tau, 2 * L_CAT / (tau + L_CAT)
        ok &= abs(major - want_major) <= 0.05 and abs(minor - want_minor) <= 0.05
        lines.append(f"tau={tau:.4f}: major {major:.4f}/{want_major:.4f}, minor {minor:.4f}/{want_minor:.4f}")
    verdict(ok, "; ".join(lines))


def test_ac07_diophantine(verdict):
    gamma = validate_hyperbolic(CAT).gamma
    c8 = badly_approximable_constant(gamma, 10**8)
    c10 = badly_approximable_constant(gamma, 10**10)
    stable = abs(c8 - c10) <= 1e-9 * abs(c10)
    worst = 0.0
    for k in range(3, 7):
        N = 10**k
        worst = max(worst, N * star_discrepancy(gamma, N) / math.log(N))
    ok = stable and worst <= 3
    verdict(ok, f"c*(1e8) = {c8:.12f}, c*(1e10) = {c10:.12f}; max N D*_N / log N = {worst:.4f}")


def test_ac08_three_dimensional_example(verdict):
    lam = (3 + math.sqrt(5)) / 2
    l = math.log(lam)
    taus = np.linspace(0.1, 4.0, 8001)[1:]  # 20^3 points of (0.1, 4]
    worst = -math.inf
    for m in (2, 3, 5):
        ells = sorted((0.0, l, math.log(m)))
        for tau in taus:
            worst = max(worst, dim_3d_example(m, l, tau).value - generic_upper_bound(ells, tau).value)
    mp.mp.dps = 30
    L, lm, t = mp.log((3 + mp.sqrt(5)) / 2), mp.log(3), mp.mpf(1)
    oracle = min(
        (t + 3 * L) / (t + L), 3 * lm / (t + lm), (2 * L + lm) / (t + L), (L + lm) / t, (t + L) / t
    )
    val = dim_3d_example(3, l, 1.0).value
    ok = worst <= 1e-12 and abs(val - 1.5407) < 5e-5 and abs(val - float(oracle)) < 1e-13
    verdict(ok, f"max(dim3d - bound) = {worst:.3e} on 3 x 8000 grid; (m=3, tau=1) -> {val:.10f}, oracle {float(oracle):.10f}")


def test_ac09_geometry_sandwich(verdict):
    rng = np.random.default_rng(9)
    k = 10_000
    violations, checked = 0, 0
    for tau in (L_CAT / 2, L_CAT, 2 * L_CAT):
        for n in range(4, 11):
            comp = component_geometry(CAT, tau, n, (0, 0))
            M = matrix_power(CAT, n).to_float() - np.eye(2)
            r = comp.radius
            # E inside the ellipse: |(A^n - I) v| < r for offsets v of E
            inner = np.concatenate(
                [comp.sample_boundary("inscribed", k // 2, rng), _interior(comp, k - k // 2, rng)]
            )
            y = inner @ M.T
            violations += int(np.count_nonzero(np.hypot(y[:, 0], y[:, 1]) > r * (1 + 1e-9)))
            # the ellipse inside E~: preimages of the circle of radius r
            t = rng.uniform(0, 2 * math.pi, k)
            circle = r * np.column_stack([np.cos(t), np.sin(t)])
            v = np.linalg.solve(M, circle.T).T
            violations += int(np.count_nonzero(comp.box_form(v, comp.c1) > 1 + 1e-6))
            checked += 2 * k
    verdict(violations == 0, f"{violations} violations in {checked} samples over n=4..10, tau in {{L/2, L, 2L}}")


def _interior(comp, k, rng):
    ab = rng.uniform(-0.5, 0.5, (k, 2)) * np.array([comp.semi_axis_major, comp.semi_axis_minor])
    return ab @ comp.frame.T


def test_ac10_partial_sums(verdict):
    lines, ok = [], True
    for rows in ACCEPTANCE_MATRICES:
        A = IntMatrix.of(rows)
        L = validate_hyperbolic(A).log_abs_lambda2
        for tau in (L / 2, L, 2 * L):
            s0 = dim_2d(L, tau).value
            up = hausdorff_partial_sum(A, tau, s0 + 0.1, 10, 40).classification
            down = hausdorff_partial_sum(A, tau, s0 - 0.1, 10, 40).classification
            good = up == "ShrinkingTail" and down == "GrowingTerms"
            ok &= good
            if not good:
                lines.append(f"{rows} tau={tau:.3f}: {up}/{down}")
    verdict(ok, "12 (matrix, tau) cases classified correctly" if ok else "; ".join(lines))
