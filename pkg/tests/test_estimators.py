from __future__ import annotations

import math

import numpy as np
import pytest

from torrec.dimension import dim_3d_example, predicted_covering_exponent
from torrec.errors import BudgetExceeded, InsufficientSamples, ResolutionWarning
from torrec.estimators import (
    ENSampler,
    box_count,
    default_max_level,
    level_box_count,
    measure_scan,
    mu_n_ball,
    resolve_threads,
    sample_E_n,
    _ball_hits,
    torus_ball_area,
    union_box_count,
)
from torrec.geometry import contains_batch, in_E_n

from torrec.spectral import IntMatrix, count_H_n

from conftest import CAT, L_CAT


def _grid_occupancy(A, tau, n, j, fine):
    """Occupied 2^-j boxes from a dense grid of the whole torus."""
    t = (np.arange(fine) + 0.5) / fine
    X = np.stack(np.meshgrid(t, t, indexing="ij"), -1).reshape(-1, 2)
    inside = contains_batch(A, tau, n, X) == 1
    boxes = np.floor(X[inside] * 2**j).astype(np.int64)
    return len({tuple(b) for b in boxes})


@pytest.mark.parametrize("n, tau, j", [(2, 0.5, 5), (3, 0.4, 6), (2, 1.0, 7)])
def test_level_count_against_dense_grid(n, tau, j):
    want = _grid_occupancy(CAT, tau, n, j, 2048)
    got = level_box_count(CAT, tau, n, j, probe_ratio=6).count
    assert 0.93 * want <= got <= 1.02 * want


def test_level_count_is_monotone_in_probe_density():
    counts = [level_box_count(CAT, 0.5, 3, 6, probe_ratio=p).count for p in (2, 4, 8)]
    assert counts[0] <= counts[1] <= counts[2]


@pytest.mark.filterwarnings("ignore:fit quality")
def test_box_count_thread_independent():
    a = box_count(CAT, 2 * L_CAT, 2, 4, threads=1)
    b = box_count(CAT, 2 * L_CAT, 2, 4, threads=3)
    assert a == b


@pytest.mark.filterwarnings("ignore:fit quality")
def test_box_count_budget_and_window():
    with pytest.raises(BudgetExceeded):
        box_count(CAT, 2 * L_CAT, 3, 5, budget=100)
    with pytest.warns(ResolutionWarning):
        rep = box_count(CAT, 2 * L_CAT, 2, 4, j_max=12)
    assert rep.dropped and all(j > 12 for _, _, j in rep.dropped)


@pytest.mark.filterwarnings("ignore:fit quality")
def test_box_count_fit_window():
    rep = box_count(CAT, 2 * L_CAT, 2, 5, fit_levels=(3, 5))
    assert all(set(f.levels) <= {3, 4, 5} for f in rep.fits)


def test_union_count_against_dense_grid():
    coarse = union_box_count(CAT, 0.5, 2, 2, 3, 5, probes=3)
    fine = union_box_count(CAT, 0.5, 2, 2, 3, 5, probes=10)
    for j, c3, c10 in zip(fine.js, coarse.counts, fine.counts):
        want = _grid_occupancy(CAT, 0.5, 2, j, 1024)
        assert c3 <= c10 <= want
        assert c3 >= 0.85 * want and c10 >= 0.95 * want


def test_sampler_is_seeded_and_thread_independent():
    s = ENSampler(CAT, L_CAT, 6)
    a = s.sample(50_000, seed=11, threads=1)
    b = s.sample(50_000, seed=11, threads=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, s.sample(50_000, seed=12))


def test_samples_lie_in_E_n():
    X = sample_E_n(CAT, L_CAT, 5, 20_000, seed=3)
    assert np.all(in_E_n(CAT, L_CAT, 5, X) != 0)
    assert np.all(contains_batch(CAT, L_CAT, 5, X) == 1)


def test_samples_in_deep_level_are_members():
    # at depth the box test hits double resolution; ball membership does not
    X = sample_E_n(CAT, 2 * L_CAT, 12, 5_000, seed=4)
    assert np.all(contains_batch(CAT, 2 * L_CAT, 12, X) == 1)


def test_sampler_uniform_over_components():
    s = ENSampler(CAT, L_CAT, 4)
    X = s.sample(45_000, seed=0)
    # nearest periodic point for each sample; every component gets its share
    d = X[:, None, :] - s.centers[None, :, :]
    d -= np.floor(d + 0.5)
    idx = np.argmin(np.einsum("ijk,ijk->ij", d, d), axis=1)
    counts = np.bincount(idx, minlength=len(s.centers))
    assert counts.min() > 800 and counts.max() < 1200


def test_mu_n_ball_close_to_lebesgue():
    est = mu_n_ball(CAT, L_CAT, 10, (0.3, 0.7), 0.25, k=100_000, seed=1)
    assert abs(est.estimate - math.pi * 0.25**2) < 4 * est.stderr
    assert est.ratio == pytest.approx(1.0, abs=0.05)
    with pytest.raises(ValueError):
        mu_n_ball(CAT, L_CAT, 10, (0.3, 0.7), 0.25, k=10)


def test_torus_ball_area_monte_carlo():
    X = np.random.default_rng(0).random((400_000, 2))
    for r in (0.2, 0.55, 0.69):
        d = X - 0.5
        frac = np.mean(np.hypot(d[:, 0], d[:, 1]) < r)
        assert torus_ball_area(r) == pytest.approx(frac, abs=3e-3)
    assert torus_ball_area(0.8) == 1.0


def test_measure_scan_deterministic_and_fits():
    a = measure_scan(CAT, L_CAT, 8, centers=5, k=20_000, seed=2)
    b = measure_scan(CAT, L_CAT, 8, centers=5, k=20_000, seed=2, threads=2)
    assert a == b
    # at this depth mu_n looks like Lebesgue on these radii
    assert a.fitted_local_exponent == pytest.approx(2.0, abs=0.1)


def test_measure_scan_insufficient():
    with pytest.raises(InsufficientSamples):
        measure_scan(CAT, L_CAT, 6, centers=3, radii=[0.001, 0.002], k=2000, seed=0)


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv("TORREC_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    monkeypatch.delenv("TORREC_THREADS")
    assert resolve_threads(None) >= 1


BLOCK = IntMatrix.of([[3, 0, 0], [0, 2, 1], [0, 1, 1]])


def test_counts_grow_as_boxes_shrink():
    counts = [level_box_count(CAT, 1.0, 3, j).count for j in range(2, 10)]
    assert all(a <= b for a, b in zip(counts, counts[1:]))


@pytest.mark.filterwarnings("ignore:fit quality")
def test_box_slopes_track_covering_exponents():
    tau = 2 * L_CAT
    rep = box_count(CAT, tau, 3, 6)
    for fit in rep.fits:
        assert fit.slope == pytest.approx(predicted_covering_exponent(CAT, tau, fit.axis), abs=0.05)
    assert 0 <= rep.fitted_slope <= 2


@pytest.mark.filterwarnings("ignore:fit quality")
def test_box_count_three_dimensional():
    rep = box_count(BLOCK, 0.5, 2, 4)
    assert rep.fitted_slope == pytest.approx(dim_3d_example(3, L_CAT, 0.5).value, abs=0.25)


def test_default_level_budget():
    M = default_max_level(CAT, 3)
    assert sum(count_H_n(CAT, n) for n in range(3, M + 1)) <= 10**6
    assert sum(count_H_n(CAT, n) for n in range(3, M + 2)) > 10**6


def test_component_sample_mean_is_center():
    s = ENSampler(CAT, L_CAT, 3)
    X = s.sample(32_000, seed=5)
    c = s.centers[3]
    d = X - c
    d -= np.floor(d + 0.5)
    mine = d[np.hypot(d[:, 0], d[:, 1]) < 0.1]
    se = mine.std(axis=0, ddof=1) / math.sqrt(len(mine))
    assert len(mine) > 1000
    assert np.all(np.abs(mine.mean(axis=0)) < 3 * se)


def test_ball_extremes():
    est = mu_n_ball(CAT, L_CAT, 4, (0.1, 0.2), math.sqrt(0.5), k=2000)
    assert est.estimate == 1.0
    assert mu_n_ball(CAT, L_CAT, 4, (0.1, 0.2), 0.0, k=2000).estimate == 0.0


def test_stderr_scaling():
    a = mu_n_ball(CAT, L_CAT, 8, (0.5, 0.5), 0.2, k=25_000, seed=3)
    b = mu_n_ball(CAT, L_CAT, 8, (0.5, 0.5), 0.2, k=100_000, seed=4)
    # four times the samples halves the standard error
    assert a.stderr / b.stderr == pytest.approx(2.0, rel=0.05)
    assert abs(a.estimate - b.estimate) < 3 * math.hypot(a.stderr, b.stderr)


def test_ratios_bounded_at_depth():
    centers = np.random.default_rng(15).random((50, 2))
    rep = measure_scan(CAT, 2 * L_CAT, 12, centers, radii=[0.15, 0.3], k=100_000, seed=15)
    ratios = [b.ratio for b in rep.balls if b.radius == 0.15]
    assert max(ratios) / min(ratios) <= 10


def test_single_radius_refused():
    with pytest.raises(InsufficientSamples):
        measure_scan(CAT, L_CAT, 6, centers=3, radii=[0.2], k=5000, seed=0)
