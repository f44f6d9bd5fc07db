"""Desk-scale estimators: box counting of the level sets and Monte-Carlo measures.

Box counting is scale-matched. For every level ``n`` and every eigen-axis
``k`` the dyadic scale ``2^-j`` closest to the component semi-axis along
``k`` is chosen, the occupied boxes of ``R_n`` at that scale are counted by
probing membership, and ``log count`` is regressed on ``j log 2`` across the
levels. Each axis gives a covering exponent; the reported slope is the
smallest, mirroring the infimum over coverings.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, InsufficientSamples, ResolutionWarning
from .geometry import DEFAULT_GUARD, min_disjoint_n
from .periodic import torus_delta
from .periodic import enumerate_periodic
from .spectral import IntMatrix, eigen_frame, matrix_power

DEFAULT_PROBE_BUDGET = 2 * 10**9
CHUNK = 1 << 14


def resolve_threads(threads: int | None = None) -> int:
    """``threads`` if given, else ``$TORREC_THREADS``, else 1."""
    if threads is None:
        threads = int(os.environ.get("TORREC_THREADS", "1") or 1)
    return max(1, int(threads))


def _level_oracle(A: IntMatrix, n: int) -> np.ndarray:
    return _kernels.to_limbs((matrix_power(A, n) - IntMatrix.identity(A.dim)).rows)


# ---------------------------------------------------------------------------
# box counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelCount:
    """Occupied boxes of ``R_n`` at scale ``2^-j`` matched to one eigen-axis."""

    n: int
    axis: str
    j: int
    count: int
    probes: int
    uncertain: int


@dataclass(frozen=True)
class AxisFit:
    axis: str
    slope: float
    intercept: float
    r_squared: float
    levels: tuple[int, ...]


@dataclass(frozen=True)
class BoxCountReport:
    """Scale-matched box counts and per-axis least-squares fits.

    ``fitted_slope`` is the smallest per-axis slope and ``r_squared`` the
    fit quality of that axis.
    """

    n_range: tuple[int, int]
    j_window: tuple[int, int]
    rows: tuple[LevelCount, ...]
    fits: tuple[AxisFit, ...]
    fitted_slope: float
    best_axis: str
    r_squared: float
    dropped: tuple[tuple[int, str, int], ...] = field(default=())

    @property
    def scales(self) -> list[float]:
        return [2.0 ** -r.j for r in self.rows]

    @property
    def counts(self) -> list[int]:
        return [r.count for r in self.rows]


def _unique_rows(boxes: np.ndarray) -> int:
    if len(boxes) == 0:
        return 0
    order = np.lexsort(boxes.T[::-1])
    b = boxes[order]
    return int(1 + np.count_nonzero(np.any(b[1:] != b[:-1], axis=1)))


def level_box_count(
    A: IntMatrix,
    tau: float,
    n: int,
    j: int,
    axis: str | None = None,
    probe_ratio: int = 3,
    threads: int | None = None,
    centers: np.ndarray | None = None,
    guard: float = DEFAULT_GUARD,
) -> LevelCount:
    """Occupied ``2^-j`` boxes of ``R_n``.

    Probes lie on a lattice aligned with the eigen-frame, spaced
    ``2^-j / probe_ratio`` (or half the semi-axis, whichever is smaller),
    filling the circumscribed parallelepiped around each periodic point.
    """
    frame = eigen_frame(A)
    semi = frame.semi_sizes(tau, n)
    extent = semi * frame.dual_row_norms()
    delta = 2.0**-j
    step = np.minimum(delta / probe_ratio, semi / 2.0)
    if np.any(extent / delta + 2 >= _kernels.REL_BIAS):
        raise BudgetExceeded(f"component spans more than 2^20 boxes at j = {j}")
    if centers is None:
        centers = enumerate_periodic(A, n).as_float()
    limbs = _level_oracle(A, n)
    r = math.exp(-n * tau)
    W = np.ascontiguousarray(frame.vectors)
    nthreads = resolve_threads(threads)
    chunks = [centers[i : i + CHUNK] for i in range(0, len(centers), CHUNK)]

    def work(c):
        return _kernels.component_boxes(np.ascontiguousarray(c), W, extent, step, limbs, r, guard, j)

    if nthreads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            parts = list(ex.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    boxes = np.concatenate([p[0] for p in parts]) if parts else np.zeros((0, A.dim), np.int64)
    probes = int(sum(int(p[1]) for p in parts))
    unc = int(sum(int(p[2]) for p in parts))
    return LevelCount(n, axis or f"j={j}", j, _unique_rows(boxes), probes, unc)


def estimate_probes(A: IntMatrix, tau: float, n: int, j: int, probe_ratio: int = 3) -> float:
    """Probe count :func:`level_box_count` would use."""
    frame = eigen_frame(A)
    semi = frame.semi_sizes(tau, n)
    extent = semi * frame.dual_row_norms()
    step = np.minimum(2.0**-j / probe_ratio, semi / 2.0)
    per = float(np.prod(2 * np.floor(extent / step) + 1))
    return per * abs((matrix_power(A, n) - IntMatrix.identity(A.dim)).det)


def matched_scale(semi_axis: float) -> int:
    """Dyadic exponent ``j`` with ``2^-j`` nearest (in log) to ``semi_axis``."""
    return int(round(-math.log2(semi_axis)))


def _fit(xs, ys) -> tuple[float, float, float]:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


POINT_BUDGET = 10**6


def default_max_level(A: IntMatrix, N: int, points: int = POINT_BUDGET) -> int:
    """Largest ``M >= N + 1`` with ``sum_{n=N..M} H_n <= points`` (at least ``N + 1``)."""
    total, M = 0, N
    while True:
        total += abs((matrix_power(A, M) - IntMatrix.identity(A.dim)).det)
        if total > points:
            return max(N + 1, M - 1)
        M += 1


def box_count(
    A: IntMatrix,
    tau: float,
    N: int | None = None,
    M: int | None = None,
    j_min: int = 1,
    j_max: int = 48,
    probe_ratio: int = 3,
    budget: float = DEFAULT_PROBE_BUDGET,
    threads: int | None = None,
    fit_levels: tuple[int, int] | None = None,
) -> BoxCountReport:
    """Scale-matched box-counting estimate of the dimension of ``R_tau``.

    ``N`` defaults to ``min_disjoint_n(tau)`` and ``M`` to
    :func:`default_max_level`.
    Matched scales outside ``[j_min, j_max]`` are dropped with a
    :class:`~torrec.errors.ResolutionWarning`. ``fit_levels = (lo, hi)``
    restricts the regression to levels in that window.

    Raises:
        BudgetExceeded: if the total probe estimate exceeds ``budget``.
    """
    if N is None:
        N = min_disjoint_n(tau)
    if M is None:
        M = default_max_level(A, N)
    if N < min_disjoint_n(tau):
        raise ValueError(f"N must be at least {min_disjoint_n(tau)} for tau = {tau}")
    if M < N:
        raise ValueError("need M >= N")
    frame = eigen_frame(A)
    plan, dropped = [], []
    for n in range(N, M + 1):
        semi = frame.semi_sizes(tau, n)
        for k, label in enumerate(frame.labels):
            j = matched_scale(semi[k])
            if j_min <= j <= j_max:
                plan.append((n, label, j))
            else:
                dropped.append((n, label, j))
    if dropped:
        warnings.warn(
            f"{len(dropped)} level/axis pairs fall outside the scale window [{j_min}, {j_max}]",
            ResolutionWarning,
            stacklevel=2,
        )
    total = sum(estimate_probes(A, tau, n, j, probe_ratio) for n, _, j in plan)
    if total > budget:
        raise BudgetExceeded(f"estimated {total:.3g} probes exceed the budget {budget:.3g}")
    rows = []
    cache: dict[int, np.ndarray] = {}
    for n, label, j in plan:
        if n not in cache:
            cache = {n: enumerate_periodic(A, n).as_float()}
        rows.append(level_box_count(A, tau, n, j, label, probe_ratio, threads, cache[n]))
    fits = []
    for label in frame.labels:
        sel = [r for r in rows if r.axis == label and r.count > 0]
        if fit_levels is not None:
            sel = [r for r in sel if fit_levels[0] <= r.n <= fit_levels[1]]
        if len(sel) < 2:
            continue
        slope, icpt, r2 = _fit([r.j * math.log(2) for r in sel], [math.log(r.count) for r in sel])
        fits.append(AxisFit(label, slope, icpt, r2, tuple(r.n for r in sel)))
    if not fits:
        raise InsufficientSamples("fewer than two usable levels on every axis")
    best = min(fits, key=lambda f: f.slope)
    if best.r_squared < 0.98:
        warnings.warn(f"fit quality R^2 = {best.r_squared:.4f} below 0.98", UserWarning, stacklevel=2)
    return BoxCountReport((N, M), (j_min, j_max), tuple(rows), tuple(fits), best.slope, best.axis, best.r_squared, tuple(dropped))


@dataclass(frozen=True)
class UnionBoxCount:
    """Box counts of ``R_N u ... u R_M`` on a fixed dyadic ladder."""

    n_range: tuple[int, int]
    js: tuple[int, ...]
    counts: tuple[int, ...]
    slope: float
    r_squared: float
    uncertain: int


def union_box_count(
    A: IntMatrix,
    tau: float,
    N: int,
    M: int,
    j_min: int = 4,
    j_max: int = 11,
    probes: int = 3,
    guard: float = DEFAULT_GUARD,
) -> UnionBoxCount:
    """Classical box counting of the finite union on the full grid.

    Every box of side ``2^-j`` is probed on a centered ``probes^d`` subgrid.
    Provided for comparison with :func:`box_count`: a finite union of
    ellipses has box dimension 0 or ``d``, so this slope tracks the scale
    window rather than the recurrence dimension.
    """
    lim = [_level_oracle(A, n) for n in range(N, M + 1)]
    K = max(l.shape[2] for l in lim)
    stack = np.zeros((len(lim), A.dim, A.dim, K))
    for i, l in enumerate(lim):
        stack[i, :, :, : l.shape[2]] = l
    radii = np.array([math.exp(-n * tau) for n in range(N, M + 1)])
    js = tuple(range(j_min, j_max + 1))
    counts, unc = [], 0
    for j in js:
        c, u = _kernels.union_box_count(stack, radii, j, probes, guard)
        counts.append(int(c))
        unc += int(u)
    pos = [(j, c) for j, c in zip(js, counts) if c > 0]
    if len({j for j, _ in pos}) < 2:
        slope, r2 = math.nan, math.nan
    else:
        slope, _, r2 = _fit([j * math.log(2) for j, _ in pos], [math.log(c) for _, c in pos])
    return UnionBoxCount((N, M), js, tuple(counts), slope, r2, unc)


# ---------------------------------------------------------------------------
# Monte-Carlo measures on E_n
# ---------------------------------------------------------------------------


def _rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), int(chunk)]))


class ENSampler:
    """Uniform sampler of ``E_n``, the union of inscribed parallelograms.

    Samples are drawn in fixed chunks, each from a Philox stream keyed by
    ``(seed, chunk index)``, so output does not depend on the thread count.
    """

    def __init__(self, A: IntMatrix, tau: float, n: int, cap: int = 10**7):
        frame = eigen_frame(A)
        if A.dim != 2:
            raise ValueError("E_n sampling is implemented for 2x2 matrices")
        self.A, self.tau, self.n = A, tau, n
        self.centers = enumerate_periodic(A, n, cap=cap).as_float()
        self.W = frame.vectors
        self.half = 0.5 * frame.semi_sizes(tau, n)

    def _chunk(self, seed: int, index: int, size: int) -> np.ndarray:
        g = _rng(seed, index)
        comp = g.integers(0, len(self.centers), size)
        ab = g.uniform(-1.0, 1.0, (size, 2)) * self.half
        X = self.centers[comp] + ab @ self.W.T
        return X - np.floor(X)

    def sample(self, k: int, seed: int, threads: int | None = None) -> np.ndarray:
        sizes = [min(CHUNK, k - i) for i in range(0, k, CHUNK)]
        idx = range(len(sizes))
        nthreads = resolve_threads(threads)
        if nthreads > 1 and len(sizes) > 1:
            with ThreadPoolExecutor(nthreads) as ex:
                parts = list(ex.map(lambda i: self._chunk(seed, i, sizes[i]), idx))
        else:
            parts = [self._chunk(seed, i, sizes[i]) for i in idx]
        return np.concatenate(parts) if parts else np.zeros((0, 2))


def sample_E_n(A: IntMatrix, tau: float, n: int, k: int, seed: int, threads: int | None = None) -> np.ndarray:
    """``k`` i.i.d. uniform points of ``E_n``; deterministic in ``seed``."""
    return ENSampler(A, tau, n).sample(k, seed, threads)


def torus_ball_area(r: float) -> float:
    """Lebesgue measure of a radius-``r`` ball on the unit torus."""
    if r <= 0:
        return 0.0
    if r >= math.sqrt(0.5):
        return 1.0
    area = math.pi * r * r
    if r > 0.5:
        h = 0.5
        seg = r * r * math.acos(h / r) - h * math.sqrt(r * r - h * h)
        area -= 4 * seg
    return area


@dataclass(frozen=True)
class BallEstimate:
    center: tuple[float, ...]
    radius: float
    estimate: float
    stderr: float
    hits: int
    samples: int

    @property
    def lebesgue(self) -> float:
        return torus_ball_area(self.radius)

    @property
    def ratio(self) -> float:
        return self.estimate / self.lebesgue if self.lebesgue > 0 else math.nan


def _ball_hits(X: np.ndarray, center, r: float) -> int:
    if r >= math.sqrt(0.5):
        return len(X)
    if r <= 0:
        return 0
    d = torus_delta(X, np.asarray(center, dtype=float))
    return int(np.count_nonzero(np.einsum("ij,ij->i", d, d) < r * r))


def _estimate(center, r, hits, k) -> BallEstimate:
    p = hits / k
    return BallEstimate(tuple(float(c) for c in center), float(r), p, math.sqrt(p * (1 - p) / k), hits, k)


def mu_n_ball(A: IntMatrix, tau: float, n: int, center, r: float, k: int = 10**5, seed: int = 0) -> BallEstimate:
    """Monte-Carlo ``mu_n(B(center, r))`` with binomial standard error."""
    if k < 1000:
        raise ValueError("need k >= 1000 samples")
    X = sample_E_n(A, tau, n, k, seed)
    return _estimate(center, r, _ball_hits(X, center, r), k)


@dataclass(frozen=True)
class MeasureScanReport:
    """Ball estimates of ``mu_n`` and a log-log fit.

    ``fitted_local_exponent`` is the least-squares slope of ``log mu`` on
    ``log r`` over the radius buckets that kept at least ``min_hits`` hits
    in every ball; ``predicted_exponent`` is the per-regime bound
    ``min{(l1+l2)/(tau+l1), 2 l2/(tau+l2)}`` (above the threshold) or
    ``2 l2/(tau+l2)`` (below), with ``l_i = l_{i,n}``.
    """

    n: int
    balls: tuple[BallEstimate, ...]
    radii: tuple[float, ...]
    mean_mu: tuple[float, ...]
    dropped_radii: tuple[float, ...]
    fitted_local_exponent: float
    r_squared: float
    predicted_exponent: float

    @property
    def ratios_to_lebesgue(self) -> list[float]:
        return [b.ratio for b in self.balls]


def predicted_local_exponent(A: IntMatrix, tau: float, n: int) -> float:
    from .geometry import regime
    from .spectral import growth_exponents

    l1, l2 = growth_exponents(A, n)
    if regime(A, tau) == "Case2":
        return 2 * l2 / (tau + l2)
    return min((l1 + l2) / (tau + l1), 2 * l2 / (tau + l2))


def measure_scan(
    A: IntMatrix,
    tau: float,
    n: int,
    centers: np.ndarray | int = 20,
    radii: Sequence[float] | None = None,
    k: int = 10**5,
    seed: int = 0,
    min_hits: int = 30,
    threads: int | None = None,
) -> MeasureScanReport:
    """Estimate ``mu_n`` on balls around ``centers`` for each radius.

    ``centers`` is an array of points or a number of uniform random centers
    (drawn from the stream after the samples). Radius buckets where some
    ball has fewer than ``min_hits`` hits are dropped.

    Raises:
        InsufficientSamples: if fewer than two radius buckets survive.
    """
    if radii is None:
        radii = np.geomspace(0.02, 0.3, 8)
    radii = [float(r) for r in radii]
    X = ENSampler(A, tau, n).sample(k, seed, threads)
    if isinstance(centers, (int, np.integer)):
        centers = _rng(seed, 2**62).random((int(centers), A.dim))
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    balls, kept, means, dropped = [], [], [], []
    for r in radii:
        est = [_estimate(c, r, _ball_hits(X, c, r), k) for c in centers]
        balls.extend(est)
        if min(e.hits for e in est) >= min_hits:
            kept.append(r)
            means.append(float(np.mean([e.estimate for e in est])))
        else:
            dropped.append(r)
    if len(set(kept)) < 2:
        raise InsufficientSamples(f"only {len(set(kept))} radius bucket(s) with >= {min_hits} hits per ball")
    slope, _, r2 = _fit(np.log(kept), np.log(means))
    return MeasureScanReport(n, tuple(balls), tuple(kept), tuple(means), tuple(dropped), slope, r2, predicted_local_exponent(A, tau, n))
