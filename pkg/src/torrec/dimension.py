"""Closed-form dimension values, covering counts and partial Hausdorff sums.

Conventions: logs are natural; ``L = log|lambda2|``. For the block family
``diag(m, B)`` the three covering radii are

    r_{n,1} = e^{-n tau} / (1 - lambda^{-n}),
    r_{n,2} = e^{-n tau} / (lambda^n - 1),
    r_{n,3} = e^{-n tau} / (m^n - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, HypothesisError, RegimeError
from .spectral import IntMatrix, count_H_n, validate_block3, validate_hyperbolic

BRANCH_UNSTABLE = "2log|λ₂|/(τ+log|λ₂|)"
BRANCH_STABLE = "log|λ₂|/τ"
BRANCH_CROSSOVER = "crossover"

TIE_TOL = 1e-12


@dataclass(frozen=True)
class DimensionValue:
    """A minimum over labeled candidate expressions."""

    value: float
    branch: str
    candidates: tuple[tuple[str, float], ...]

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "branch": self.branch,
            "candidates": [{"label": k, "value": v} for k, v in self.candidates],
        }


def _pick(cands: list[tuple[str, float]], tie_label: str | None = None) -> DimensionValue:
    value = min(v for _, v in cands)
    winners = [k for k, v in cands if abs(v - value) <= TIE_TOL * max(1.0, abs(value))]
    if len(winners) > 1 and tie_label is not None:
        branch = tie_label
    else:
        branch = winners[0]
    return DimensionValue(value, branch, tuple(cands))


def dim_2d(log_lambda2: float, tau: float) -> DimensionValue:
    """``min{2L/(tau+L), L/tau}``; a tie is labeled ``"crossover"``.

    >>> dim_2d(1.0, 2.0).value
    0.5
    """
    L = float(log_lambda2)
    if not (L > 0 and tau > 0):
        raise ValueError("need log|lambda2| > 0 and tau > 0")
    return _pick([(BRANCH_UNSTABLE, 2 * L / (tau + L)), (BRANCH_STABLE, L / tau)], BRANCH_CROSSOVER)


def remark_exponents(eigenvalues: Sequence[float], convention: str = "clamped") -> list[float]:
    """Sorted exponents ``l_i`` for :func:`generic_upper_bound`.

    ``"clamped"`` uses ``max(0, log|mu|)``, the limit of
    ``(1/n) log|mu^n - 1|``; ``"raw"`` uses ``log|mu|``.
    """
    logs = [math.log(abs(float(mu))) for mu in eigenvalues]
    if convention == "clamped":
        logs = [max(0.0, v) for v in logs]
    elif convention != "raw":
        raise ValueError(f"unknown convention {convention!r}")
    return sorted(logs)


def generic_upper_bound(ells: Sequence[float], tau: float) -> DimensionValue:
    """``min_i (i l_i + sum_{j>i} l_j) / (tau + l_i)`` over nondecreasing ``l``.

    The branch label is ``"i=<index>"`` (1-based).

    Raises:
        ValueError: if ``ells`` is not nondecreasing.
        DomainError: if some ``tau + l_i <= 0``.
    """
    ells = [float(v) for v in ells]
    if any(a > b for a, b in zip(ells, ells[1:])):
        raise ValueError("ells must be nondecreasing")
    cands = []
    for i, li in enumerate(ells, start=1):
        den = tau + li
        if den <= 0:
            raise DomainError(f"tau + l_{i} = {den} is not positive")
        num = i * li + sum(ells[i:])
        cands.append((f"i={i}", num / den))
    return _pick(cands)


def dim_3d_example(m: int, log_lambda: float, tau: float) -> DimensionValue:
    """Dimension for ``diag(m, B)``: min over five candidates if ``m > lambda``, four otherwise.

    Raises:
        HypothesisError: if ``m <= lambda^{1/2}``.
    """
    if m <= 1:
        raise HypothesisError("need m > 1")
    l = float(log_lambda)
    lm = math.log(m)
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not lm > 0.5 * l:
        raise HypothesisError(f"need m > lambda^(1/2); log m = {lm:.6g}, log(lambda)/2 = {0.5 * l:.6g}")
    if lm > l:
        cands = [
            ("(τ+3logλ)/(τ+logλ)", (tau + 3 * l) / (tau + l)),
            ("3log m/(τ+log m)", 3 * lm / (tau + lm)),
            ("(2logλ+log m)/(τ+logλ)", (2 * l + lm) / (tau + l)),
            ("(logλ+log m)/τ", (l + lm) / tau),
            ("(τ+logλ)/τ", (tau + l) / tau),
        ]
    else:
        cands = [
            ("(2log m+logλ)/(τ+log m)", (2 * lm + l) / (tau + lm)),
            ("3logλ/(τ+logλ)", 3 * l / (tau + l)),
            ("(logλ+log m)/τ", (l + lm) / tau),
            ("(τ+logλ)/τ", (tau + l) / tau),
        ]
    return _pick(cands)


# ---------------------------------------------------------------------------
# covering counts
# ---------------------------------------------------------------------------

STRATEGIES_2D = ("major", "minor")
STRATEGIES_3D = ("k=1", "k=2", "k=3")


@dataclass(frozen=True)
class CoveringRow:
    """One covering of ``R_n``: ``count`` balls of radius ``radius``.

    ``log_count`` is kept separately since 3D counts are real-valued leading
    terms and may exceed the float range for large ``n``.
    """

    n: int
    strategy: str
    radius: float
    log_radius: float
    count: float
    log_count: float

    def log_term(self, s: float) -> float:
        return self.log_count + s * self.log_radius

    def term(self, s: float) -> float:
        return math.exp(self.log_term(s))


def _row(n, strategy, log_radius, log_count, count=None) -> CoveringRow:
    if count is None:
        count = math.exp(log_count) if log_count < 700 else math.inf
    return CoveringRow(n, strategy, math.exp(log_radius), log_radius, count, log_count)


def covering_counts(A: IntMatrix, tau: float, n: int, strategy: str, tol: float = 1e-12) -> CoveringRow:
    """Covering of ``R_n`` by balls aligned with one eigen-scale.

    2D strategies: ``"major"`` uses ``H_n`` balls of radius
    ``e^{-n tau}/|1 - lambda1^n|``; ``"minor"`` uses
    ``H_n ceil(|lambda2^n - 1| / |1 - lambda1^n|)`` balls of radius
    ``e^{-n tau}/|lambda2^n - 1|``. 3D strategies ``"k=1"``, ``"k=2"``,
    ``"k=3"`` use radius ``r_{n,k}`` with the leading count of the matching
    regime.

    Raises:
        RegimeError: if ``tau`` sits on a regime boundary of a 3D count.
    """
    if A.dim == 2:
        return _covering_2d(A, tau, n, strategy)
    return _covering_3d(A, tau, n, strategy, tol)


def _covering_2d(A, tau, n, strategy):
    sd = validate_hyperbolic(A)
    e1, e2 = sd.abs_power_minus_one(n)
    H = count_H_n(A, n)
    if strategy == "major":
        return _row(n, strategy, -n * tau - e1.log_abs(), math.log(H), H)
    if strategy == "minor":
        per = (e2 / e1).ceil()
        c = H * per
        return _row(n, strategy, -n * tau - e2.log_abs(), math.log(c), c)
    raise ValueError(f"unknown 2D strategy {strategy!r}; expected one of {STRATEGIES_2D}")


def _covering_3d(A, tau, n, strategy, tol):
    bs = validate_block3(A)
    l, lm = bs.log_lambda, bs.log_m
    lam = bs.lam
    log_lm1 = (lam**n - 1).log_abs()  # log(lambda^n - 1)
    log_inv = (1 - lam ** (-n)).log_abs()  # log(1 - lambda^-n)
    log_mm1 = math.log(bs.m**n - 1)
    big_m = bs.m_exceeds_lambda()
    if strategy == "k=1":
        if abs(tau - lm) <= tol:
            raise RegimeError("tau = log m is the boundary of the k=1 regimes")
        log_r = -n * tau - log_inv
        if tau < lm:
            log_c = n * tau + log_lm1 + 2 * log_inv
        else:
            log_c = log_mm1 + log_lm1 + log_inv
    elif strategy == "k=2":
        log_r = -n * tau - log_lm1
        if not big_m:
            log_c = 3 * log_lm1
        else:
            if abs(tau - (lm - l)) <= tol:
                raise RegimeError("tau = log m - log lambda is the boundary of the k=2 regimes")
            if tau < lm - l:
                log_c = 3 * log_lm1 + n * tau
            else:
                log_c = 2 * log_lm1 + log_mm1
    elif strategy == "k=3":
        log_r = -n * tau - log_mm1
        log_c = 2 * log_mm1 + log_lm1 if not big_m else 3 * log_mm1
    else:
        raise ValueError(f"unknown 3D strategy {strategy!r}; expected one of {STRATEGIES_3D}")
    return _row(n, strategy, log_r, log_c)


def strategies_for(A: IntMatrix) -> tuple[str, ...]:
    return STRATEGIES_2D if A.dim == 2 else STRATEGIES_3D


@dataclass(frozen=True)
class CoveringFit:
    strategy: str
    exponent: float
    intercept: float
    n_values: tuple[int, ...]


def covering_exponent(A: IntMatrix, tau: float, strategy: str, n_min: int = 10, n_max: int = 30) -> CoveringFit:
    """Least-squares slope of ``log count`` against ``-log radius`` over ``n_min..n_max``."""
    rows = [covering_counts(A, tau, n, strategy) for n in range(n_min, n_max + 1)]
    x = np.array([-r.log_radius for r in rows])
    y = np.array([r.log_count for r in rows])
    slope, intercept = np.polyfit(x, y, 1)
    return CoveringFit(strategy, float(slope), float(intercept), tuple(range(n_min, n_max + 1)))


def predicted_covering_exponent(A: IntMatrix, tau: float, strategy: str) -> float:
    """Asymptotic ratio ``log count / -log radius`` of a strategy."""
    if A.dim == 2:
        L = validate_hyperbolic(A).log_abs_lambda2
        return L / tau if strategy == "major" else 2 * L / (tau + L)
    bs = validate_block3(A)
    l, lm = bs.log_lambda, bs.log_m
    if strategy == "k=1":
        return (tau + l) / tau if tau < lm else (lm + l) / tau
    if strategy == "k=2":
        if not bs.m_exceeds_lambda():
            return 3 * l / (tau + l)
        return (tau + 3 * l) / (tau + l) if tau < lm - l else (2 * l + lm) / (tau + l)
    return (2 * lm + l) / (tau + lm) if not bs.m_exceeds_lambda() else 3 * lm / (tau + lm)


# ---------------------------------------------------------------------------
# partial Hausdorff sums
# ---------------------------------------------------------------------------

SHRINKING = "ShrinkingTail"
GROWING = "GrowingTerms"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class PartialSum:
    """Terms ``t_n = count(n) radius(n)^s`` under the cheaper covering at each ``n``."""

    s: float
    n_values: tuple[int, ...]
    log_terms: tuple[float, ...]
    strategies: tuple[str, ...]
    tail_ratio: float
    classification: str
    rows: tuple[CoveringRow, ...] = field(repr=False, default=())

    @property
    def terms(self) -> np.ndarray:
        return np.exp(np.array(self.log_terms))

    @property
    def log_partial_sum(self) -> float:
        a = np.array(self.log_terms)
        mx = a.max()
        return float(mx + np.log(np.exp(a - mx).sum()))


def hausdorff_partial_sum(
    A: IntMatrix,
    tau: float,
    s: float,
    N: int,
    M: int,
    window: int = 10,
    dead_zone: float = 1e-3,
) -> PartialSum:
    """Partial sum over ``n = N..M`` and a ratio-test classification.

    The geometric mean of the last ``window`` term ratios decides:
    below ``1 - dead_zone`` gives ``"ShrinkingTail"``, above ``1 + dead_zone``
    gives ``"GrowingTerms"``, anything between is ``"Indeterminate"``.
    Divergence is never claimed.
    """
    if not 0 < s <= A.dim:
        raise ValueError(f"s must lie in (0, {A.dim}]")
    if N > M:
        raise ValueError("need N <= M")
    ns, logs, strats, rows = [], [], [], []
    for n in range(N, M + 1):
        best = min((covering_counts(A, tau, n, st) for st in strategies_for(A)), key=lambda r: r.log_term(s))
        ns.append(n)
        logs.append(best.log_term(s))
        strats.append(best.strategy)
        rows.append(best)
    diffs = np.diff(logs)[-window:]
    ratio = float(np.exp(diffs.mean())) if len(diffs) else math.nan
    if not len(diffs):
        cls = INDETERMINATE
    elif ratio < 1 - dead_zone:
        cls = SHRINKING
    elif ratio > 1 + dead_zone:
        cls = GROWING
    else:
        cls = INDETERMINATE
    return PartialSum(s, tuple(ns), tuple(logs), tuple(strats), ratio, cls, tuple(rows))
