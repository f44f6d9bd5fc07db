"""Fractional parts of ``n alpha`` and Diophantine data of quadratic surds.

Fractional parts are produced in 64-bit fixed point (exact modular integer
arithmetic on ``floor(frac(alpha) 2^64)``); any point that lands within the
accumulated truncation error of an interval endpoint is re-decided in the
quadratic field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import RationalInput
from .surd import QuadraticSurd, as_surd

_TWO64 = 1 << 64


@dataclass(frozen=True)
class CountingReport:
    """``count = #{1 <= n <= N : {n alpha} in [a, b)}``."""

    a: float
    b: float
    N: int
    count: int

    @property
    def ratio(self) -> float:
        return self.count / self.N


def _fixed_point_fracs(alpha: QuadraticSurd, N: int) -> np.ndarray:
    """``floor(frac(alpha) 2^64) * n mod 2^64`` for ``n = 1..N`` as ``uint64``.

    The value for index ``n`` undershoots ``frac(n alpha) 2^64`` (mod ``2^64``)
    by less than ``n``.
    """
    F = (alpha.frac() * _TWO64).floor()
    n = np.arange(1, N + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return n * np.uint64(F)


def _frac_at_least(alpha: QuadraticSurd, n: int, a: Fraction) -> bool:
    return (alpha * n).frac() >= a


def counting_function(alpha, a: float, b: float, N: int) -> CountingReport:
    """Exact count of ``n <= N`` with ``{n alpha}`` in ``[a, b)``."""
    if not (0 <= a < b <= 1):
        raise ValueError("need 0 <= a < b <= 1")
    if N < 1:
        raise ValueError("N must be positive")
    alpha = as_surd(alpha)
    if alpha.is_rational():
        fr = [(alpha * k).frac() for k in range(1, N + 1)]
        return CountingReport(a, b, N, sum(1 for f in fr if a <= f < b))
    vals = _fixed_point_fracs(alpha, N)
    fa, fb = Fraction(a), Fraction(b)

    def below(endpoint: Fraction) -> np.ndarray:
        # boolean "frac(n alpha) < endpoint", exact
        if endpoint >= 1:
            return np.ones(N, dtype=bool)
        E = np.uint64(math.floor(endpoint * _TWO64))
        # the true value is (v + delta) mod 2^64 with 0 <= delta < n
        v = vals
        n = np.arange(1, N + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            gap = E - v
        safe_true = (v < E) & (gap >= n)
        safe_false = (v >= E) & (v <= np.uint64(_TWO64 - 1) - n + np.uint64(1))
        res = safe_true.copy()
        risky = ~(safe_true | safe_false)
        for idx in np.nonzero(risky)[0]:
            res[idx] = not _frac_at_least(alpha, int(idx) + 1, endpoint)
        return res

    inside = below(fb) & ~below(fa)
    return CountingReport(a, b, N, int(np.count_nonzero(inside)))


def fractional_parts(alpha, N: int) -> np.ndarray:
    """Float shadows of ``{n alpha}``, ``n = 1..N``, accurate to about ``N 2^-64 + 2^-53``."""
    alpha = as_surd(alpha)
    return _fixed_point_fracs(alpha, N).astype(np.float64) / float(_TWO64)


def star_discrepancy(alpha, N: int) -> float:
    """``D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N)`` over the sorted ``{n alpha}``.

    Sorting uses the fixed-point integers, so the order is exact up to
    near-ties of size ``N 2^-64``; the returned value carries the same error.
    """
    if N < 1:
        raise ValueError("N must be positive")
    alpha = as_surd(alpha)
    if N == 1:
        x = float(alpha.frac())
        return max(x, 1.0 - x)
    xs = np.sort(_fixed_point_fracs(alpha, N)).astype(np.float64) / float(_TWO64)
    i = np.arange(1, N + 1, dtype=np.float64)
    return float(max(np.max(i / N - xs), np.max(xs - (i - 1) / N)))


# ---------------------------------------------------------------------------
# continued fractions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiophantineProfile:
    """Continued fraction data of a quadratic irrational.

    ``quotients`` is ``preperiod + period`` (unrolled to at least the
    requested depth in ``expansion``); ``convergents`` lists ``(p_k, q_k)``;
    ``cstar`` is ``min q |q alpha|`` over the convergent denominators up to
    ``Q`` and ``liminf`` the same minimum restricted to ``q >= sqrt(Q)``.
    """

    alpha: QuadraticSurd
    preperiod: tuple[int, ...]
    period: tuple[int, ...]
    expansion: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    Q: int
    cstar: float
    liminf: float

    @property
    def quotients(self) -> tuple[int, ...]:
        return self.preperiod + self.period


def _reduced_form(alpha: QuadraticSurd) -> tuple[int, int, int]:
    """Integers ``(P, Q, d)`` with ``alpha = (P + sqrt(d)) / Q`` and ``Q | d - P^2``."""
    a, b, c = alpha._integer_form()
    d = b * b * alpha.D
    P, Q = (a, c) if b > 0 else (-a, -c)
    if (d - P * P) % Q:
        P, Q, d = P * abs(Q), Q * abs(Q), d * Q * Q
    return P, Q, d


def continued_fraction(alpha, depth: int = 64, Q: int = 10**6) -> DiophantineProfile:
    """Exact partial quotients, with period detection on the complete quotients.

    Raises:
        RationalInput: if ``alpha`` is rational.
    """
    alpha = as_surd(alpha)
    if alpha.is_rational():
        raise RationalInput(f"{alpha} is rational")
    if depth < 1:
        raise ValueError("depth must be positive")
    P, Qd, d = _reduced_form(alpha)
    r = math.isqrt(d)
    seen: dict[tuple[int, int], int] = {}
    quotients: list[int] = []
    start = None
    while True:
        state = (P, Qd)
        if state in seen:
            start = seen[state]
            break
        seen[state] = len(quotients)
        # floor((P + sqrt(d)) / Q), exact
        if Qd > 0:
            x = (P + r) // Qd
        else:
            x = QuadraticSurd(Fraction(P, Qd), Fraction(1, Qd), d).floor()
        quotients.append(x)
        P = x * Qd - P
        Qd = (d - P * P) // Qd
    pre, per = tuple(quotients[:start]), tuple(quotients[start:])
    expansion = list(pre)
    while len(expansion) < depth:
        expansion.extend(per)
    # extend further when needed to reach the denominator bound Q
    convs = _convergents(expansion)
    while convs[-1][1] <= Q:
        expansion.extend(per)
        convs = _convergents(expansion)
    cstar, liminf = _convergent_minima(alpha, convs, Q)
    return DiophantineProfile(alpha, pre, per, tuple(expansion), tuple(convs), Q, cstar, liminf)


def _convergents(qs: list[int]) -> list[tuple[int, int]]:
    out = []
    p0, q0, p1, q1 = 1, 0, qs[0], 1
    out.append((p1, q1))
    for a in qs[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def _convergent_minima(alpha: QuadraticSurd, convs, Q: int) -> tuple[float, float]:
    root = math.isqrt(Q)
    best = math.inf
    tail = math.inf
    for _, q in convs:
        if q > Q:
            break
        v = float((alpha * q).dist_to_int() * q)
        best = min(best, v)
        if q >= root:
            tail = min(tail, v)
    return best, tail


def badly_approximable_constant(alpha, Q: int) -> float:
    """``min_{1 <= q <= Q} q |q alpha|`` with ``|.|`` the distance to the nearest integer.

    Only convergent denominators are visited: ``q |q alpha| < 1/2`` forces
    ``p/q`` to be a convergent, and ``q = 1`` already gives a value below
    ``1/2``.
    """
    if Q < 1:
        raise ValueError("Q must be positive")
    alpha = as_surd(alpha)
    if alpha.is_rational():
        raise RationalInput(f"{alpha} is rational")
    return continued_fraction(alpha, depth=1, Q=Q).cstar
