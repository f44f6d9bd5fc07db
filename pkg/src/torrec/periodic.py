"""Periodic points of toral endomorphisms.

The points fixed by ``T^n`` form the finite group ``(A^n - I)^{-1} Z^d / Z^d``.
:func:`enumerate_periodic` lists it through a Smith normal form, and
:func:`brute_force_periodic` is an independent grid-scan oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapExceeded, OracleTooLarge, SingularError
from .spectral import IntMatrix, matrix_power, validate_block3
from .surd import QuadraticSurd

DEFAULT_CAP = 10**7


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(self.D.dim))


def smith_normal_form(M: IntMatrix) -> SmithForm:
    """Deterministic Smith normal form.

    The pivot is the entry of smallest absolute value in the remaining block
    (first in row-major order on ties); the diagonal is nonnegative and each
    entry divides the next.

    >>> smith_normal_form(IntMatrix(((4, 3), (3, 1)))).diagonal
    (1, 5)
    """
    n = M.dim
    A = [list(r) for r in M.rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in (A, V):
            for row in R:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        for R in (A, U):
            R[dst] = [a + k * b for a, b in zip(R[dst], R[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for R in (A, V):
            for row in R:
                row[dst] += k * row[src]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            for i in range(t + 1, n):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
            if any(A[i][t] for i in range(t + 1, n)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-u for u in U[t]]

    sf = SmithForm(IntMatrix(tuple(map(tuple, U))), IntMatrix(tuple(map(tuple, A))), IntMatrix(tuple(map(tuple, V))))
    assert sf.U @ M @ sf.V == sf.D, "Smith form identity failed"
    return sf


# ---------------------------------------------------------------------------
# point sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicPointSet:
    """The points ``x`` with ``(A^n - I) x`` integral, over a common denominator.

    ``numerators`` has shape ``(count, d)``; row ``i`` is the point
    ``numerators[i] / q``. It is ``None`` for structure-only results.
    """

    n: int
    denominators: tuple[int, ...]
    count: int
    numerators: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def q(self) -> int:
        return self.denominators[-1] if self.denominators else 1

    @property
    def listed(self) -> bool:
        return self.numerators is not None

    def points(self) -> list[tuple[Fraction, ...]]:
        """Exact points as tuples of :class:`~fractions.Fraction`."""
        self._require_listing()
        q = self.q
        return [tuple(Fraction(int(v), q) for v in row) for row in self.numerators]

    def as_float(self) -> np.ndarray:
        self._require_listing()
        return self.numerators.astype(float) / self.q

    def as_set(self) -> set[tuple[int, ...]]:
        """Points as reduced-numerator tuples over ``q``, for set comparisons."""
        self._require_listing()
        return {tuple(int(v) for v in row) for row in self.numerators}

    def _require_listing(self):
        if self.numerators is None:
            raise CapExceeded(self.count, 0, self)


def _sorted_rows(num: np.ndarray) -> np.ndarray:
    order = np.lexsort(num.T[::-1])
    return num[order]


def periodic_structure(A: IntMatrix, n: int) -> PeriodicPointSet:
    """Count and Smith denominators of ``P_n`` without listing points."""
    M = matrix_power(A, n) - IntMatrix.identity(A.dim)
    sf = smith_normal_form(M)
    diag = sf.diagonal
    if 0 in diag:
        raise SingularError(f"A^{n} - I is singular")
    return PeriodicPointSet(n, diag, math.prod(diag))


def enumerate_periodic(A: IntMatrix, n: int, cap: int = DEFAULT_CAP) -> PeriodicPointSet:
    """List ``P_n`` exactly.

    With ``U (A^n - I) V = D`` the solutions are ``x = V y`` where
    ``y_i in (1/d_i) Z``; walking ``y`` over the box ``prod [0, d_i)`` visits
    every point exactly once.

    Raises:
        SingularError: if ``A^n - I`` is singular.
        CapExceeded: if ``H_n > cap``; the exception carries the structure.
    """
    M = matrix_power(A, n) - IntMatrix.identity(A.dim)
    sf = smith_normal_form(M)
    diag = sf.diagonal
    if 0 in diag:
        raise SingularError(f"A^{n} - I is singular")
    count = math.prod(diag)
    if count > cap:
        raise CapExceeded(count, cap, PeriodicPointSet(n, diag, count))
    q = diag[-1]
    d = A.dim
    # contribution of y_i = 1/d_i to x, as a numerator over q, reduced mod q
    cols = [[(sf.V[r, i] * (q // diag[i])) % q for r in range(d)] for i in range(d)]
    dtype = np.int64 if q < 2**31 else object
    num = np.zeros((1, d), dtype=dtype)
    for i in range(d):
        if diag[i] == 1:
            continue
        steps = np.arange(diag[i], dtype=dtype)[:, None] * np.array(cols[i], dtype=dtype)[None, :]
        num = (num[:, None, :] + steps[None, :, :]).reshape(-1, d) % q
    return PeriodicPointSet(n, diag, count, _sorted_rows(num))


def brute_force_periodic(A: IntMatrix, n: int, limit: int = 10**4) -> PeriodicPointSet:
    """Scan the grid ``(1/q) Z^d`` with ``q = |det(A^n - I)|``.

    Independent of the Smith route: every candidate is tested directly with
    ``(A^n - I) x = 0 mod 1``. Cost is ``q^d``.

    Raises:
        OracleTooLarge: if ``q > limit``.
    """
    M = matrix_power(A, n) - IntMatrix.identity(A.dim)
    q = abs(M.det)
    if q == 0:
        raise SingularError(f"A^{n} - I is singular")
    if q > limit:
        raise OracleTooLarge(f"|det(A^{n} - I)| = {q} exceeds the scan limit {limit}")
    d = A.dim
    Mq = np.array([[v % q for v in row] for row in M.rows], dtype=np.int64)
    last = np.arange(q, dtype=np.int64)
    found = []
    for head in itertools.product(range(q), repeat=d - 1):
        base = Mq[:, : d - 1] @ np.array(head, dtype=np.int64) if d > 1 else np.zeros(d, np.int64)
        vals = (base[:, None] + Mq[:, d - 1][:, None] * last[None, :]) % q
        hits = np.nonzero(~vals.any(axis=0))[0]
        for h in hits:
            found.append((*head, int(h)))
    num = np.array(found, dtype=np.int64).reshape(-1, d)
    # reduce to the minimal common denominator used by the Smith route
    g = math.gcd(q, *(int(v) for v in num.ravel())) if num.size else q
    qq = q // g
    num = _sorted_rows(num // g)
    denoms = _group_denominators(num, qq)
    return PeriodicPointSet(n, denoms, len(found), num)


def _group_denominators(num: np.ndarray, q: int) -> tuple[int, ...]:
    # the oracle reports only the exponent q; the Smith denominators follow
    # from the group order and q when d = 2
    count = num.shape[0]
    d = num.shape[1]
    if d == 2 and q and count % q == 0:
        return (count // q, q)
    return (q,)


# ---------------------------------------------------------------------------
# spatial counting
# ---------------------------------------------------------------------------


def torus_delta(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coordinatewise ``x - y`` reduced into ``[-1/2, 1/2)``."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return d - np.floor(d + 0.5)


def count_in_balls(points: PeriodicPointSet, centers: np.ndarray, radius: float) -> np.ndarray:
    """Number of listed points within torus distance ``radius`` of each center."""
    P = points.as_float()
    C = np.atleast_2d(np.asarray(centers, dtype=float))
    out = np.empty(len(C), dtype=np.int64)
    r2 = radius * radius
    for i, c in enumerate(C):
        diff = torus_delta(P, c)
        out[i] = int(np.count_nonzero(np.einsum("ij,ij->i", diff, diff) <= r2))
    return out


def count_in_ball(A: IntMatrix, n: int, center: Sequence[float], radius: float, cap: int = DEFAULT_CAP) -> int:
    """Points of ``P_n`` within torus distance ``radius`` of ``center``."""
    pts = enumerate_periodic(A, n, cap=cap)
    return int(count_in_balls(pts, np.asarray(center, dtype=float)[None, :], radius)[0])


# ---------------------------------------------------------------------------
# explicit grid for the block family diag(m, B)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockGrid:
    """The explicit grid ``(i1/(m^n-1), i2/S_n, i3/S_n)`` for ``diag(m, B)``."""

    n: int
    m_term: int
    S_n: int
    grid_count: int
    det_count: int
    all_periodic: bool | None
    contains_periodic: bool | None
    notes: tuple[str, ...]

    @property
    def matches_det(self) -> bool:
        return self.grid_count == self.det_count


def block_S_n(bs, n: int) -> QuadraticSurd:
    """``S_n``: sum of ``lam^j`` for ``|j| <= k`` if ``n = 2k+1``, else ``sqrt(D)(lam^k - lam^-k)``."""
    lam = bs.lam
    if n % 2:
        k = n // 2
        return sum((lam**j for j in range(-k, k + 1)), QuadraticSurd(0))
    k = n // 2
    return QuadraticSurd.sqrt(bs.block.discriminant) * (lam**k - lam ** (-k))


def block_grid(A: IntMatrix, n: int, check_limit: int = 10**6) -> BlockGrid:
    """Compare the explicit grid with ``|det(A^n - I)|``.

    Both counts are reported. When small enough, every grid point is tested
    for periodicity (``all_periodic``) and every periodic point is tested for
    membership in the grid (``contains_periodic``).
    """
    bs = validate_block3(A)
    notes = []
    S = block_S_n(bs, n)
    if not S.is_rational() or S.p.denominator != 1:
        raise ValueError(f"S_{n} = {S} is not an integer")
    S_int = int(S.p)
    notes.append(f"S_n grows like lambda^(n/2); the stated decay lambda^(-n/2) is a sign slip (S_{n} = {S_int})")
    mt = bs.m**n - 1
    grid_count = mt * S_int * S_int
    M = matrix_power(A, n) - IntMatrix.identity(3)
    det_count = abs(M.det)
    if grid_count != det_count:
        notes.append(f"grid count {grid_count} differs from |det(A^n - I)| = {det_count}")
    all_periodic = None
    if grid_count <= check_limit:
        # (i1/mt, i2/S, i3/S) is periodic iff M x is integral
        L = mt * S_int // math.gcd(mt, S_int)
        i1 = np.arange(mt, dtype=object) * (L // mt)
        i2 = np.arange(S_int, dtype=object) * (L // S_int)
        g1, g2, g3 = np.meshgrid(i1, i2, i2, indexing="ij")
        X = np.stack([g1.ravel(), g2.ravel(), g3.ravel()])
        Mo = np.array(M.tolist(), dtype=object)
        all_periodic = bool(np.all((Mo @ X) % L == 0))
    contains_periodic = None
    if det_count <= check_limit:
        pts = enumerate_periodic(A, n, cap=check_limit)
        scale = np.array([mt, S_int, S_int], dtype=object)
        scaled = pts.numerators.astype(object) * scale[None, :]
        contains_periodic = bool(np.all(scaled % pts.q == 0))
    return BlockGrid(n, mt, S_int, grid_count, det_count, all_periodic, contains_periodic, tuple(notes))
