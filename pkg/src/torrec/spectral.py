"""Integer matrices, their powers, and exact eigen-structure.

2x2 matrices get full treatment: eigenvalues and eigenvector slopes live in
``Q(sqrt(D))`` with ``D = tr(A)^2 - 4 det(A)``. The only 3x3 matrices
accepted are the block-diagonal family ``diag(m, B)`` with ``B`` a 2x2
unimodular block; anything else would need cubic fields.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import HyperbolicityError, MatrixSyntaxError, SingularError, UnsupportedMatrix
from .surd import QuadraticSurd


@dataclass(frozen=True)
class IntMatrix:
    """Square integer matrix with arbitrary-precision entries, row-major."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise MatrixSyntaxError("matrix must be square and nonempty")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> IntMatrix:
        out = []
        for r in rows:
            row = []
            for v in r:
                if isinstance(v, bool) or int(v) != v:
                    raise MatrixSyntaxError(f"non-integer entry {v!r}")
                row.append(int(v))
            out.append(tuple(row))
        return cls(tuple(out))

    @classmethod
    def identity(cls, d: int) -> IntMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def to_float(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.rows])

    def max_abs(self) -> int:
        return max(abs(v) for r in self.rows for v in r)

    @property
    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.dim))

    @property
    def det(self) -> int:
        return _bareiss_det([list(r) for r in self.rows])

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            d = self.dim
            cols = list(zip(*other.rows))
            return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))
        return tuple(sum(a * b for a, b in zip(r, other)) for r in self.rows)

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        return IntMatrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __add__(self, other: IntMatrix) -> IntMatrix:
        return IntMatrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __str__(self) -> str:
        return ";".join(",".join(str(v) for v in r) for r in self.rows)


def _bareiss_det(M: list[list[int]]) -> int:
    n = len(M)
    M = [row[:] for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def parse_matrix(text: str | Sequence[Sequence[int]]) -> IntMatrix:
    """Parse ``"a,b;c,d"`` or a JSON array of arrays into an :class:`IntMatrix`.

    >>> parse_matrix("2,1;1,1") == parse_matrix("[[2,1],[1,1]]")
    True
    """
    if not isinstance(text, str):
        return IntMatrix.of(text)
    s = text.strip()
    if s.startswith("["):
        try:
            rows = json.loads(s)
        except json.JSONDecodeError as exc:
            raise MatrixSyntaxError(f"bad JSON matrix literal: {exc}") from None
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise MatrixSyntaxError("JSON matrix must be an array of arrays")
        return IntMatrix.of(rows)
    try:
        rows = [[int(v) for v in r.split(",")] for r in s.split(";")]
    except ValueError:
        raise MatrixSyntaxError(f"bad matrix literal {text!r}") from None
    return IntMatrix.of(rows)


def matrix_power(A: IntMatrix, n: int) -> IntMatrix:
    """Exact ``A^n`` by binary exponentiation."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    result = IntMatrix.identity(A.dim)
    base = A
    while n:
        if n & 1:
            result = result @ base
        base = base @ base
        n >>= 1
    return result


def count_H_n(A: IntMatrix, n: int) -> int:
    """Number of points of period dividing n: ``|det(A^n - I)|``."""
    h = abs((matrix_power(A, n) - IntMatrix.identity(A.dim)).det)
    if h == 0:
        raise SingularError(f"A^{n} - I is singular")
    return h


# ---------------------------------------------------------------------------
# 2x2 spectral data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralData:
    """Exact spectral data of a hyperbolic 2x2 integer matrix.

    ``lambda1`` is the contracting eigenvalue and ``lambda2`` the expanding
    one; ``(1, gamma)`` and ``(1, beta)`` are eigenvectors for ``lambda2`` and
    ``lambda1``.
    """

    matrix: IntMatrix
    discriminant: int
    lambda1: QuadraticSurd
    lambda2: QuadraticSurd
    gamma: QuadraticSurd
    beta: QuadraticSurd
    c1_squared: QuadraticSurd

    @property
    def c1(self) -> float:
        return math.sqrt(float(self.c1_squared))

    @property
    def log_abs_lambda1(self) -> float:
        return self.lambda1.log_abs()

    @property
    def log_abs_lambda2(self) -> float:
        return self.lambda2.log_abs()

    @property
    def has_negative_eigenvalue(self) -> bool:
        return self.lambda1 < 0 or self.lambda2 < 0

    def eigvec_slopes(self) -> tuple[float, float]:
        """Float shadows ``(gamma, beta)``."""
        return float(self.gamma), float(self.beta)

    def abs_power_minus_one(self, n: int) -> tuple[QuadraticSurd, QuadraticSurd]:
        """Exact ``(|lambda1^n - 1|, |lambda2^n - 1|)``."""
        return abs(self.lambda1**n - 1), abs(self.lambda2**n - 1)

    def sin_angle(self) -> float:
        """Sine of the angle between the eigendirections, ``1 / c1``."""
        return 1.0 / self.c1


def _eigen_2x2(A: IntMatrix) -> tuple[int, QuadraticSurd, QuadraticSurd]:
    t, det = A.trace, A.det
    D = t * t - 4 * det
    plus = QuadraticSurd.half(t, 1, D) if D >= 0 else None
    minus = QuadraticSurd.half(t, -1, D) if D >= 0 else None
    return D, plus, minus


def validate_hyperbolic(A: IntMatrix) -> SpectralData:
    """Check ``|lambda2| > 1 > |lambda1| > 0`` and return the spectral data.

    Raises :class:`HyperbolicityError` with a reason for every violation.
    """
    if A.dim != 2:
        raise HyperbolicityError(f"expected a 2x2 matrix, got {A.dim}x{A.dim}")
    det = A.det
    if det == 0:
        raise HyperbolicityError("singular matrix (λ₁ = 0)")
    D, plus, minus = _eigen_2x2(A)
    if D < 0:
        # complex pair with |lambda|^2 = det >= 1
        if det == 1:
            raise HyperbolicityError("eigenvalue on unit circle (complex pair, det = 1)")
        raise HyperbolicityError(f"|λ₁| ≥ 1 (complex pair of modulus sqrt({det}))")
    small, big = sorted((plus, minus), key=lambda x: abs(x))
    for lam in (small, big):
        if abs(lam) == 1:
            raise HyperbolicityError(f"eigenvalue on unit circle (λ = {lam})")
    if not abs(small) < 1:
        raise HyperbolicityError(f"|λ₁| ≥ 1 (λ₁ = {small})")
    if not abs(big) > 1:
        raise HyperbolicityError(f"|λ₂| ≤ 1 (λ₂ = {big})")
    return eigen_data(A, _validated=(D, small, big))


def eigen_data(A: IntMatrix, _validated=None) -> SpectralData:
    """Exact eigenvalues, eigenvector slopes and the constant c1 for 2x2 ``A``."""
    if _validated is None:
        return validate_hyperbolic(A)
    D, lam1, lam2 = _validated
    a, b, c = A[0, 0], A[0, 1], A[1, 0]
    if b == 0 or c == 0:
        # a triangular integer matrix has integer eigenvalues
        raise RuntimeError("off-diagonal zero in an accepted hyperbolic matrix")
    gamma = (lam2 - a) / b
    beta = (lam1 - a) / b
    c1_sq = (1 + beta * beta) * (1 + gamma * gamma) / ((beta - gamma) * (beta - gamma))
    return SpectralData(A, D, lam1, lam2, gamma, beta, c1_sq)


def growth_exponents(A: IntMatrix, n: int) -> tuple[float, float]:
    """``(l_{1,n}, l_{2,n}) = ((1/n) log|lambda1^n - 1|, (1/n) log|lambda2^n - 1|)``."""
    sd = validate_hyperbolic(A)
    e1, e2 = sd.abs_power_minus_one(n)
    if e1 == 0 or e2 == 0:
        raise SingularError(f"A^{n} - I is singular")
    return e1.log_abs() / n, e2.log_abs() / n


def H_n_from_eigenvalues(sd: SpectralData, n: int) -> QuadraticSurd:
    """``prod_j |lambda_j^n - 1|`` evaluated in the quadratic field."""
    e1, e2 = sd.abs_power_minus_one(n)
    return e1 * e2


# ---------------------------------------------------------------------------
# 3x3 block family diag(m, B)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockSpectral:
    """Spectral data of ``diag(m, B)`` with ``det B = 1`` and eigenvalue ``lam > 1``."""

    matrix: IntMatrix
    m: int
    block: SpectralData

    @property
    def lam(self) -> QuadraticSurd:
        return self.block.lambda2

    @property
    def log_lambda(self) -> float:
        return self.block.log_abs_lambda2

    @property
    def log_m(self) -> float:
        return math.log(self.m)

    def m_exceeds_lambda(self) -> bool:
        return self.lam < self.m


def validate_block3(A: IntMatrix) -> BlockSpectral:
    """Accept ``[[m,0,0],[0,a,b],[0,c,d]]`` with ``m > 1``, ``ad - bc = 1``, trace > 2."""
    if A.dim != 3:
        raise UnsupportedMatrix(f"expected a 3x3 matrix, got {A.dim}x{A.dim}")
    r = A.rows
    if r[0][1] or r[0][2] or r[1][0] or r[2][0]:
        raise UnsupportedMatrix(
            "only block-diagonal 3x3 matrices diag(m, B) are supported; "
            "general 3x3 spectra need cubic fields"
        )
    m = r[0][0]
    if m <= 1:
        raise HyperbolicityError(f"need m > 1, got m = {m}")
    B = IntMatrix(((r[1][1], r[1][2]), (r[2][1], r[2][2])))
    if B.det != 1:
        raise HyperbolicityError(f"2x2 block must have determinant 1, got {B.det}")
    sd = validate_hyperbolic(B)
    if sd.lambda2 < 0:
        raise HyperbolicityError("block eigenvalue must be > 1 (trace > 2)")
    return BlockSpectral(A, m, sd)


# ---------------------------------------------------------------------------
# float eigen-frames shared by geometry and estimators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenFrame:
    """Float eigen-frame of a supported matrix.

    Columns of ``vectors`` are unit eigenvectors, ordered so that axis ``k``
    carries the covering radius called ``r_{n,k+1}`` in the 3D family and
    ``lambda_{n,k+1}`` in 2D: 2D order is (contracting, expanding); 3D order
    is (1/lambda, lambda, m).
    """

    matrix: IntMatrix
    labels: tuple[str, ...]
    eigenvalues: tuple[QuadraticSurd, ...]
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def abs_power_minus_one(self, n: int) -> np.ndarray:
        return np.array([float(abs(mu**n - 1)) for mu in self.eigenvalues])

    def semi_sizes(self, tau: float, n: int) -> np.ndarray:
        """``e^{-n tau} / |mu_k^n - 1|`` for each axis."""
        return math.exp(-n * tau) / self.abs_power_minus_one(n)

    def dual_row_norms(self) -> np.ndarray:
        """Norms of the rows of ``V^{-1}``; ``c1`` for both rows in 2D."""
        return np.linalg.norm(np.linalg.inv(self.vectors), axis=1)


def _unit(v: Iterable[float]) -> np.ndarray:
    v = np.asarray(list(v), dtype=float)
    return v / np.linalg.norm(v)


def eigen_frame(A: IntMatrix) -> EigenFrame:
    if A.dim == 2:
        sd = validate_hyperbolic(A)
        g, b = sd.eigvec_slopes()
        V = np.column_stack([_unit((1.0, b)), _unit((1.0, g))])
        return EigenFrame(A, ("major", "minor"), (sd.lambda1, sd.lambda2), V)
    if A.dim == 3:
        bs = validate_block3(A)
        g, b = bs.block.eigvec_slopes()
        V = np.column_stack([_unit((0.0, 1.0, b)), _unit((0.0, 1.0, g)), np.array([1.0, 0.0, 0.0])])
        return EigenFrame(A, ("k=1", "k=2", "k=3"), (bs.block.lambda1, bs.lam, QuadraticSurd(bs.m)), V)
    raise UnsupportedMatrix(f"unsupported dimension {A.dim}")


def spectral_summary(A: IntMatrix) -> dict:
    """JSON-ready description of the accepted matrix."""
    sd = validate_hyperbolic(A)
    return {
        "matrix": A.tolist(),
        "trace": A.trace,
        "det": A.det,
        "discriminant": sd.discriminant,
        "lambda1": {"exact": str(sd.lambda1), "float": float(sd.lambda1)},
        "lambda2": {"exact": str(sd.lambda2), "float": float(sd.lambda2)},
        "gamma": {"exact": str(sd.gamma), "float": float(sd.gamma)},
        "beta": {"exact": str(sd.beta), "float": float(sd.beta)},
        "c1_squared": {"exact": str(sd.c1_squared), "float": float(sd.c1_squared)},
        "c1": sd.c1,
        "log_abs_lambda1": sd.log_abs_lambda1,
        "log_abs_lambda2": sd.log_abs_lambda2,
    }


def exact_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
