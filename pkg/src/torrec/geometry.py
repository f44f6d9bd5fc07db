"""Geometry of the level sets ``R_n = {x : |T^n x - x| < e^{-n tau}}``.

Writing ``y = (A^n - I) x mod 1``, a point lies in ``R_n`` iff ``|y| < r``
with ``r = e^{-n tau}``. Each component of ``R_n`` is therefore the ellipse
``c + (A^n - I)^{-1} B(0, r)`` around a periodic point ``c``, and the
parallelograms built from eigen-directions sandwich it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import OddPowerWithNegativeEigenvalue
from .spectral import IntMatrix, SpectralData, matrix_power, validate_hyperbolic

DEFAULT_GUARD = 1e-12


def torus_distance(x: Sequence[float], y: Sequence[float]) -> float:
    """Euclidean norm of ``x - y`` after reducing each coordinate into ``[-1/2, 1/2)``.

    >>> round(torus_distance((0.9, 0.0), (0.1, 0.0)), 12)
    0.2
    """
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    d = d - np.floor(d + 0.5)
    return float(np.sqrt(np.dot(d, d)))


def min_disjoint_n(tau: float) -> int:
    """Smallest ``n >= 1`` with ``e^{-n tau} < 1/2``."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    n = max(1, math.floor(math.log(2.0) / tau) + 1)
    while n > 1 and math.exp(-(n - 1) * tau) < 0.5:
        n -= 1
    while not math.exp(-n * tau) < 0.5:
        n += 1
    return n


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


def _centered(v: Fraction) -> Fraction:
    return v - math.floor(v + Fraction(1, 2))


def displacement_exact(A: IntMatrix, n: int, x: Sequence) -> tuple[Fraction, ...]:
    """``(A^n - I) x mod 1`` in ``[-1/2, 1/2)^d``, with ``x`` read exactly."""
    M = matrix_power(A, n) - IntMatrix.identity(A.dim)
    fx = [Fraction(v) for v in x]
    return tuple(_centered(sum((M[i, j] * fx[j] for j in range(A.dim)), Fraction(0))) for i in range(A.dim))


def contains(A: IntMatrix, tau: float, n: int, x: Sequence, guard: float = DEFAULT_GUARD) -> bool | None:
    """Whether ``x`` lies in ``R_n``.

    ``A^n`` is exact and ``x`` is taken at face value (floats are converted
    exactly). Returns ``None`` when the distance is within ``guard`` of the
    radius; those points are borderline rather than decided.
    """
    y = displacement_exact(A, n, x)
    dist = math.sqrt(float(sum((v * v for v in y), Fraction(0))))
    r = math.exp(-n * tau)
    if abs(dist - r) <= guard:
        return None
    return dist < r


class MembershipOracle:
    """Vectorized membership tests for one ``(A, n)``.

    Codes: 1 inside, 0 outside, 2 within the guard band.
    """

    def __init__(self, A: IntMatrix, n: int):
        self.A = A
        self.n = n
        self.M = matrix_power(A, n) - IntMatrix.identity(A.dim)
        self._limbs = _kernels.to_limbs(self.M.rows)

    def displacement(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
        return _kernels.displacement(self._limbs, X)

    def in_ball(self, X: np.ndarray, r: float, guard: float = DEFAULT_GUARD) -> np.ndarray:
        return _kernels.classify_ball(self.displacement(X), float(r), float(guard))

    def in_box(self, X: np.ndarray, Winv: np.ndarray, half: np.ndarray, guard: float = DEFAULT_GUARD) -> np.ndarray:
        """Classify ``max_k |(Winv y)_k| / half_k`` against 1."""
        return _kernels.classify_box(
            self.displacement(X),
            np.ascontiguousarray(Winv, dtype=np.float64),
            np.ascontiguousarray(half, dtype=np.float64),
            float(guard),
        )


def contains_batch(A: IntMatrix, tau: float, n: int, X: np.ndarray, guard: float = DEFAULT_GUARD) -> np.ndarray:
    """Vectorized :func:`contains`, returning codes 1/0/2."""
    return MembershipOracle(A, n).in_ball(X, math.exp(-n * tau), guard)


# ---------------------------------------------------------------------------
# component geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceComponent:
    """One ellipse of ``R_n`` with its inscribed and circumscribed parallelograms.

    ``axis_stable`` is the unit eigenvector of the contracting eigenvalue and
    carries the long semi-axis ``semi_axis_major``; ``axis_unstable`` carries
    ``semi_axis_minor``.
    """

    n: int
    tau: float
    center: tuple[Fraction, Fraction]
    semi_axis_major: float
    semi_axis_minor: float
    axis_stable: np.ndarray
    axis_unstable: np.ndarray
    c1: float
    radius: float
    lam_minus_one: tuple[float, float]

    @property
    def center_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.center])

    def _vertices(self, scale: float) -> np.ndarray:
        c = self.center_float
        a = scale * self.semi_axis_major * self.axis_stable
        b = scale * self.semi_axis_minor * self.axis_unstable
        return np.array([c + a + b, c - a + b, c - a - b, c + a - b])

    @property
    def inscribed(self) -> np.ndarray:
        """Vertices of ``E``: half the semi-axes along each eigen-direction."""
        return self._vertices(0.5)

    @property
    def circumscribed(self) -> np.ndarray:
        """Vertices of ``E~``: the inscribed parallelogram scaled by ``2 c1``."""
        return self._vertices(self.c1)

    @property
    def frame(self) -> np.ndarray:
        """Columns ``(axis_stable, axis_unstable)``."""
        return np.column_stack([self.axis_stable, self.axis_unstable])

    def local_coords(self, X: np.ndarray) -> np.ndarray:
        """Eigen-coordinates ``(a, b)`` of ``X - center`` (no wrap-around)."""
        D = np.atleast_2d(X) - self.center_float
        return np.linalg.solve(self.frame, D.T).T

    def ellipse_form(self, X: np.ndarray) -> np.ndarray:
        """``|(A^n - I)(x - c)|^2 / r^2``; below 1 exactly on the open ellipse."""
        ab = self.local_coords(X)
        w = ab[:, :1] * self.lam_minus_one[0] * self.axis_stable + ab[:, 1:] * self.lam_minus_one[1] * self.axis_unstable
        return np.einsum("ij,ij->i", w, w) / self.radius**2

    def box_form(self, X: np.ndarray, scale: float) -> np.ndarray:
        """``max(|a| / (scale * major), |b| / (scale * minor))``."""
        ab = np.abs(self.local_coords(X))
        return np.maximum(ab[:, 0] / (scale * self.semi_axis_major), ab[:, 1] / (scale * self.semi_axis_minor))

    def sample_boundary(self, kind: str, k: int, rng: np.random.Generator) -> np.ndarray:
        """Uniformly spread boundary points of ``"inscribed"``, ``"ellipse"`` or ``"circumscribed"``."""
        c = self.center_float
        if kind == "ellipse":
            t = rng.uniform(0.0, 2 * math.pi, k)
            w = self.radius * np.column_stack([np.cos(t), np.sin(t)])
            ab = np.linalg.solve(self.frame, w.T).T / np.array(self.lam_minus_one)
        else:
            scale = 0.5 if kind == "inscribed" else self.c1
            u = rng.uniform(-1.0, 1.0, k)
            side = rng.integers(0, 4, k)
            a = np.where(side < 2, np.where(side == 0, 1.0, -1.0), u)
            b = np.where(side < 2, u, np.where(side == 2, 1.0, -1.0))
            ab = np.column_stack([a * scale * self.semi_axis_major, b * scale * self.semi_axis_minor])
        return c + ab @ self.frame.T


def _require_even_if_negative(sd: SpectralData, n: int):
    if n % 2 and sd.has_negative_eigenvalue:
        raise OddPowerWithNegativeEigenvalue(
            f"n = {n} is odd and an eigenvalue is negative; use an even power"
        )


def semi_axes(A: IntMatrix, tau: float, n: int) -> tuple[float, float]:
    """``(e^{-n tau} / |1 - lambda1^n|, e^{-n tau} / |lambda2^n - 1|)``."""
    sd = validate_hyperbolic(A)
    e1, e2 = sd.abs_power_minus_one(n)
    r = math.exp(-n * tau)
    return r / float(e1), r / float(e2)


def component_geometry(A: IntMatrix, tau: float, n: int, center: Sequence = (0, 0)) -> RecurrenceComponent:
    """Build the component of ``R_n`` around the periodic point ``center``."""
    sd = validate_hyperbolic(A)
    _require_even_if_negative(sd, n)
    g, b = sd.eigvec_slopes()
    u_s = np.array([1.0, b]) / math.hypot(1.0, b)
    u_u = np.array([1.0, g]) / math.hypot(1.0, g)
    e1, e2 = sd.abs_power_minus_one(n)
    r = math.exp(-n * tau)
    # signed eigenvalue^n - 1 so the local linear map is exact in sign
    l1 = float(sd.lambda1**n - 1)
    l2 = float(sd.lambda2**n - 1)
    return RecurrenceComponent(
        n=n,
        tau=tau,
        center=tuple(Fraction(c) for c in center),
        semi_axis_major=r / float(e1),
        semi_axis_minor=r / float(e2),
        axis_stable=u_s,
        axis_unstable=u_u,
        c1=sd.c1,
        radius=r,
        lam_minus_one=(l1, l2),
    )


def area_ratio(A: IntMatrix) -> float:
    """``area(E) / area(E~) = 1 / (4 c1^2)``."""
    return 1.0 / (4.0 * float(validate_hyperbolic(A).c1_squared))


def measure_E_n(A: IntMatrix, tau: float, n: int) -> float:
    """Lebesgue measure of ``E_n``: ``sin(theta) e^{-2 n tau}``, ``theta`` the eigen-angle."""
    return validate_hyperbolic(A).sin_angle() * math.exp(-2 * n * tau)


def in_E_n(A: IntMatrix, tau: float, n: int, X: np.ndarray, oracle: MembershipOracle | None = None) -> np.ndarray:
    """Codes 1/0/2 for membership in the union of inscribed parallelograms."""
    sd = validate_hyperbolic(A)
    g, b = sd.eigvec_slopes()
    W = np.column_stack([np.array([1.0, b]) / math.hypot(1.0, b), np.array([1.0, g]) / math.hypot(1.0, g)])
    r = math.exp(-n * tau)
    oracle = oracle or MembershipOracle(A, n)
    return oracle.in_box(X, np.linalg.inv(W), np.array([r / 2, r / 2]))


# ---------------------------------------------------------------------------
# disjointness
# ---------------------------------------------------------------------------


def circumscribed_overlap_threshold(A: IntMatrix, search: int = 8) -> float:
    """Radius at which translates of the circumscribed parallelograms start to touch.

    Two circumscribed parallelograms around distinct periodic points meet iff
    some nonzero ``w`` in ``Z^2`` has ``|V^{-1} w|_inf <= 2 c1 r`` (``V`` the
    unit eigen-frame). The threshold is independent of ``n``.
    """
    sd = validate_hyperbolic(A)
    g, b = sd.eigvec_slopes()
    V = np.column_stack([np.array([1.0, b]) / math.hypot(1.0, b), np.array([1.0, g]) / math.hypot(1.0, g)])
    Vinv = np.linalg.inv(V)
    best = math.inf
    for i in range(-search, search + 1):
        for j in range(-search, search + 1):
            if i or j:
                best = min(best, float(np.max(np.abs(Vinv @ np.array([i, j], dtype=float)))))
    return best / (2.0 * sd.c1)


def components_disjoint(A: IntMatrix, tau: float, n: int) -> bool:
    """Whether circumscribed parallelograms of distinct components are pairwise disjoint."""
    return math.exp(-n * tau) < circumscribed_overlap_threshold(A)


def ellipses_disjoint(tau: float, n: int) -> bool:
    """Components of ``R_n`` are disjoint iff ``e^{-n tau} <= 1/2``."""
    return math.exp(-n * tau) <= 0.5


def convex_polygons_overlap(P: np.ndarray, Q: np.ndarray) -> bool:
    """Separating-axis test for two convex polygons (shared boundary counts as overlap)."""
    for poly in (P, Q):
        for i in range(len(poly)):
            edge = poly[(i + 1) % len(poly)] - poly[i]
            axis = np.array([-edge[1], edge[0]])
            pp, qq = P @ axis, Q @ axis
            if pp.max() < qq.min() or qq.max() < pp.min():
                return False
    return True


# ---------------------------------------------------------------------------
# separation data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationProfile:
    """Sizes of the disjoint cells isolating the components of ``R_n``.

    ``gap_unstable`` and ``gap_stable`` are the side lengths, along the
    eigen-directions, of the pairwise disjoint parallelograms containing one
    component each.
    """

    regime: str
    direction_unstable: np.ndarray
    direction_stable: np.ndarray
    gap_unstable: float
    gap_stable: float
    c2: float
    c3: float | None


def separation_constant(A: IntMatrix, Q: int = 10**6) -> float:
    """``c2 = c* / (4 sqrt(1 + gamma^2))`` with ``c* = min_{q <= Q} q |q gamma|``."""
    from .equidist import badly_approximable_constant

    sd = validate_hyperbolic(A)
    cstar = badly_approximable_constant(sd.gamma, Q)
    return cstar / (4.0 * math.sqrt(1.0 + float(sd.gamma) ** 2))


def regime(A: IntMatrix, tau: float, tol: float = 1e-12) -> str:
    """``"Case1"`` if ``tau > L/2``, ``"Case2"`` if ``tau < L/2``, ``"Case3"`` within ``tol``."""
    half = 0.5 * validate_hyperbolic(A).log_abs_lambda2
    if abs(tau - half) <= tol:
        return "Case3"
    return "Case1" if tau > half else "Case2"


def separation_profile(A: IntMatrix, tau: float, n: int, Q: int = 10**6) -> SeparationProfile:
    """Cell sizes in each regime.

    Above the threshold both sides scale like ``|lambda2^n - 1|^{-1/2}``;
    below it the stable side is of order ``1 / |1 - lambda1^n|`` and the
    unstable side ``e^{n (tau - l_{2,n})}``. At the threshold the first set
    of formulas is reported.
    """
    sd = validate_hyperbolic(A)
    g, b = sd.eigvec_slopes()
    u_u = np.array([1.0, g]) / math.hypot(1.0, g)
    u_s = np.array([1.0, b]) / math.hypot(1.0, b)
    e1, e2 = (float(v) for v in sd.abs_power_minus_one(n))
    c2 = separation_constant(A, Q)
    reg = regime(A, tau)
    if reg in ("Case1", "Case3"):
        ell = 2.0 / c2 * e2**-0.5
        return SeparationProfile(reg, u_u, u_s, 2.0 * e2**-0.5, 2.0 * ell / e1, c2, None)
    c3 = 0.5 * c2 * sd.c1
    gap_u = 2.0 * c3 * math.exp(n * tau) / e2
    return SeparationProfile(reg, u_u, u_s, gap_u, (2.0 / 3.0) / e1, c2, c3)
