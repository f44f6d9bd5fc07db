"""Exact arithmetic in a real quadratic field Q(sqrt(D)).

A :class:`QuadraticSurd` stores ``p + q*sqrt(D)`` with rational ``p`` and
``q``. Everything except the float shadow and logarithms is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from math import isqrt
from numbers import Rational
from typing import Union

Number = Union[int, Fraction, "QuadraticSurd"]


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@total_ordering
class QuadraticSurd:
    """The number ``p + q*sqrt(D)`` with ``p, q`` rational and ``D >= 0``.

    Two surds can be combined only when they share ``D`` (or one of them is
    rational). Instances are immutable and hashable.

    >>> phi = QuadraticSurd.half(1, 1, 5)
    >>> phi * phi == phi + 1
    True
    >>> phi.floor()
    1
    """

    __slots__ = ("_p", "_q", "_D")

    def __init__(self, p: int | Fraction = 0, q: int | Fraction = 0, D: int = 0):
        D = int(D)
        if D < 0:
            raise ValueError("D must be nonnegative")
        p = Fraction(p)
        q = Fraction(q)
        if q == 0 or D == 0:
            q, D = Fraction(0), 0
        else:
            r = isqrt(D)
            if r * r == D:
                p, q, D = p + q * r, Fraction(0), 0
        self._p, self._q, self._D = p, q, D

    @classmethod
    def half(cls, p: int, q: int, D: int) -> QuadraticSurd:
        """Return ``(p + q*sqrt(D)) / 2``."""
        return cls(Fraction(p, 2), Fraction(q, 2), D)

    @classmethod
    def sqrt(cls, D: int) -> QuadraticSurd:
        return cls(0, 1, D)

    @property
    def p(self) -> Fraction:
        return self._p

    @property
    def q(self) -> Fraction:
        return self._q

    @property
    def D(self) -> int:
        return self._D

    def is_rational(self) -> bool:
        return self._q == 0

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other) -> QuadraticSurd | None:
        if isinstance(other, QuadraticSurd):
            if other._D and self._D and other._D != self._D:
                raise ValueError(f"incompatible radicands {self._D} and {other._D}")
            return other
        if isinstance(other, (int, Rational)):
            return QuadraticSurd(Fraction(other))
        if isinstance(other, float):
            return QuadraticSurd(Fraction(other))
        return None

    def _radicand(self, other: QuadraticSurd) -> int:
        return self._D or other._D

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticSurd(self._p + o._p, self._q + o._q, self._radicand(o))

    __radd__ = __add__

    def __neg__(self) -> QuadraticSurd:
        return QuadraticSurd(-self._p, -self._q, self._D)

    def __pos__(self) -> QuadraticSurd:
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self._radicand(o)
        p = self._p * o._p + self._q * o._q * D
        q = self._p * o._q + self._q * o._p
        return QuadraticSurd(p, q, D)

    __rmul__ = __mul__

    def conjugate(self) -> QuadraticSurd:
        """Galois conjugate ``p - q*sqrt(D)``."""
        return QuadraticSurd(self._p, -self._q, self._D)

    def norm(self) -> Fraction:
        """Field norm ``p^2 - D*q^2``."""
        return self._p * self._p - self._D * self._q * self._q

    def trace(self) -> Fraction:
        return 2 * self._p

    def inverse(self) -> QuadraticSurd:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("surd is zero")
        c = self.conjugate()
        return QuadraticSurd(c._p / n, c._q / n, self._D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> QuadraticSurd:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadraticSurd(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order ------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign (-1, 0 or 1)."""
        sp = (self._p > 0) - (self._p < 0)
        sq = (self._q > 0) - (self._q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        a = self._p * self._p
        b = self._q * self._q * self._D
        if a > b:
            return sp
        if a < b:
            return sq
        return 0

    def __abs__(self) -> QuadraticSurd:
        return -self if self.sign() < 0 else self

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except ValueError:
            return False
        if o is None:
            return NotImplemented
        return (self - o).sign() == 0

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self._q == 0:
            return hash(self._p)
        return hash((self._p, self._q, self._D))

    def __bool__(self) -> bool:
        return self.sign() != 0

    # -- integer parts ----------------------------------------------------

    def _integer_form(self) -> tuple[int, int, int]:
        """Return integers ``(a, b, c)`` with value ``(a + b*sqrt(D)) / c``, ``c > 0``."""
        c = _lcm(self._p.denominator, self._q.denominator)
        a = self._p.numerator * (c // self._p.denominator)
        b = self._q.numerator * (c // self._q.denominator)
        return a, b, c

    def floor(self) -> int:
        """Exact floor, via an integer square root."""
        a, b, c = self._integer_form()
        if b == 0:
            return a // c
        s = b * b * self._D
        t = isqrt(s)
        if b > 0:
            return (a + t) // c
        if t * t == s:
            return (a - t) // c
        return (a - t - 1) // c

    __floor__ = floor

    def ceil(self) -> int:
        return -((-self).floor())

    def round(self) -> int:
        """Nearest integer (ties cannot occur for irrational values)."""
        return (self + Fraction(1, 2)).floor()

    def frac(self) -> QuadraticSurd:
        """Fractional part ``x - floor(x)`` in ``[0, 1)``."""
        return self - self.floor()

    def dist_to_int(self) -> QuadraticSurd:
        """Distance to the nearest integer, exactly."""
        f = self.frac()
        return f if f <= Fraction(1, 2) else 1 - f

    # -- float shadows ----------------------------------------------------

    def __float__(self) -> float:
        if self._q == 0:
            return float(self._p)
        if self.sign() == 0:
            return 0.0
        # floor(x * 2^k) carries >= 60 significant bits once |m| >= 2^60
        k = 64
        while True:
            m = (self * (1 << k)).floor()
            if abs(m) >= 1 << 60:
                return float(Fraction(m, 1 << k))
            k += max(8, 62 - abs(m).bit_length())

    def log_abs(self) -> float:
        """Natural log of ``|x|``, safe for values beyond the float range."""
        x = abs(self)
        f = float(x) if x < (1 << 1000) else math.inf
        if f != math.inf and f != 0.0:
            return math.log(f)
        m = x.floor()
        shift = m.bit_length() - 60
        return math.log(m >> shift) + shift * math.log(2.0)

    def __repr__(self) -> str:
        return f"QuadraticSurd({self._p!s}, {self._q!s}, {self._D})"

    def __str__(self) -> str:
        if self._q == 0:
            return str(self._p)
        return f"{self._p}{'+' if self._q > 0 else '-'}{abs(self._q)}*sqrt({self._D})"


def as_surd(x: Number) -> QuadraticSurd:
    return x if isinstance(x, QuadraticSurd) else QuadraticSurd(Fraction(x))
