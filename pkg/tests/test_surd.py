from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from torrec.surd import QuadraticSurd, as_surd

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=40)
radicands = st.sampled_from([2, 3, 5, 8, 12, 13, 21])


def to_sympy(x: QuadraticSurd):
    return sp.Rational(x.p.numerator, x.p.denominator) + sp.Rational(x.q.numerator, x.q.denominator) * sp.sqrt(x.D)


@given(fracs, fracs, fracs, fracs, radicands)
def test_field_operations_match_sympy(p1, q1, p2, q2, D):
    a, b = QuadraticSurd(p1, q1, D), QuadraticSurd(p2, q2, D)
    for got, want in [
        (a + b, to_sympy(a) + to_sympy(b)),
        (a - b, to_sympy(a) - to_sympy(b)),
        (a * b, to_sympy(a) * to_sympy(b)),
    ]:
        assert sp.expand(sp.radsimp(to_sympy(got) - want)) == 0
    if b:
        assert sp.expand(sp.radsimp(to_sympy(a / b) - to_sympy(a) / to_sympy(b))) == 0


@settings(max_examples=300)
@given(fracs, fracs, radicands)
def test_floor_and_sign_match_sympy(p, q, D):
    x = QuadraticSurd(p, q, D)
    sx = to_sympy(x)
    assert x.floor() == int(sp.floor(sx))
    assert x.ceil() == int(sp.ceiling(sx))
    assert x.sign() == int(sp.sign(sx))
    assert 0 <= x.frac() < 1
    assert x.dist_to_int() <= Fraction(1, 2)


@given(fracs, fracs, radicands)
def test_float_is_close(p, q, D):
    x = QuadraticSurd(p, q, D)
    assert float(x) == pytest.approx(float(p) + float(q) * math.sqrt(D), rel=1e-12, abs=1e-12)


def test_floor_of_cancelling_surd():
    # 1e12 * (sqrt(2) - 1414213562373/1e12) is below 1 but float noise is large
    x = QuadraticSurd(-1414213562373, 10**12, 2)
    assert x.floor() == int(sp.floor(to_sympy(x)))


def test_golden_ratio_identities():
    phi = QuadraticSurd.half(1, 1, 5)
    assert phi * phi == phi + 1
    assert phi.norm() == -1
    assert phi.conjugate() == 1 - phi
    assert (phi**10).trace() == 123  # Lucas number L_10
    assert abs(phi.log_abs() - math.log((1 + math.sqrt(5)) / 2)) < 1e-15


def test_rational_coercion():
    assert as_surd(3) == QuadraticSurd(3)
    assert as_surd(Fraction(1, 3)) + 1 == Fraction(4, 3)
    assert QuadraticSurd(2).is_rational
