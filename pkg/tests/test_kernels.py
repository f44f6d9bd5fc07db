from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torrec import _kernels
from torrec.geometry import MembershipOracle, displacement_exact
from torrec.spectral import IntMatrix, matrix_power

from conftest import CAT


def _exact(M: IntMatrix, x) -> np.ndarray:
    out = []
    for i in range(M.dim):
        v = sum((M[i, j] * Fraction(float(x[j])) for j in range(M.dim)), Fraction(0))
        v -= (v + Fraction(1, 2)).__floor__()
        out.append(float(v))
    return np.array(out)


def _wrap_err(a, b):
    d = np.abs(a - b)
    return np.minimum(d, 1 - d)


@pytest.mark.parametrize("n", [1, 5, 20, 40, 80, 120])
def test_displacement_exact_for_huge_powers(n):
    M = matrix_power(CAT, n) - IntMatrix.identity(2)
    rng = np.random.default_rng(n)
    X = rng.random((200, 2))
    got = _kernels.displacement(_kernels.to_limbs(M.rows), X)
    want = np.array([_exact(M, x) for x in X])
    assert _wrap_err(got, want).max() < 1e-13


@given(st.integers(-(2**200), 2**200), st.floats(0, 1, exclude_max=True))
def test_single_entry_limbs(c, x):
    limbs = _kernels.to_limbs([[c]])
    y = np.empty(1)
    _kernels.disp_row(limbs, np.array([x]), y)
    want = Fraction(c) * Fraction(x)
    want -= (want + Fraction(1, 2)).__floor__()
    assert _wrap_err(y[0], float(want)) < 1e-13


def test_three_dimensional_displacement():
    A = IntMatrix.of([[3, 0, 0], [0, 2, 1], [0, 1, 1]])
    M = matrix_power(A, 40) - IntMatrix.identity(3)
    X = np.random.default_rng(0).random((50, 3))
    got = MembershipOracle(A, 40).displacement(X)
    for x, g in zip(X, got):
        want = np.array([float(v) for v in displacement_exact(A, 40, [Fraction(float(t)) for t in x])])
        assert _wrap_err(g, want).max() < 1e-12
    assert M.max_abs() > 2**53


def test_classification_codes():
    Y = np.array([[0.0, 0.1], [0.0, 0.3], [0.2, 0.0]])
    assert list(_kernels.classify_ball(Y, 0.2, 1e-9)) == [1, 0, 2]
    W = np.eye(2)
    half = np.array([0.2, 0.2])
    assert list(_kernels.classify_box(Y, W, half, 1e-9)) == [1, 0, 2]
