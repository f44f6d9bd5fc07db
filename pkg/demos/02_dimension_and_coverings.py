"""
Dimension of the recurrence set
===============================

For the cat map the dimension is ``min{2L/(tau+L), L/tau}`` with
``L = log lambda2``. Each term comes from one covering of ``R_n``: balls
sized to the long axis of each ellipse, or to the short axis. The partial
sums of the Hausdorff series shrink above the dimension and grow below it.
"""

import numpy as np

from torrec.dimension import (
    covering_exponent,
    dim_2d,
    dim_3d_example,
    hausdorff_partial_sum,
    predicted_covering_exponent,
)
from torrec.spectral import parse_matrix, validate_block3, validate_hyperbolic

A = parse_matrix("2,1;1,1")
L = validate_hyperbolic(A).log_abs_lambda2

for tau in np.array([0.25, 0.5, 1.0, 1.5, 2.0, 3.0]) * L:
    d = dim_2d(L, tau)
    print(f"tau/L={tau / L:4.2f}  dim={d.value:.4f}  branch={d.branch}")

###############################################################################
# Fitted covering exponents against their limits.

for tau in (L / 2, 2 * L):
    for strategy in ("major", "minor"):
        fit = covering_exponent(A, tau, strategy, 10, 30)
        want = predicted_covering_exponent(A, tau, strategy)
        print(f"tau={tau:.3f} {strategy:5s} fitted {fit.exponent:.5f} limit {want:.5f}")

###############################################################################
# Partial sums on either side of the dimension.

tau = 2 * L
s0 = dim_2d(L, tau).value
for s in (s0 - 0.1, s0, s0 + 0.1):
    p = hausdorff_partial_sum(A, tau, s, 10, 40)
    print(f"s={s:.3f}  tail ratio {p.tail_ratio:.4f}  -> {p.classification}")

###############################################################################
# A three-dimensional example: diag(3, cat block).

bs = validate_block3(parse_matrix("[[3,0,0],[0,2,1],[0,1,1]]"))
d = dim_3d_example(bs.m, bs.log_lambda, 1.0)
print(f"diag(3, B), tau=1: {d.value:.10f} via {d.branch}")
for label, value in d.candidates:
    print(f"   {label:26s} {value:.6f}")
