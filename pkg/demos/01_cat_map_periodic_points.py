"""
Periodic points of the cat map
==============================

The points fixed by ``A^n`` are exactly the solutions of ``(A^n - I) x = 0``
mod 1. Their number is ``|det(A^n - I)|`` and they spread out evenly over
the torus as ``n`` grows.
"""

import math

import numpy as np

from torrec.periodic import count_in_balls, enumerate_periodic, periodic_structure
from torrec.spectral import parse_matrix, validate_hyperbolic

A = parse_matrix("2,1;1,1")
sd = validate_hyperbolic(A)
print("lambda2 =", sd.lambda2, "~", float(sd.lambda2))
print("unstable slope gamma =", sd.gamma)

###############################################################################
# Counts and Smith denominators for the first few periods.

for n in range(1, 9):
    s = periodic_structure(A, n)
    print(f"n={n:2d}  H_n={s.count:5d}  denominators={s.denominators}")

###############################################################################
# The five points of period 2 are the multiples of (1/5, 2/5).

print([tuple(str(c) for c in p) for p in enumerate_periodic(A, 2).points()])

###############################################################################
# Equidistribution: the share of P_n in a ball approaches its area.

rng = np.random.default_rng(0)
centers = rng.random((100, 2))
r = 0.2
for n in (6, 8, 10, 12):
    pts = enumerate_periodic(A, n)
    ratio = count_in_balls(pts, centers, r) / (math.pi * r * r * pts.count)
    print(f"n={n:2d}  count/(pi r^2 H_n) in [{ratio.min():.4f}, {ratio.max():.4f}]")
