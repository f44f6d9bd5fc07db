"""
Measures on E_n and the rotation by gamma
=========================================

Uniform measure on the union of inscribed parallelograms looks like
Lebesgue measure on balls of fixed size. The separation of components
along the unstable direction is governed by how well the slope ``gamma``
is approximated by rationals.
"""

import numpy as np

from torrec.equidist import continued_fraction, counting_function, star_discrepancy
from torrec.estimators import measure_scan, mu_n_ball
from torrec.spectral import parse_matrix, validate_hyperbolic

A = parse_matrix("2,1;1,1")
sd = validate_hyperbolic(A)
L = sd.log_abs_lambda2

est = mu_n_ball(A, L, 10, (0.3, 0.7), 0.25, k=100_000, seed=1)
print(f"mu_10(B) = {est.estimate:.5f} +- {est.stderr:.5f}, area {est.lebesgue:.5f}")

rep = measure_scan(A, 2 * L, 12, centers=20, k=100_000, seed=0)
print("radii", np.round(rep.radii, 4))
print("mean mu", np.round(rep.mean_mu, 6))
print(f"local exponent {rep.fitted_local_exponent:.4f}; lower bound at this n {rep.predicted_exponent:.4f}")

###############################################################################
# Continued fraction of gamma and the constant c*.

prof = continued_fraction(sd.gamma, depth=12, Q=10**8)
print("gamma =", prof.quotients, "repeating", prof.period)
print("first convergents", prof.convergents[:8])
print(f"c* = {prof.cstar:.9f} (at q = 1), tail minimum {prof.liminf:.9f} -> 1/sqrt(5)")

###############################################################################
# Discrepancy of n*gamma.

for N in (10**3, 10**4, 10**5, 10**6):
    D = star_discrepancy(sd.gamma, N)
    c = counting_function(sd.gamma, 0.0, 0.5, N)
    print(f"N={N:8d}  D*={D:.3e}  N D*/log N={N * D / np.log(N):.3f}  share in [0,1/2)={c.ratio:.6f}")
