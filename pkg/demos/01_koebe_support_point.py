"""
The rotated Koebe function as a support point
=============================================

Walk through the evidence behind one certificate: the function sits in U,
the second-coefficient functional peaks exactly at its rotation, and nothing
in the convex hull does better.
"""

# %%
import math

import numpy as np

from schlicht import (AtomicMeasure, CirclePoint, DiskGrid, certify_extreme_support,
                      hull_values, koebe_series, maximize_on_circle, membership_u,
                      second_coeff_functional, u_defect)

x0 = CirclePoint(1.1)
f0 = koebe_series(x0)
print("first coefficients:", np.round(f0.coeffs[:5], 4))

# %%
# The U-defect of z/(1 - xz)^2 is the polynomial -(xz)^2, so its modulus on
# |z| = r is r^2 and the margin on the default grid is 1 - 0.99^2.
grid = DiskGrid.default()
for r in (0.3, 0.6, 0.9, 0.99):
    z = r * np.exp(1j * grid.thetas())
    print(f"r = {r:4}: max |defect| = {np.max(np.abs(u_defect(f0, z))):.6f}   r^2 = {r * r:.6f}")
print(membership_u(f0, 1.0, grid).margin)

# %%
# phi(f) = conj(x0) a_2 restricted to the family is 2 conj(x0) x: a pure rotation.
phi = second_coeff_functional(x0)
res = maximize_on_circle(phi, "koebe")
print("max Re G =", res.max_value, "at theta =", res.thetas, "(x0 at", x0.theta, ")")

# %%
cert = certify_extreme_support(x0, "koebe")
print(cert.verdict, "|", cert.reason)
print("candidate value", cert.candidate_value, "vs max", cert.max_value)

# %%
# Random hull members never beat the certificate.
rng = np.random.default_rng(0)
best = -math.inf
for _ in range(2000):
    k = rng.integers(1, 5)
    mu = AtomicMeasure(tuple(zip(rng.dirichlet(np.ones(k)), rng.uniform(0, 2 * math.pi, k))))
    best = max(best, hull_values(phi, "koebe", mu))
print("best random hull value:", best)
