"""
Why mixtures of Koebe functions are not univalent
=================================================

An average of two rotated Koebe functions has two double poles on the circle.
Such a map must fold the disk; the injectivity probe finds two points with the
same image, and a polynomial root computation confirms it independently.
"""

# %%
import math

import numpy as np

from schlicht import AtomicMeasure, DiskGrid, hull_function, hull_member, injectivity_probe, \
    local_univalence_check, pole_set
from schlicht.support import probe_order

mu = AtomicMeasure(((0.5, 0.0), (0.5, math.pi)))
print("poles:", pole_set(mu))

# %%
# (k(z) + k(-z))/2 = z(1 + z^2)/(1 - z^2)^2 has critical points at z = +-i(sqrt 2 - 1).
grid = DiskGrid.default()
order = probe_order(grid)
f = hull_member(mu, "koebe", order)
v = local_univalence_check(f, grid)
print(v.verdict, v.witness, "expected", 1j * (math.sqrt(2) - 1))

# %%
res = injectivity_probe(f, grid)
z1, z2 = res.collision
print("collision:", z1, z2, "level", res.level, "candidates", res.candidates_tried)
print("images:", hull_function(mu, "koebe", z1), hull_function(mu, "koebe", z2))

# %%
# Independent check: the preimages of w are the roots of
# z (1 - z)^2 / 2 + z (1 + z)^2 / 2 - w (1 - z^2)^2.
P = np.polynomial.Polynomial
z = P([0, 1])
w = hull_function(mu, "koebe", z1)
roots = (0.5 * z * (1 + z) ** 2 + 0.5 * z * (1 - z) ** 2 - w * (1 - z * z) ** 2).roots()
print("roots inside the disk:", roots[np.abs(roots) < 1])
