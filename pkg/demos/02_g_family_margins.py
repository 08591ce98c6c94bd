"""
How close does the G-family get to the edge of its class?
=========================================================

Class G asks for Re(1 + z f''/f') > -1/2.  The extreme functions
(z - x z^2/2)/(1 - xz)^2 reach the bound only on the boundary circle, so the
grid margin shrinks to zero as the grid approaches |z| = 1.
"""

# %%
import numpy as np

from schlicht import DiskGrid, g_coefficient_report, g_extreme_series, halfplane_field, \
    membership_halfplane
from schlicht.support import membership_order

# 1 + z g''/g' = 1 + 3xz/(1 - xz): worst on the ray opposite to conj(x)
g0 = g_extreme_series(0.0, 4096)  # 3 * 0.99**4096 is far below rounding
for r in (-0.5, -0.9, -0.99):
    print(f"z = {r:6}: field = {halfplane_field(g0, 'convex_shift', r).real:+.6f}"
          f"   closed form {1 + 3 * r / (1 - r):+.6f}")

# %%
# The margin at radius r is 1 - 3r/(1+r) + 1/2 and vanishes as r -> 1.
for r_max in (0.9, 0.95, 0.99, 0.995):
    grid = DiskGrid.geometric(32, 256, r_max=r_max)
    order = membership_order("g", grid)
    v = membership_halfplane(g_extreme_series(0.0, order), "convex_shift", -0.5, grid)
    print(f"r_max = {r_max}: order {order:5d}  margin {v.margin:.8f}  "
          f"exact {1.5 - 3 * r_max / (1 + r_max):.8f}")

# %%
# Equality in |a_n| <= (n+1)/2, coefficient by coefficient.
rows = g_coefficient_report(g_extreme_series(2.0, 12))
for row in rows[:6]:
    print(row)
