"""
Maximizing a functional with two coefficients
=============================================

For J(f) = a_2 + a_3 the circle function is G(x) = 2x + 3x^2 on the Koebe
family.  Sweep it, find its maximizers, and check that the hull support set is
exactly what the maximizers predict.
"""

# %%
import numpy as np

from schlicht import FunctionalSpec, hull_support_set, maximize_on_circle, sweep

J = FunctionalSpec.finite({2: 1, 3: 1})
theta, G, H = sweep(J, "koebe", 512)
print("max |H - Re G| on the circle:", np.max(np.abs(H.real - G.real)))
print("coarse argmax:", theta[np.argmax(G.real)])

# %%
res = maximize_on_circle(J, "koebe")
print("refined:", res.max_value, res.thetas)

# %%
hs = hull_support_set(J, "koebe", seed=3, draws=200)
print(hs.description)
print(hs.validation)

# %%
# Re 3x^2 alone has two maximizers, so its hull support set is a segment.
b3 = hull_support_set(FunctionalSpec.finite({3: 1}), "koebe")
print([round(p.theta, 9) for p in b3.maximizers])
