"""
Roots, classes and homoclinic points
====================================

A walk through the algebraic side: where the roots of an integer polynomial
sit relative to the unit circle, and the two-sided sequences that invert
``f(shift)`` on finitely supported input.
"""

# %%
# Three polynomials we keep coming back to.

import numpy as np

from salemshift.algebra import IntPolynomial, RootClass, classify, find_roots
from salemshift.coding import homoclinic, xi_bar_star
from salemshift.seqspace import Window, apply_poly

golden = IntPolynomial.parse("-1,-1,1")
quartic = IntPolynomial.parse("1,-1,-1,-1,1")
lehmer = IntPolynomial.parse("1,1,0,-1,-1,-1,-1,-1,0,1,1")

for name, f in [("golden", golden), ("quartic", quartic), ("lehmer", lehmer)]:
    r = find_roots(f)
    pc = classify(f, r)
    counts = {c.value: r.count(c) for c in RootClass}
    print(f"{name:8s} degree {f.degree:2d}  roots {counts}  salem={pc.salem} pisot={pc.pisot}")

# %%
# The quartic has one pair of roots on the circle.  Their partial-fraction
# weights ``1/f'(w)`` decide how large the central part of everything below is.

r = find_roots(quartic)
for root in r.roots:
    print(f"{root.cls.value:6s} |w|={abs(root.z):.15f}  b={root.bz:.6f}")

# %%
# The two homoclinic sequences differ by a bounded oscillation, which is
# exactly the central sequence ``w0``.

h = homoclinic(quartic, r)
n = np.arange(-12, 13)
plus, minus = h.wdelta_plus(n), h.wdelta_minus(n)
print(np.round(minus - plus, 4))
print("f(shift) applied to w+ :", np.round(apply_poly(quartic, h.window("plus", -5, 9)).values, 12))

# %%
# Inverting ``f(shift)``: away from the support of ``v`` only the central
# oscillation survives, so the image stays bounded without decaying.

v = Window.from_values(-3, [2, 0, -1, 4, 1, 0, -2])
xi, _ = xi_bar_star(h, v, window=(-40, 40))
back = apply_poly(quartic, xi)
print("round trip residual:", np.max(np.abs(back.values - v.get(back.lo, back.hi))))
print("far left :", np.round(xi.get(-40, -35), 8))
print("far right:", np.round(xi.get(35, 40), 3))
