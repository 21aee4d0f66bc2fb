"""Dyadic roots of a measure.

Every measure with nonzero mean on the circle, or any measure on the
half-line, has square roots for both operations.  Repeated square roots
give the dyadic points of a semigroup.
"""
import numpy as np

from monomul import HALF_LINE, AtomicMeasure, divisibility_chain, moments, prony_recover
from monomul.series import eta_from_moments, iterate

two = AtomicMeasure(HALF_LINE, [0.0, 2.0], [0.5, 0.5])
chain = divisibility_chain(two, depth=4, order=24)

# %% Level k is the 2^-k power: composing its eta 2^k times recovers the start.
target = eta_from_moments(moments(two, 24))
for k, level in enumerate(chain, start=1):
    back = iterate(level.eta, 2**k)
    gap = np.abs(back.coeffs - target.coeffs).max()
    found = prony_recover(level, 2, HALF_LINE)
    print(f"level {k}: atoms {[(round(x, 6), round(w, 6)) for x, w in found.atoms]}  "
          f"recomposition gap {gap:.1e}")

# %% The half-power has atoms 0 and 3/2 with weights 1/3, 2/3.
print("expected level 1: [(0, 1/3), (1.5, 2/3)]")
