"""Convolving measures on the half-line and the circle.

Run with ``python demos/convolution_tour.py``.
"""
import numpy as np

from monomul import (CIRCLE, HALF_LINE, AtomicMeasure, eval_convolved_eta, mconv, mconv0,
                     prony_recover, support_bounds_check)

# %% Two atoms at 0 and 2, convolved with themselves.
# The moments of the result are 3^n, which Prony turns back into atoms.
two = AtomicMeasure(HALF_LINE, [0.0, 2.0], [0.5, 0.5])
out = mconv(two, two, 12)
print("moments:", np.round(out.moments.real[:6], 12))
mu = prony_recover(out, 2, HALF_LINE)
print("atoms:", mu.atoms)

# %% The operation is not commutative in general.
a = AtomicMeasure(HALF_LINE, [0.0, 1.0], [0.5, 0.5])
b = AtomicMeasure(HALF_LINE, [1.0, 3.0], [0.5, 0.5])
print("mu*nu - nu*mu, first moments:",
      np.round((mconv(a, b, 4).moments - mconv(b, a, 4).moments).real, 6))

# %% Support growth: the n-th root of the n-th moment climbs towards max supp.
rep = support_bounds_check(two, two, mconv(two, two, 32), "mconv", mu)
print(f"upper bound {rep.upper_bound}, lower value {rep.lower_value:.6f}, ok={rep.passed}")

# %% On the circle a symmetric coin flip convolved with itself spreads to 4 atoms.
coin = AtomicMeasure(CIRCLE, [0.0, np.pi], [0.5, 0.5])
four = prony_recover(mconv(coin, coin, 16), 4, CIRCLE)
print("angles / (pi/2):", np.round(four.positions / (np.pi / 2), 10))

# %% Measures with zero mean are absorbed into the uniform measure.
tri = AtomicMeasure(CIRCLE, 2 * np.pi * np.arange(3) / 3, [1 / 3] * 3)
print("largest moment of tri (x) coin:", np.abs(mconv0(tri, coin, 16).moments).max())

# %% Pointwise evaluation obeys |eta(z)| <= |z| inside the disk.
z = 0.9 * np.exp(2j * np.pi * np.linspace(0, 1, 7))
print("|eta|/|z| for four atoms (x) coin:", np.round(np.abs(eval_convolved_eta(four, coin, "mconv", z)) / 0.9, 4))
