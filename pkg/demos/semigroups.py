"""Continuous semigroups from generators.

A half-line generator ``A(z) = gamma z^2`` gives a two-atom family with
closed-form atoms.  On the circle ``B(z) = z^2 - 1`` gives a flow that is
integrated two ways and compared.
"""
import numpy as np

from monomul import (GeneratorCircle, GeneratorHalfLine, classify_halfline_generator,
                     integrate_flow, semigroup_measures, validate_generator)
from monomul.semigroup import identify_power_flow_constant

# %% Half-line: atoms at 0 and 1 + tau.
g = GeneratorHalfLine.quadratic(1.0)
print("generator valid:", validate_generator(g).ok, "| class:", classify_halfline_generator(g).kind.value)
for p in semigroup_measures(g, [0.5, 1.0, 2.0], order=12):
    print(f"tau={p.tau}: atoms {[(round(x, 8), round(w, 8)) for x, w in p.measure.atoms]}")

# %% Pointwise flow against z / (1 - tau z).
z = np.array([-1.0, -2 + 1j, 0.5j])
traj = integrate_flow(g, z, [1.0])
print("max flow error:", np.abs(traj.u[0] - z / (1 - z)).max())

# %% Circle: Runge-Kutta versus extrapolated exponential Euler.
gc = GeneratorCircle.power(2)
rng = np.random.default_rng(0)
w = 0.5 * np.sqrt(rng.uniform(size=20)) * np.exp(2j * np.pi * rng.uniform(size=20))
rk = integrate_flow(gc, w, [0.2, 0.5], "rk")
ee = integrate_flow(gc, w, [0.2, 0.5], "euler_exp")
print("rk vs euler_exp:", np.abs(rk.u - ee.u).max())

# %% Which constant makes the closed form fit the numerical flow?
rep = identify_power_flow_constant(2, w, [0.2, 0.5])
print(f"fitted constant {rep.estimate:.9f}, matched candidate {rep.matched}")
