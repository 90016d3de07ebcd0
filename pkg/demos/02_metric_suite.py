"""
Distances between restricted behaviors
======================================

Once each mode is summarized by an orthonormal basis, any function of the
principal angles between the two bases gives a distance. This demo
evaluates the nine classical ones on the two plant modes and shows where
they agree and where they part ways.
"""

# %%
import math

import numpy as np

from lgap import (Complexity, SARXSystem, SubspaceBasis, all_metrics, behavior_basis,
                  generate_excited_trajectory, grassmann_metric, principal_angles)

system = SARXSystem.case_study(noise_sigma=0.0)
rng = np.random.default_rng(3)
c = Complexity(m=1, l=2, n=2)
w0, w1 = (generate_excited_trajectory(system, k, 60, rng=rng) for k in (0, 1))
V, W = behavior_basis(w0, 7, c), behavior_basis(w1, 7, c)

# %%
# Principal angles first. Four vanish to rounding, so the two behaviors
# intersect in a 4-dimensional subspace. The other five spread up to
# about 35 degrees.
print("angles (deg):", np.array2string(np.degrees(principal_angles(V, W).angles), precision=3))

for name, value in all_metrics(V, W).items():
    print(f"{name:>13s}  {value:.6f}")

# %%
# The projection metric is the sine of the largest angle, and Asimov is
# that angle itself. Both ignore everything but the worst direction.
# Chordal and Grassmann pool all angles.
th = principal_angles(V, W).max
print(f"sin(theta_max) = {math.sin(th):.6f}, theta_max = {th:.6f}")

# %%
# Martin's formula grows without bound as an angle approaches 90 degrees,
# and that convexity breaks the triangle inequality. Three lines in the plane
# at 0, 0.7 and 1.4 rad show it.
def line(a):
    return SubspaceBasis(np.array([[math.cos(a)], [math.sin(a)]]))

a, b, d = line(0.0), line(0.7), line(1.4)
for name in ("projection", "grassmann", "martin"):
    direct = grassmann_metric(name, a, d)
    detour = grassmann_metric(name, a, b) + grassmann_metric(name, b, d)
    print(f"{name:>10s}: d(a,c) = {direct:.4f}  d(a,b)+d(b,c) = {detour:.4f}")
