"""
Projections, skew normals and the skew projection
=================================================

A convex body, a constant antisymmetric matrix ``J`` and a point outside
the body are all the skew projection needs. This script walks through
the pieces on the unit disk, where everything can be checked by hand.
"""

# %%
# Euclidean projection onto the disk just rescales the point.
import numpy as np

from skewflect import SkewField, skew_normal, skew_project, skew_reflect, unit_ball

disk = unit_ball(2)
x = np.array([1.1, 0.0])
print("P(x)          =", disk.project(x))
print("inner normal  =", disk.inner_normal(x))

# %%
# A rotation generator tilts the inner normal. The tilt angle depends only
# on ``|J nu|``: the cosine between ``nu`` and ``nu^J`` is ``1/sqrt(1+|J nu|^2)``.
J = SkewField.constant([[0.0, 1.0], [-1.0, 0.0]])
nu = disk.inner_normal(x)
nuJ = skew_normal(J.matrix, nu)
print("skew normal   =", nuJ, " cos =", nuJ @ nu)

# %%
# The skew projection slides back into the body along ``nu^J`` instead of
# ``nu``. Its landing point differs from ``P(x)``, but it is still on the
# boundary.
p, fallback = skew_project(disk, J, x)
print("P^J(x)        =", p, " |P^J(x)| =", np.linalg.norm(p), " fallback:", fallback)

# %%
# Far enough out, the tilted ray misses the disk altogether. The function
# then falls back to ``P(x)`` and says so.
print("far point     ->", skew_project(disk, J, [2.0, 0.0]))

# %%
# The skew reflection of the same point, for comparison.
print("R^J(x)        =", skew_reflect(disk, J, x))
