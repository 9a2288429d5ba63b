"""
Cayley transform from the sphere to the group
=============================================
"""

import numpy as np

from qcgeom import cayley

rng = np.random.default_rng(4)
n = 1
s = cayley.random_sphere_points(rng, n, 1000)
z = cayley.cayley(s)

print("|s| - 1         ", np.abs(cayley.sphere_constraint(s)).max())
print("Siegel domain   ", np.abs(cayley.siegel_constraint(z)).max())
print("round trip      ", np.abs(cayley.inverse_cayley(z) - s).max())

# contact forms pull back conformally, up to a rotation of the triple
v = cayley.random_tangents(rng, s)
print("conformality    ", cayley.conformality_residual(s, v).max())
lam = cayley.lam(s)
print("conformal factor range", lam.min(), lam.max())

# points near the pole go to infinity in the group
g = cayley.cayley_to_group(s)
far = np.argmax(np.linalg.norm(g, axis=-1))
print("largest image", np.linalg.norm(g[far]), "from", np.round(s[far], 3))
