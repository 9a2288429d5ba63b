"""
Which hypersurfaces in H^{n+1} are qc?
======================================

A real hypersurface inherits a qc structure when the second fundamental
form restricted to the horizontal space is invariant under I_1, I_2, I_3.
"""

import numpy as np

from qcgeom import hypersurface as hs

rng = np.random.default_rng(5)
n = 1
surfaces = [
    hs.sphere(n),
    hs.ellipsoid(n, [1.0, 2.0]),
    hs.deformed_sphere(n, 0.5),
    hs.plane(n),
    hs.from_expression("t1**2 + x1**2 + y1**2 + z1**2 + 3*(pt**2 + px**2 + py**2 + pz**2) - 1", n, "stretched"),
]
for surf in surfaces:
    pts = hs.sample_points(surf, rng, 40)
    verdict, worst, _ = hs.qc_check(surf, pts)
    print(f"{surf.name:>16}: {verdict:<13} worst violation {worst:.2e}")

# on the sphere II(X, Y) = -<X, Y> on the horizontal space
sph = hs.sphere(n)
p = hs.sample_points(sph, rng, 1)[0]
H = hs.horizontal_space(sph, p)
print(np.round(H.T @ hs.second_fundamental_matrix(sph, p) @ H, 10))
print("dtheta vs II:", hs.dtheta_relation_residual(sph, p, H[:, 0], H[:, 1]))
