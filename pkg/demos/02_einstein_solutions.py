"""
Conformally flat qc-Einstein structures
=======================================

h = c [ (1 + nu |q|^2)^2 + nu^2 |w|^2 ] turns eta/(2h) into a qc-Einstein
structure.  We evaluate every identity the family has to satisfy, first at
one point, then over a random cloud, and finally watch a perturbation.
"""

import numpy as np

from qcgeom import einstein, heis
from qcgeom.jets import coordinate_field

n = 2
d = heis.dim(n)
rng = np.random.default_rng(2)
params = einstein.SolutionParams(c=0.7, nu=1.3, n=n, translate=tuple(rng.uniform(-1, 1, d)))
h = einstein.solution_h(params)
pts = rng.uniform(-2, 2, size=(500, d))

hd = einstein.HData(h, pts, n)
sc = hd.scale()
print("con01            ", np.abs(einstein.residual_con01(hd, pts)).max(axis=(0, 1)).max() / sc.min())
print("con03            ", np.abs(einstein.residual_con03(hd, pts)).max())
print("hessian relations", (einstein.hessian_relations(hd, pts) / sc).max())
diag, off = einstein.vertical_hessian(hd, pts)
print("xi_s^2 h / 8     ", diag.min() / 8, diag.max() / 8, " mu_o =", einstein.mu_o(params))
print("Ricci, traceless ", np.abs(einstein.conformal_ricci_traceless(hd, pts)).max())

# the scalar curvature is constant and equals 128 n (n+2) c nu
scal = einstein.conformal_scal(hd, pts)
print("scal: min, max, expected", scal.min(), scal.max(), einstein.expected_scal(params))

# Yamabe: u = (2h)^{-(n+1)} solves the equation with that constant
u = einstein.yamabe_u(h, n)
res, usc = einstein.yamabe_residual(u, pts, einstein.expected_scal(params), n, return_scale=True)
print("Yamabe residual  ", (np.abs(res) / usc).max())

# Perturbations.  A linear one in t1 is invisible to con01: the operator
# only sees second horizontal derivatives and xi-derivatives, and t1 has none.
t1 = coordinate_field(0, d, "t1")
base = einstein.residual_con01(h, pts, n=n)
for eps in (1e-2, 1e-3):
    lin = np.abs(einstein.residual_con01(h + eps * t1, pts, n=n) - base).max()
    quad = np.abs(einstein.residual_con01(h + eps * t1 * t1, pts, n=n) - base).max()
    print(f"eps={eps:g}: change from eps*t1 = {lin:.1e}, from eps*t1^2 = {quad:.3e}")

# the scalar curvature does notice the linear perturbation
scal_p = einstein.conformal_scal(h + 1e-3 * t1, pts, n)
print("scal spread after eps*t1:", np.ptp(scal_p) / scal_p.mean())
