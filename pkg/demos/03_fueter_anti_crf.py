"""
Anti-regular functions and the anti-CRF system
==============================================
"""

import numpy as np

from qcgeom import fueter, heis
from qcgeom.jets import coordinate_field
from qcgeom.polyspace import poly_field

n = 1
m = 4 * n
rng = np.random.default_rng(3)

# q itself: D q = 4, so it is not anti-regular
qf = fueter.QuaternionField(*(coordinate_field(c, m) for c in range(4)))
print("D q at 0 =", fueter.dirac(qf, 1, np.zeros((1, m))))

# Pluriharmonic cubics form a linear space; draw one and complete it
basis, monos = fueter.pluriharmonic_basis(n, 3, rng=rng)
print("pluriharmonic cubics:", basis.shape[1], "dimensional")
f = poly_field(basis @ rng.normal(size=basis.shape[1]), monos, m)
F = fueter.completion_field(f)
x = rng.uniform(-2, 2, size=(200, m))
q = fueter.dirac(F, 1, x)
print("D F        ", max(np.abs(c).max() for c in q.coeffs()))
print("Re F - f   ", np.abs(F(x).t - f(x)).max())

# the two characterisations agree: quaternionic Hessians vs pluriharmonicity
hess = f.jet(x, 2).hessian()
print("dd-matrix  ", max(np.abs(fueter.dd_matrix(hess, i, n)).max() for i in (1, 2, 3)))

# Anti-CRF functions on the group, from a linear solve on quadratic polynomials
B, build = fueter.anti_crf_witnesses(n, 2, rng=rng)
print("anti-CRF quadratics:", B.shape[1], "dimensional")
W = build(B @ rng.normal(size=B.shape[1]))
gp = rng.uniform(-2, 2, size=(200, heis.dim(n)))
print("system     ", np.abs(fueter.crf_system_residual(W, gp)).max())
hres, qres, lam = fueter.crf_identities(W, gp)
print("Hessian identity with lambda  ", np.abs(hres).max())
hres4, _, _ = fueter.crf_identities(W, gp, factor=4.0)
print("the same with 4 lambda        ", np.abs(hres4).max())
