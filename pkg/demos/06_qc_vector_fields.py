"""
Infinitesimal qc automorphisms
==============================

A vector field Q is qc when L_Q eta = (nu I + O) eta with O antisymmetric.
We fit nu and O pointwise and cross-check the Lie derivative against a flow.
"""

import numpy as np

from qcgeom import autos, heis

n = 1
d = heis.dim(n)
rng = np.random.default_rng(6)
pts = rng.uniform(-2, 2, size=(100, d))

fields = {
    "dilation": autos.dilation_generator(n),
    "translation": autos.translation_generator(rng.normal(size=d)),
    "rotation": autos.rotation_generator(n, [0.0, 0.0, 1.0]),
    "t1 xi1": autos.VectorField(lambda xs: [0.0] * 4 + [2.0 * xs[0], 0.0, 0.0], n, "t1 xi1"),
}
for name, Q in fields.items():
    ok, fit = autos.qc_field_check(Q, pts)
    print(f"{name:>12}: qc={ok!s:<5} nu in [{fit.nu.min():+.3f}, {fit.nu.max():+.3f}]  fit residual {fit.residual.max():.1e}")
print("rotation O:\n", np.round(autos.qc_field_check(fields["rotation"], pts)[1].O[0], 12))

# Cartan's formula against a numerical flow
v = rng.normal(size=pts.shape)
Q = fields["dilation"]
print("Cartan vs RK4:", np.abs(autos.lie_derivative_eta(Q, pts, v) - autos.flow_lie_derivative(Q, pts, v)).max())

# a qc field is determined by its three contact components
f1, f2, f3 = autos.triple_of(Q)
R = autos.qc_field_from_triple(f1, f2, f3)
print("field -> triple -> field:", np.abs(R(pts) - Q(pts)).max())
