"""
The quaternionic Heisenberg group in coordinates
================================================

Points are (q, w) with q in H^n and w imaginary.  We check the group law,
the left-invariant frame and the contact form on a handful of points.
"""

import numpy as np

from qcgeom import heis
from qcgeom.quat import I, J, K

n = 1
rng = np.random.default_rng(1)

# Hamilton's rules, the whole algebra in one line
print("ij = k:", I * J == K, "  ji = -k:", J * I == -K)

# the group law is not commutative; the centre picks up 2 Im(q_o conj(q))
a = heis.GroupPoint.from_array(rng.normal(size=heis.dim(n)))
b = heis.GroupPoint.from_array(rng.normal(size=heis.dim(n)))
ab = heis.group_mul(a, b).to_array()
ba = heis.group_mul(b, a).to_array()
print("a*b - b*a   =", np.round(ab - ba, 6))
print("a * a^{-1}  =", np.round(heis.group_mul(a, heis.group_inverse(a)).to_array(), 12))

# the frame as polynomial-coefficient operators; brackets are checked exactly
table = heis.commutator_table(n)
print(f"{len(table)} brackets checked, all exact: {all(ok for *_, ok in table)}")
for A, B, _ in table[:6]:
    print(f"  [{A}, {B}]")

# the horizontal vectors are exactly the kernel of the three contact forms
p = rng.uniform(-2, 2, size=(5, heis.dim(n)))
theta = heis.contact_form(p, n)
C = heis.frame_data(n).matrix(p)[: 4 * n]
print("max |theta_s(X_a)| =", np.abs(np.einsum("sk...,ak...->sa...", theta, C)).max())

# xi_s is 2 d/dw_s, so theta_s(xi_t) = delta_st
xi = heis.frame_data(n).matrix(p)[4 * n :]
print(np.round(np.einsum("sk...,tk...->st...", theta, xi)[..., 0], 12))
