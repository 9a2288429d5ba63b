"""The qc-Einstein conformal factors on the flat model and residuals of their equations.

For the conformal change ``eta_bar = eta / (2h)`` of the standard structure the
functions

    h = c [ (1 + nu |q|^2)^2 + nu^2 |w|^2 ],      c, nu > 0,

(up to a left translation) keep the trace-free qc-Ricci tensor equal to zero.
Every identity is evaluated from one order-2 jet of ``h`` per point batch; on
the group ``nabla dh`` is the matrix of iterated frame derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import as_points, field_jet, frame_derivatives, full_hessian
from .decomp import project_3_0, project_sym_minus1, sandwich, standard_triple
from .heis import GroupPoint, _group_mul_coords, _n_from_dim, dim
from .jets import ScalarField

__all__ = [
    "SolutionParams",
    "solution_h",
    "mu_o",
    "HData",
    "h_data",
    "scale",
    "residual_con01",
    "residual_con03",
    "hessian_relations",
    "vertical_hessian",
    "conformal_scal",
    "expected_scal",
    "yamabe_u",
    "yamabe_residual",
    "conformal_ricci_traceless",
    "conformal_torsion_parts",
]


@dataclass(frozen=True)
class SolutionParams:
    c: float
    nu: float
    n: int = 1
    translate: tuple = field(default=None)

    def __post_init__(self):
        if not self.c > 0 or not self.nu > 0:
            raise ValueError(f"c and nu must be positive, got c={self.c}, nu={self.nu}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        t = self.translate
        if t is None:
            t = (0.0,) * dim(self.n)
        elif isinstance(t, GroupPoint):
            t = tuple(t.to_array())
        t = tuple(float(v) for v in np.ravel(t))
        if len(t) != dim(self.n):
            raise ValueError(f"translation must have {dim(self.n)} coordinates")
        object.__setattr__(self, "translate", t)


def mu_o(params: SolutionParams) -> float:
    """The constant with ``xi_s^2 h = 8 mu_o``; equals ``c nu^2``."""
    return params.c * params.nu**2


def solution_h(params: SolutionParams) -> ScalarField:
    """``p -> h(g0 o p)`` with ``g0`` the stored translation."""
    n, c, nu = params.n, params.c, params.nu
    g0 = list(params.translate)
    shift = any(g0)

    def h(xs):
        ys = _group_mul_coords(g0, xs, n) if shift else xs
        q2 = ys[0] * ys[0]
        for v in ys[1 : 4 * n]:
            q2 = q2 + v * v
        w2 = ys[4 * n] * ys[4 * n] + ys[4 * n + 1] * ys[4 * n + 1] + ys[4 * n + 2] * ys[4 * n + 2]
        a = q2 * nu + 1.0
        return (a * a + w2 * nu**2) * c

    return ScalarField(h, dim(n), name=f"h(c={c:g},nu={nu:g})")


class HData:
    """Value, frame gradient, Reeb derivatives and horizontal Hessian of ``h``."""

    def __init__(self, h, p, n: int | None = None):
        pts = as_points(p)
        self.n = n = _n_from_dim(pts.shape[-1]) if n is None else n
        self.points = pts
        self.jet = field_jet(h, pts, 2)
        full = full_hessian(self.jet, pts, n)
        self.grad, self.xi = frame_derivatives(self.jet, pts, n)
        m = 4 * n
        self.value = self.jet.value
        self.hess = full[:m, :m]
        self.vert = full[m:, m:]
        self.full = full

    @property
    def grad_sq(self):
        return np.sum(self.grad**2, axis=0)

    @property
    def lap(self):
        return np.trace(self.hess, axis1=0, axis2=1)

    def scale(self):
        """``max(1, |h|, |grad h|^2, |lap h|)``."""
        return np.maximum.reduce([np.ones_like(self.value), np.abs(self.value), self.grad_sq, np.abs(self.lap)])


def h_data(h, p, n=None) -> HData:
    return h if isinstance(h, HData) else HData(h, p, n)


def scale(h, p, n=None):
    return h_data(h, p, n).scale()


def _bcast(mat, ndim):
    return mat.reshape(mat.shape + (1,) * (ndim - 2))


def _con01_tensor(d: HData):
    I = standard_triple(d.n)
    H = d.hess
    out = 3 * H
    for s in range(3):
        out = out - sandwich(I[s].T, H, I[s])
        out = out + 4 * _bcast(I[s].T, H.ndim) * d.xi[s]
    return out


def residual_con01(h, p, a: int | None = None, b: int | None = None, n: int | None = None):
    """Left side minus right side of the first equation, on ``(e_a, e_b)``.

    With ``a`` and ``b`` omitted the whole ``4n x 4n`` tensor is returned.
    """
    t = _con01_tensor(h_data(h, p, n))
    if a is None and b is None:
        return t
    return t[a, b]


def _con03_lhs(d: HData):
    I = standard_triple(d.n)
    M = d.hess - 2.0 / d.value * np.einsum("a...,b...->ab...", d.grad, d.grad)
    out = M
    for s in range(3):
        out = out + sandwich(I[s].T, M, I[s])
    return out


def residual_con03(h, p, n: int | None = None):
    """Trace-free part of the left side of the second equation (zero iff it is ``lambda g``)."""
    d = h_data(h, p, n)
    lhs = _con03_lhs(d)
    if d.n == 1:
        return np.zeros_like(lhs)
    m = lhs.shape[0]
    tr = np.trace(lhs, axis1=0, axis2=1)
    return lhs - _bcast(np.eye(m), lhs.ndim) * (tr / m)


def hessian_relations(h, p, n: int | None = None):
    """Worst violation of ``(I_j T) T h = -T (I_j T) h = xi_j h`` over alpha and j."""
    d = h_data(h, p, n)
    worst = np.zeros_like(d.value)
    for alpha in range(d.n):
        t = 4 * alpha
        for j in range(3):
            ij = t + j + 1
            a = np.abs(d.hess[ij, t] - d.xi[j])
            b = np.abs(-d.hess[t, ij] - d.xi[j])
            worst = np.maximum(worst, np.maximum(a, b))
    return worst


def vertical_hessian(h, p, n: int | None = None):
    """``(xi_s^2 h for s = 1..3, max |xi_i xi_j h| over i != j)``."""
    d = h_data(h, p, n)
    diag = np.stack([d.vert[s, s] for s in range(3)])
    off = np.max(np.abs(np.stack([d.vert[0, 1], d.vert[0, 2], d.vert[1, 2], d.vert[1, 0], d.vert[2, 0], d.vert[2, 1]])), axis=0)
    return diag, off


def _require_positive(value, what):
    if np.any(np.asarray(value) <= 0):
        raise ValueError(f"{what} must be positive at every point")


def conformal_scal(h, p, n: int | None = None):
    """qc-scalar curvature of ``eta / (2h)`` (the flat model has ``Scal = 0``)."""
    d = h_data(h, p, n)
    _require_positive(d.value, "h")
    k = d.n + 2
    return -8 * k**2 / d.value * d.grad_sq + 8 * k * d.lap


def expected_scal(params: SolutionParams) -> float:
    """``128 n (n+2) c nu``: the formula evaluated where ``grad h = 0``."""
    return 128.0 * params.n * (params.n + 2) * params.c * params.nu


def yamabe_u(h: ScalarField, n: int) -> ScalarField:
    """``u = (2h)^{-(n+1)}``, so that ``u^{1/(n+1)} eta = eta / (2h)``."""
    return (2.0 * h) ** (-(n + 1))


def yamabe_residual(u, p, scal_bar, n: int | None = None, return_scale: bool = False):
    """``sub-Laplacian(u) + (n+1)/(4(n+2)) u^{(Q+2)/(Q-2)} scal_bar`` with ``Q = 4n+6``."""
    d = h_data(u, p, n)
    _require_positive(d.value, "u")
    n = d.n
    Q = 4 * n + 6
    term = (n + 1) / (4 * (n + 2)) * d.value ** ((Q + 2) / (Q - 2)) * scal_bar
    res = d.lap + term
    if return_scale:
        return res, np.maximum.reduce([np.ones_like(res), np.abs(d.lap), np.abs(term)])
    return res


def conformal_torsion_parts(h, p, n: int | None = None):
    """``(T0_bar, U_bar)`` of ``eta / (2h)``; both vanish on the flat model itself."""
    d = h_data(h, p, n)
    _require_positive(d.value, "h")
    t0 = project_sym_minus1(d.hess) / d.value
    M = d.hess - 2.0 / d.value * np.einsum("a...,b...->ab...", d.grad, d.grad)
    u = project_3_0(M) / (2 * d.value)
    return t0, u


def conformal_ricci_traceless(h, p, n: int | None = None):
    """Trace-free horizontal qc-Ricci tensor of ``eta / (2h)``.

    Equal to ``(2n+2) T0_bar + (4n+10) U_bar``.
    """
    d = h_data(h, p, n)
    t0, u = conformal_torsion_parts(d, p)
    return (2 * d.n + 2) * t0 + (4 * d.n + 10) * u
