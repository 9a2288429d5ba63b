"""Frame calculus on ``G(H)``: frame derivatives, horizontal gradient and Hessian.

The frame is parallel for the flat connection of the group, so ``nabla dh``
is just the matrix of iterated frame derivatives ``e_a(e_b h)``.  Functions
here accept a :class:`~qcgeom.jets.ScalarField` (expanded on demand) or an
already computed :class:`~qcgeom.jets.Jet` at the same points.
"""

from __future__ import annotations

import numpy as np

from .heis import FrameOperator, GroupPoint, frame_data
from .jets import MAX_ORDER, Jet, JetOrderError, ScalarField, coordinate_jets

__all__ = [
    "as_points",
    "apply",
    "field_jet",
    "frame_derivatives",
    "horizontal_gradient",
    "grad_norm_sq",
    "horizontal_hessian",
    "sub_laplacian",
    "reeb_derivatives",
    "full_hessian",
]


def as_points(p) -> np.ndarray:
    if isinstance(p, GroupPoint):
        return p.to_array()
    return np.asarray(p, dtype=float)


def field_jet(f, p, order: int) -> Jet:
    if isinstance(f, Jet):
        if f.order < order:
            raise JetOrderError(f"this computation needs a jet of order {order}, got {f.order}")
        return f
    return f.jet(as_points(p), order)


class _Applied(ScalarField):
    def __init__(self, op: FrameOperator, f: ScalarField):
        super().__init__(None, f.dim, name=f"{op.name}({f.name})")
        self.op = op
        self.inner = f

    def jet(self, points, order):
        if order + 1 > MAX_ORDER:
            raise JetOrderError(
                f"{self.name} to order {order} requires the inner field to order {order + 1} (max {MAX_ORDER})"
            )
        pts = np.asarray(points, dtype=float)
        inner = self.inner.jet(pts, order + 1)
        xs = coordinate_jets(pts, order)
        out = Jet.constant(0.0, self.dim, order, pts.shape[:-1])
        for k, poly in self.op.coeffs.items():
            out = out + inner.diff(k) * poly(xs)
        return out


def apply(op: FrameOperator, f: ScalarField) -> ScalarField:
    """The field ``op f``; each application consumes one jet order."""
    if op.nvars != f.dim:
        raise ValueError("operator and field live on different spaces")
    return _Applied(op, f)


def frame_derivatives(f, p, n: int) -> tuple[np.ndarray, np.ndarray]:
    """First frame derivatives of ``f``: ``(horizontal (4n,...), vertical (3,...))``."""
    pts = as_points(p)
    j = field_jet(f, pts, 1)
    grad = j.gradient()
    C = frame_data(n).matrix(pts)
    full = np.einsum("ak...,k...->a...", C, grad)
    return full[: 4 * n], full[4 * n :]


def horizontal_gradient(f, p, n: int) -> np.ndarray:
    """``(e_a f)(p)`` in the order ``T_1, X_1, Y_1, Z_1, T_2, ...``."""
    return frame_derivatives(f, p, n)[0]


def reeb_derivatives(f, p, n: int) -> np.ndarray:
    """``(xi_s f)(p)``, ``s = 1, 2, 3``."""
    return frame_derivatives(f, p, n)[1]


def grad_norm_sq(f, p, n: int) -> np.ndarray:
    g = horizontal_gradient(f, p, n)
    return np.sum(g * g, axis=0)


def full_hessian(f, p, n: int) -> np.ndarray:
    """``e_a(e_b f)`` for all ``4n+3`` frame fields; shape ``(d, d, *batch)``."""
    pts = as_points(p)
    j = field_jet(f, pts, 2)
    fd = frame_data(n)
    C = fd.matrix(pts)
    grad = j.gradient()
    hess = j.hessian()
    second = np.einsum("ak...,bl...,kl...->ab...", C, C, hess, optimize=True)
    # e_a(c_bk) = sum_l c_al C1[b, k, l]
    dcoef = np.einsum("al...,bkl->abk...", C, fd.C1, optimize=True)
    first = np.einsum("abk...,k...->ab...", dcoef, grad)
    return second + first


def horizontal_hessian(f, p, n: int) -> np.ndarray:
    """``H[a, b] = e_a(e_b f)`` on the horizontal frame; shape ``(4n, 4n, *batch)``.

    The antisymmetric part is ``-2 sum_s (xi_s f) omega_s``.
    """
    m = 4 * n
    return full_hessian(f, p, n)[:m, :m]


def sub_laplacian(f, p, n: int) -> np.ndarray:
    """``sum_alpha (T^2 + X^2 + Y^2 + Z^2) f``."""
    return np.trace(horizontal_hessian(f, p, n), axis1=0, axis2=1)
