"""Infinitesimal automorphisms (QC vector fields) of the flat model.

A vector field ``Q`` is a QC field when ``L_Q Theta = (nu I + O) Theta`` with
``O`` in ``so(3)``.  Lie derivatives are computed with Cartan's formula
``L_Q Theta = Q -| dTheta + d(Theta(Q))`` from exact jets; an RK4 flow of
``Q`` and its linearisation serves as an independent check.

On the group ``xi_t -| dTheta_s = 0`` and ``dTheta_s = 2 g(I_s ., .)`` on the
horizontal space, which forces the horizontal part of a QC field with vertical
components ``f_s = Theta_s(Q)`` to be ``Q_H = 1/2 I_s grad f_s`` for every ``s``.
"""

from __future__ import annotations

import csv

import numpy as np

from .calculus import as_points, frame_derivatives
from .decomp import standard_triple
from .heis import center_index, contact_form, contact_form_polys, d_contact_form, dim, frame_data, full_frame
from .jets import Jet, ScalarField, coordinate_jets
from .quat import Quaternion

__all__ = [
    "VectorField",
    "TripleVectorField",
    "dilation_generator",
    "translation_generator",
    "rotation_generator",
    "right_rotation_generator",
    "qc_field_from_triple",
    "triple_of",
    "compatibility_residuals",
    "lie_derivative_eta",
    "qc_field_check",
    "QCFit",
    "flow_lie_derivative",
    "reconstruction_error",
    "dump_fit",
]


class VectorField:
    """Vector field on ``G(H)`` in coordinate components.

    ``fn(xs)`` receives coordinate jets and returns ``4n+3`` components
    (jets or plain numbers).
    """

    def __init__(self, fn, n: int, name: str = "Q"):
        self.fn = fn
        self.n = n
        self.dim = dim(n)
        self.name = name

    def jets(self, points, order: int) -> list[Jet]:
        pts = as_points(points)
        comps = self.fn(coordinate_jets(pts, order))
        return [c if isinstance(c, Jet) else Jet.constant(c, self.dim, order, pts.shape[:-1]) for c in comps]

    def __call__(self, points) -> np.ndarray:
        return np.stack([j.value for j in self.jets(points, 0)], axis=-1)

    def component(self, k: int) -> ScalarField:
        parent = self

        class _C(ScalarField):
            def jet(self, points, order):
                return parent.jets(points, order)[k]

        return _C(None, self.dim, name=f"{self.name}[{k}]")


def _center_slots(n):
    return [center_index(n, s) for s in (1, 2, 3)]


def dilation_generator(n: int) -> VectorField:
    """Generator of ``delta_r``: ``q d/dq + 2 w d/dw``."""
    m = 4 * n
    return VectorField(lambda xs: list(xs[:m]) + [2.0 * x for x in xs[m:]], n, "dilation")


def translation_generator(g0) -> VectorField:
    """Generator of ``p -> exp(s g0) o p``: ``(q0, w0 + 2 Im(q0 . conj(q)))``."""
    g0 = np.asarray(g0, dtype=float)
    n = (g0.size - 3) // 4

    def fn(xs):
        cross = Quaternion()
        for a in range(n):
            q0 = Quaternion(*g0[4 * a : 4 * a + 4])
            q = Quaternion(*xs[4 * a : 4 * a + 4])
            cross = cross + q0 * q.conj()
        return [float(v) for v in g0[: 4 * n]] + [g0[4 * n + s] + 2.0 * c for s, c in enumerate((cross.x, cross.y, cross.z))]

    return VectorField(fn, n, "translation")


def rotation_generator(n: int, tau) -> VectorField:
    """Generator of ``(q, w) -> (sigma q, sigma w conj(sigma))``, ``sigma = exp(s tau)``.

    ``tau`` is an imaginary quaternion ``(x, y, z)``; the field is
    ``(tau q, tau w - w tau)``.
    """
    tq = Quaternion(0.0, *np.asarray(tau, dtype=float))

    def fn(xs):
        out = []
        for a in range(n):
            out.extend((tq * Quaternion(*xs[4 * a : 4 * a + 4])).coeffs())
        w = Quaternion(0.0, *xs[4 * n :])
        c = tq * w - w * tq
        return out + [c.x, c.y, c.z]

    return VectorField(fn, n, "rotation")


def right_rotation_generator(n: int, tau) -> VectorField:
    """Generator of ``(q, w) -> (q conj(sigma), sigma w conj(sigma))``: ``(-q tau, tau w - w tau)``."""
    tq = Quaternion(0.0, *np.asarray(tau, dtype=float))

    def fn(xs):
        out = []
        for a in range(n):
            out.extend((-(Quaternion(*xs[4 * a : 4 * a + 4]) * tq)).coeffs())
        w = Quaternion(0.0, *xs[4 * n :])
        c = tq * w - w * tq
        return out + [c.x, c.y, c.z]

    return VectorField(fn, n, "right-rotation")


def _theta_of(Q: VectorField, points, order):
    """Jets of ``Theta_s(Q)``, s = 1..3."""
    pts = as_points(points)
    xs = coordinate_jets(pts, order)
    qj = Q.jets(pts, order)
    rows = contact_form_polys(Q.n)
    out = []
    for s in range(3):
        total = Jet.constant(0.0, Q.dim, order, pts.shape[:-1])
        for k, poly in enumerate(rows[s]):
            if not poly.is_zero():
                total = total + qj[k] * poly(xs)
        out.append(total)
    return out


def triple_of(Q: VectorField) -> tuple[ScalarField, ScalarField, ScalarField]:
    """``f_s = Theta_s(Q)`` as fields."""

    def make(s):
        class _F(ScalarField):
            def jet(self, points, order):
                return _theta_of(Q, points, order)[s]

        return _F(None, Q.dim, name=f"Theta{s + 1}({Q.name})")

    return tuple(make(s) for s in range(3))


class TripleVectorField(VectorField):
    """``Q = 1/2 I_i grad f_i + sum_s f_s xi_s`` built from a function triple."""

    def __init__(self, f1: ScalarField, f2: ScalarField, f3: ScalarField, i: int = 1):
        n = (f1.dim - 3) // 4
        super().__init__(None, n, name=f"Q({f1.name},{f2.name},{f3.name})")
        self.fs = (f1, f2, f3)
        self.i = i

    def jets(self, points, order):
        pts = as_points(points)
        n = self.n
        fj = [f.jet(pts, order + 1) for f in self.fs]
        xs = coordinate_jets(pts, order)
        fd = frame_data(n)
        ops = full_frame(n)[: 4 * n]
        fi = fj[self.i - 1]
        grad = []
        for op in ops:
            g = Jet.constant(0.0, self.dim, order, pts.shape[:-1])
            for k, poly in op.coeffs.items():
                g = g + fi.diff(k) * poly(xs)
            grad.append(g)
        I = standard_triple(n)[self.i - 1]
        hor = [sum((grad[b] * (0.5 * I[a, b]) for b in range(4 * n) if I[a, b] != 0), Jet.constant(0.0, self.dim, order, pts.shape[:-1])) for a in range(4 * n)]
        comps = [Jet.constant(0.0, self.dim, order, pts.shape[:-1]) for _ in range(self.dim)]
        for a, op in enumerate(ops):
            for k, poly in op.coeffs.items():
                comps[k] = comps[k] + hor[a] * poly(xs)
        for s, k in enumerate(_center_slots(n)):
            comps[k] = comps[k] + fj[s].truncate(order) * fd.C0[4 * n + s, k]
        return comps


def qc_field_from_triple(f1, f2, f3, i: int = 1) -> TripleVectorField:
    return TripleVectorField(f1, f2, f3, i)


def compatibility_residuals(f1, f2, f3, p) -> dict:
    """Residuals of the conditions a triple must satisfy to come from a QC field.

    * ``horizontal``: ``max |I_1 grad f_1 - I_s grad f_s|`` over ``s = 2, 3``;
    * ``o_ii``: spread of the diagonal of ``M[i, j] = xi_j f_i + sum_t f_t dTheta_i(xi_t, xi_j)``;
    * ``o_ij``: ``max |M[i, j] + M[j, i]|`` for ``i != j``.
    """
    pts = as_points(p)
    n = (np.shape(pts)[-1] - 3) // 4
    I = standard_triple(n)
    fs = (f1, f2, f3)
    hor, ver, vals = [], [], []
    for f in fs:
        h, v = frame_derivatives(f.jet(pts, 1), pts, n)
        hor.append(h)
        ver.append(v)
        vals.append(f.jet(pts, 0).value)
    ig = [np.einsum("ab,b...->a...", I[s], hor[s]) for s in range(3)]
    horizontal = np.max(np.abs(np.stack([ig[0] - ig[1], ig[0] - ig[2]])), axis=(0, 1))
    dT = d_contact_form(n)
    C0 = frame_data(n).C0
    xi = C0[4 * n :]
    M = np.zeros((3, 3) + pts.shape[:-1])
    for i in range(3):
        for j in range(3):
            M[i, j] = ver[i][j] + sum(vals[t] * (xi[t] @ dT[i] @ xi[j]) for t in range(3))
    diag = np.stack([M[0, 0], M[1, 1], M[2, 2]])
    o_ii = np.max(diag, axis=0) - np.min(diag, axis=0)
    o_ij = np.max(np.abs(np.stack([M[0, 1] + M[1, 0], M[0, 2] + M[2, 0], M[1, 2] + M[2, 1]])), axis=0)
    return {"horizontal": horizontal, "o_ii": o_ii, "o_ij": o_ij}


def lie_derivative_eta(Q: VectorField, p, v=None) -> np.ndarray:
    """``(L_Q Theta_s)(e_k)`` as ``(3, d, *batch)``, or ``(3, *batch)`` when applied to ``v``."""
    pts = as_points(p)
    qj = Q.jets(pts, 1)
    Qv = np.stack([j.value for j in qj])  # (d, *batch)
    dT = d_contact_form(Q.n)
    interior = np.einsum("l...,slk->sk...", Qv, dT)  # dTheta(Q, e_k)
    th = _theta_of(Q, pts, 1)
    exact = np.stack([t.gradient() for t in th])  # d(Theta(Q))(e_k)
    L = interior + exact
    if v is None:
        return L
    return np.einsum("sk...,...k->s...", L, np.asarray(v, dtype=float))


class QCFit:
    """Per-point fit ``L_Q Theta = M Theta`` with ``M = nu I + O``."""

    def __init__(self, M, residual, cond):
        self.M = M  # (*batch, 3, 3)
        self.nu = np.trace(M, axis1=-2, axis2=-1) / 3
        self.O = M - self.nu[..., None, None] * np.eye(3)
        self.residual = residual
        self.cond = cond

    @property
    def antisymmetry(self):
        return np.max(np.abs(self.O + np.swapaxes(self.O, -1, -2)), axis=(-2, -1))


def qc_field_check(Q: VectorField, grid, tol: float = 1e-9):
    """``(verdict, fit)``: least-squares fit of ``nu, O`` at every grid point."""
    pts = as_points(grid)
    L = np.moveaxis(lie_derivative_eta(Q, pts), (0, 1), (-2, -1))  # (*batch, 3, d)
    Th = np.moveaxis(contact_form(pts, Q.n), (0, 1), (-2, -1))
    G = Th @ np.swapaxes(Th, -1, -2)
    M = L @ np.swapaxes(Th, -1, -2) @ np.linalg.inv(G)
    resid = np.max(np.abs(L - M @ Th), axis=(-2, -1))
    fit = QCFit(M, resid, np.linalg.cond(Th))
    ok = bool(np.all(resid <= tol) and np.all(fit.antisymmetry <= tol))
    return ok, fit


def _rk4(Q: VectorField, x, V, h):
    def rhs(x, V):
        js = Q.jets(x, 1)
        val = np.stack([j.value for j in js], axis=-1)
        J = np.moveaxis(np.stack([j.gradient() for j in js]), (0, 1), (-2, -1))  # (*batch, d, d)
        return val, np.einsum("...ij,...j->...i", J, V)

    k1 = rhs(x, V)
    k2 = rhs(x + h / 2 * k1[0], V + h / 2 * k1[1])
    k3 = rhs(x + h / 2 * k2[0], V + h / 2 * k2[1])
    k4 = rhs(x + h * k3[0], V + h * k3[1])
    return (
        x + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        V + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
    )


def flow_lie_derivative(Q: VectorField, p, v, h: float = 1e-5, steps: int = 1) -> np.ndarray:
    """``d/ds (phi_s^* Theta)(v)`` at ``s = 0`` by central differences of an RK4 flow."""
    pts = as_points(p)
    v = np.broadcast_to(np.asarray(v, dtype=float), pts.shape)
    vals = []
    for sign in (+1, -1):
        x, V = pts, v
        for _ in range(steps):
            x, V = _rk4(Q, x, V, sign * h / steps)
        vals.append(np.einsum("sk...,...k->s...", contact_form(x, Q.n), V))
    return (vals[0] - vals[1]) / (2 * h)


def reconstruction_error(Q: VectorField, p, i: int = 1) -> np.ndarray:
    """``max |Q - Q(Theta_1(Q), Theta_2(Q), Theta_3(Q))|`` over coordinates."""
    R = qc_field_from_triple(*triple_of(Q), i=i)
    return np.max(np.abs(Q(p) - R(p)), axis=-1)


def dump_fit(path, points, fit: QCFit) -> None:
    """CSV with one row per point: coordinates, nu, O entries, residual."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = pts.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"p{k}" for k in range(d)] + ["nu"] + [f"O{a}{b}" for a in range(3) for b in range(3)] + ["residual"])
        nu = np.atleast_1d(fit.nu)
        O = fit.O.reshape(-1, 3, 3)
        res = np.atleast_1d(fit.residual)
        for k in range(len(pts)):
            w.writerow([repr(float(x)) for x in pts[k]] + [repr(float(nu[k]))] + [repr(float(x)) for x in O[k].ravel()] + [repr(float(res[k]))])
