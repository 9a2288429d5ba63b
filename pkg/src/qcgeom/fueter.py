"""Fueter-type operators on ``H^n`` and on the quaternionic Heisenberg group.

On ``H^n`` with coordinates ``q^alpha = t + x i + y j + z k``::

    D_alpha F     = dF/dt - i dF/dx - j dF/dy - k dF/dz      (anti-regular: D F = 0)
    Dbar_alpha F  = dF/dt + i dF/dx + j dF/dy + k dF/dz      (regular: Dbar F = 0)

with the imaginary units multiplying from the left.  On the group the
coordinate derivatives are replaced by the frame ``T, X, Y, Z``.

A real function is Q-pluriharmonic when it is the real part of an
anti-regular function; :func:`complete_to_antiregular` builds that function
by a radial integral evaluated with 64-point Gauss-Legendre quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import as_points, field_jet, frame_derivatives, full_hessian
from .decomp import standard_triple
from .heis import _n_from_dim
from .polyspace import kernel_basis, monomials, poly_field
from .jets import MAX_ORDER, Jet, JetOrderError, ScalarField, constant_field, coordinate_jets
from .quat import BASIS, Quaternion

__all__ = [
    "FLAT",
    "HEISENBERG",
    "QuaternionField",
    "dirac",
    "dirac_bar",
    "is_regular",
    "is_anti_regular",
    "pluriharmonic_residual",
    "pluriharmonic_residuals",
    "dd_operator",
    "dd_matrix",
    "dd_matrix_forms",
    "completion_field",
    "complete_to_antiregular",
    "anti_crf_residual",
    "crf_system_residual",
    "crf_lambda",
    "crf_identities",
    "anti_crf_witnesses",
    "pluriharmonic_basis",
    "GAUSS_NODES",
]

FLAT = "flat"
HEISENBERG = "heisenberg"
GAUSS_NODES = 64


@dataclass(frozen=True)
class QuaternionField:
    """``F = f + i w + j u + k v`` with real component fields."""

    f: ScalarField
    w: ScalarField
    u: ScalarField
    v: ScalarField
    domain: str = FLAT

    def __post_init__(self):
        if self.domain not in (FLAT, HEISENBERG):
            raise ValueError(f"domain must be {FLAT!r} or {HEISENBERG!r}")
        dims = {c.dim for c in self.components}
        if len(dims) != 1:
            raise ValueError("components live on different spaces")
        d = dims.pop()
        if self.domain == FLAT and d % 4:
            raise ValueError("flat domain needs dimension 4n")
        if self.domain == HEISENBERG:
            _n_from_dim(d)

    @classmethod
    def from_real(cls, f: ScalarField, domain: str = FLAT) -> "QuaternionField":
        zero = constant_field(0.0, f.dim)
        return cls(f, zero, zero, zero, domain)

    @property
    def components(self):
        return (self.f, self.w, self.u, self.v)

    @property
    def dim(self) -> int:
        return self.f.dim

    @property
    def n(self) -> int:
        return self.dim // 4 if self.domain == FLAT else _n_from_dim(self.dim)

    def jets(self, points, order):
        return [c.jet(points, order) for c in self.components]

    def __call__(self, points) -> Quaternion:
        pts = as_points(points)
        return Quaternion(*[c.jet(pts, 0).value for c in self.components])

    def __mul__(self, other: "QuaternionField") -> "QuaternionField":
        """Pointwise quaternion product (left to right)."""
        if self.domain != other.domain:
            raise ValueError("fields on different domains")
        return _ProductField.build(self, other)


class _ProductField:
    @staticmethod
    def build(a: QuaternionField, b: QuaternionField) -> QuaternionField:
        def comp(idx):
            class _C(ScalarField):
                def jet(self, points, order):
                    qa = Quaternion(*a.jets(points, order))
                    qb = Quaternion(*b.jets(points, order))
                    return (qa * qb).coeffs()[idx]

            return _C(None, a.dim, name=f"({idx})")

        return QuaternionField(comp(0), comp(1), comp(2), comp(3), a.domain)


def _require(F: QuaternionField, domain: str):
    if F.domain != domain:
        raise ValueError(f"operator needs a field on the {domain} domain, got {F.domain}")


def _quat_partials(F, p, order=1):
    """``dF/dx_k`` for every coordinate, as quaternions with array coefficients."""
    pts = as_points(p)
    grads = [field_jet(c, pts, order).gradient() for c in F.components]
    return [Quaternion(*(g[k] for g in grads)) for k in range(F.dim)]


def _dirac_generic(parts, sign):
    t, x, y, z = parts
    return t + sign * (BASIS[1] * x + BASIS[2] * y + BASIS[3] * z)


def dirac(F: QuaternionField, alpha: int, p) -> Quaternion:
    """``D_alpha F`` (1-based ``alpha``)."""
    _require(F, FLAT)
    parts = _quat_partials(F, p)
    return _dirac_generic(parts[4 * (alpha - 1) : 4 * alpha], -1)


def dirac_bar(F: QuaternionField, alpha: int, p) -> Quaternion:
    """``Dbar_alpha F`` (1-based ``alpha``)."""
    _require(F, FLAT)
    parts = _quat_partials(F, p)
    return _dirac_generic(parts[4 * (alpha - 1) : 4 * alpha], +1)


def _worst(F, points, sign):
    pts = as_points(points)
    parts = _quat_partials(F, pts)
    worst = np.zeros(pts.shape[:-1])
    for a in range(F.n):
        r = _dirac_generic(parts[4 * a : 4 * a + 4], sign)
        worst = np.maximum(worst, np.max(np.abs(np.stack(np.broadcast_arrays(*r.coeffs()))), axis=0))
    return worst


def is_regular(F: QuaternionField, grid, tol: float = 1e-10):
    """``(verdict, worst residual)`` for ``Dbar_alpha F = 0`` on every grid point."""
    _require(F, FLAT)
    worst = float(np.max(_worst(F, grid, +1)))
    return worst <= tol, worst


def is_anti_regular(F: QuaternionField, grid, tol: float = 1e-10):
    """``(verdict, worst residual)`` for ``D_alpha F = 0`` on every grid point."""
    _require(F, FLAT)
    worst = float(np.max(_worst(F, grid, -1)))
    return worst <= tol, worst


# --- second order operators on real functions ---------------------------------
_CONJ = [q.conj() for q in BASIS]


def _second_quaternion(hess, a, b, kind):
    """``D_a Dbar_b f`` (kind "Q") or ``Dbar_b D_a f`` (kind "Qbar") from a Hessian."""
    out = Quaternion()
    for d in range(4):
        for c in range(4):
            h = hess[4 * a + d, 4 * b + c]
            unit = _CONJ[d] * BASIS[c] if kind == "Q" else BASIS[c] * _CONJ[d]
            out = out + unit * h
    return out


def pluriharmonic_residual(f, alpha: int, beta: int, p, kind: str = "Q") -> Quaternion:
    """``D_alpha Dbar_beta f`` (kind ``"Q"``) or ``Dbar_beta D_alpha f`` (kind ``"Qbar"``)."""
    if kind not in ("Q", "Qbar"):
        raise ValueError("kind must be 'Q' or 'Qbar'")
    pts = as_points(p)
    hess = field_jet(f, pts, 2).hessian()
    return _second_quaternion(hess, alpha - 1, beta - 1, kind)


def pluriharmonic_residuals(f, p, kind: str = "Q"):
    """Max over alpha, beta and quaternion components."""
    pts = as_points(p)
    hess = field_jet(f, pts, 2).hessian()
    n = f.dim // 4 if not isinstance(f, Jet) else f.dim // 4
    worst = np.zeros(pts.shape[:-1])
    for a in range(n):
        for b in range(n):
            q = _second_quaternion(hess, a, b, kind)
            worst = np.maximum(worst, np.max(np.abs(np.stack(np.broadcast_arrays(*q.coeffs()))), axis=0))
    return worst


def _d_of_pullback(hess, A):
    """``d`` of the 1-form ``Y -> df(A Y)`` on constant (or parallel) fields."""
    HA = np.einsum("ac...,cb->ab...", hess, A)
    return HA - np.swapaxes(HA, 0, 1)


def _I_two_form(I, phi):
    """``(I phi)(X, Y) = phi(I X, I Y)``."""
    return np.einsum("ca,cd...,db->ab...", I, phi, I)


def dd_matrix_forms(hess, i: int, n: int):
    """``dd_i f + d_j d_k f`` from the form definitions, step by step."""
    I = standard_triple(n)
    i0 = i - 1
    j0, k0 = (i0 + 1) % 3, (i0 + 2) % 3
    # d_i f = I_i df : Y -> -df(I_i Y)
    dd_i = _d_of_pullback(hess, -I[i0])
    # I_j (I_k df) : X -> -(I_k df)(I_j X) = df(I_k I_j X); then d, then d_j = -I_j d I_j
    inner = _d_of_pullback(hess, I[k0] @ I[j0])
    d_jd_k = -_I_two_form(I[j0], inner)
    return dd_i + d_jd_k


def dd_matrix(hess, i: int, n: int):
    """``DD_{I_i} f = dd_i f - I_j dd_i f`` as a matrix on the frame."""
    I = standard_triple(n)
    i0 = i - 1
    j0 = (i0 + 1) % 3
    phi = _d_of_pullback(hess, -I[i0])
    return phi - _I_two_form(I[j0], phi)


def dd_operator(f, i: int, X, Y, p, domain: str = FLAT):
    """The two-form ``DD_{I_i} f`` evaluated on vectors ``X, Y`` of the (horizontal) frame basis.

    On the group only horizontal pairs are used and vertical terms dropped.
    """
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")
    pts = as_points(p)
    if domain == FLAT:
        n = pts.shape[-1] // 4
        hess = field_jet(f, pts, 2).hessian()
    elif domain == HEISENBERG:
        n = _n_from_dim(pts.shape[-1])
        hess = full_hessian(field_jet(f, pts, 2), pts, n)[: 4 * n, : 4 * n]
    else:
        raise ValueError(f"unknown domain {domain!r}")
    M = dd_matrix(hess, i, n)
    return np.einsum("a,ab...,b->...", np.asarray(X, dtype=float), M, np.asarray(Y, dtype=float))


# --- completion of a pluriharmonic function --------------------------------------
def _gauss01(m=GAUSS_NODES):
    x, w = np.polynomial.legendre.leggauss(m)
    return (x + 1) / 2, w / 2


class _CompletionComponent(ScalarField):
    def __init__(self, f, comp):
        super().__init__(None, f.dim, name=f"completion[{comp}]({f.name})")
        self.f = f
        self.comp = comp

    def jet(self, points, order):
        pts = np.asarray(points, dtype=float)
        if order + 1 > MAX_ORDER:
            raise JetOrderError(f"completion to order {order} needs the input field to order {order + 1}")
        n = self.dim // 4
        xs = coordinate_jets(pts, order)
        if self.comp == 0:
            return self.f.jet(pts, order)
        nodes, weights = _gauss01()
        total = Jet.constant(0.0, self.dim, order, pts.shape[:-1])
        for s, wgt in zip(nodes, weights):
            js = self.f.jet(s * pts, order + 1)
            for b in range(n):
                parts = [js.diff(4 * b + c).scale_variables(s) for c in range(4)]
                dbar = _dirac_generic(parts, +1)
                qb = Quaternion(*xs[4 * b : 4 * b + 4]).conj()
                total = total + (dbar * qb).coeffs()[self.comp] * (s * s * wgt)
        return total


def completion_field(f: ScalarField) -> QuaternionField:
    """``F = f + Im sum_beta int_0^1 s^2 (Dbar_beta f)(s q) conj(q^beta) ds``."""
    if f.dim % 4:
        raise ValueError("completion is defined on H^n (dimension 4n)")
    return QuaternionField(*(_CompletionComponent(f, c) for c in range(4)), domain=FLAT)


def complete_to_antiregular(f: ScalarField, p) -> Quaternion:
    """Value at ``p`` of the anti-regular function with real part ``f``."""
    return completion_field(f)(p)


# --- anti-CRF functions on the group ---------------------------------------------
def _frame_quats(F, p):
    pts = as_points(p)
    n = F.n
    hor, ver = zip(*(frame_derivatives(field_jet(c, pts, 1), pts, n) for c in F.components))
    horq = [Quaternion(*(h[a] for h in hor)) for a in range(4 * n)]
    verq = [Quaternion(*(v[s] for v in ver)) for s in range(3)]
    return horq, verq


def anti_crf_residual(F: QuaternionField, alpha: int, p) -> Quaternion:
    """``D_{T_alpha} F = T F - i X F - j Y F - k Z F``."""
    _require(F, HEISENBERG)
    horq, _ = _frame_quats(F, p)
    return _dirac_generic(horq[4 * (alpha - 1) : 4 * alpha], -1)


def crf_system_residual(F: QuaternionField, p):
    """All ``4n`` real equations of the anti-CRF system stacked; shape ``(4n * 4, ...)``."""
    _require(F, HEISENBERG)
    horq, _ = _frame_quats(F, p)
    rows = []
    for a in range(F.n):
        r = _dirac_generic(horq[4 * a : 4 * a + 4], -1)
        rows.extend(np.broadcast_arrays(*r.coeffs()))
    return np.stack(rows)


def crf_lambda(F: QuaternionField, p):
    """``lambda = 4 (xi_1 w + xi_2 u + xi_3 v)``."""
    _require(F, HEISENBERG)
    pts = as_points(p)
    n = F.n
    xis = [frame_derivatives(field_jet(c, pts, 1), pts, n)[1] for c in (F.w, F.u, F.v)]
    return 4 * (xis[0][0] + xis[1][1] + xis[2][2])


def crf_identities(F: QuaternionField, p, factor: float = 1.0):
    """Second-order identities for the real part of an anti-CRF function.

    Returns ``(hessian_residual, quaternion_residual, lambda)`` where

    * ``hessian_residual[beta, alpha] = sum_c E^c_beta E^c_alpha f - factor * lambda * delta``
      with ``E = (T, X, Y, Z)``;
    * ``quaternion_residual[beta, alpha]`` is the largest component of
      ``D_{T_beta} Dbar_{T_alpha} f - lambda (g - i w1 - j w2 - k w3)(T_beta, T_alpha)``.
    """
    _require(F, HEISENBERG)
    pts = as_points(p)
    n = F.n
    lam = crf_lambda(F, pts)
    hess = full_hessian(field_jet(F.f, pts, 2), pts, n)[: 4 * n, : 4 * n]
    batch = pts.shape[:-1]
    hres = np.zeros((n, n) + batch)
    qres = np.zeros((n, n) + batch)
    om = [I.T for I in standard_triple(n)]
    for b in range(n):
        for a in range(n):
            s = sum(hess[4 * b + c, 4 * a + c] for c in range(4))
            hres[b, a] = s - factor * lam * (a == b)
            # D_{T_b} Dbar_{T_a} f = sum_{d,c} conj(e_d) e_c E^d_b E^c_a f
            q = Quaternion()
            for d in range(4):
                for c in range(4):
                    q = q + (_CONJ[d] * BASIS[c]) * hess[4 * b + d, 4 * a + c]
            tb, ta = 4 * b, 4 * a
            target = Quaternion(
                lam * float(a == b), -lam * om[0][tb, ta], -lam * om[1][tb, ta], -lam * om[2][tb, ta]
            )
            diff = q - target
            qres[b, a] = np.max(np.abs(np.stack(np.broadcast_arrays(*diff.coeffs()))), axis=0)
    return hres, qres, lam


# --- linear-solve oracles ----------------------------------------------------------
def _sample_grid(rng, dim, count):
    return rng.uniform(-1.5, 1.5, size=(count, dim))


def anti_crf_witnesses(n: int, degree: int = 2, rng=None, samples: int | None = None):
    """Orthonormal coefficient basis of polynomial anti-CRF functions on the group.

    Returns ``(basis, build)``: ``basis`` has shape ``(4 * m, k)`` for the ``m``
    monomials of degree ``<= degree`` and ``build(coeffs)`` turns one column
    (or any combination) into a :class:`QuaternionField`.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    d = 4 * n + 3
    monos = monomials(d, degree)
    m = len(monos)
    pts = _sample_grid(rng, d, samples or max(8, (4 * m) // (4 * n) + 8))
    zero = constant_field(0.0, d)

    def build(coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        comps = [poly_field(coeffs[c * m : (c + 1) * m], monos, d, name=f"crf[{c}]") for c in range(4)]
        return QuaternionField(*comps, domain=HEISENBERG)

    cols = {}
    for c in range(4):
        for k in range(m):
            e = np.zeros(m)
            e[k] = 1.0
            parts = [zero] * 4
            parts[c] = poly_field(e, monos, d)
            cols[c * m + k] = np.ravel(crf_system_residual(QuaternionField(*parts, domain=HEISENBERG), pts))
    basis = kernel_basis(lambda x: sum(x[i] * cols[i] for i in np.flatnonzero(x)), 4 * m)
    return basis, build


def pluriharmonic_basis(n: int, degree: int = 3, rng=None, samples: int | None = None):
    """Coefficient basis of Q-pluriharmonic polynomials of degree ``<= degree`` on ``H^n``.

    Returns ``(basis, monos)``; a column combined with :func:`poly_field` is pluriharmonic.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    d = 4 * n
    monos = monomials(d, degree)
    pts = _sample_grid(rng, d, samples or max(8, len(monos) // (4 * n * n) + 8))
    cols = []
    for k in range(len(monos)):
        e = np.zeros(len(monos))
        e[k] = 1.0
        hess = field_jet(poly_field(e, monos, d), pts, 2).hessian()
        rows = []
        for a in range(n):
            for b in range(n):
                rows.extend(np.broadcast_arrays(*_second_quaternion(hess, a, b, "Q").coeffs()))
        cols.append(np.ravel(np.stack(rows)))
    A = np.stack(cols, axis=1)
    return kernel_basis(lambda x: A @ x, len(monos)), monos
