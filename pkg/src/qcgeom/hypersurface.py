"""Real hypersurfaces ``{rho = 0}`` of ``H^{n+1}`` and the QC-hypersurface test.

The ambient space is ``R^{4n+4}`` with blocks ``(t, x, y, z)`` per quaternion
coordinate and the hypercomplex structure of :mod:`qcgeom.decomp`.  At a point
with unit normal ``N`` the horizontal space is the orthogonal complement of
``N, I_1 N, I_2 N, I_3 N`` (the largest ``I_j``-invariant subspace of the
tangent space).  The surface is QC when the second fundamental form
``II(X, Y) = -<D_X N, Y>`` restricted to it is ``I_j``-invariant and definite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .decomp import standard_triple
from .jets import Jet, ScalarField

__all__ = [
    "Hypersurface",
    "QC",
    "NOT_QC",
    "INCONCLUSIVE",
    "sphere",
    "ellipsoid",
    "plane",
    "deformed_sphere",
    "from_expression",
    "project_to_surface",
    "sample_points",
    "unit_normal",
    "horizontal_space",
    "second_fundamental_form",
    "second_fundamental_matrix",
    "qc_check",
    "hessian_criterion",
    "dtheta",
    "dtheta_relation_residual",
]

QC = "QC"
NOT_QC = "not-QC"
INCONCLUSIVE = "inconclusive"


@dataclass
class Hypersurface:
    """``{rho = 0}`` in ``H^{n+1}``; ``seed_radius`` guides point sampling."""

    rho: ScalarField
    n: int
    name: str = "surface"
    seed_radius: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rho.dim != 4 * self.n + 4:
            raise ValueError(f"defining function must live on R^{4 * self.n + 4}")


def _sum_sq(xs, idx):
    out = xs[idx[0]] * xs[idx[0]]
    for i in idx[1:]:
        out = out + xs[i] * xs[i]
    return out


def sphere(n: int, radius: float = 1.0) -> Hypersurface:
    d = 4 * n + 4
    return Hypersurface(
        ScalarField(lambda xs: _sum_sq(xs, range(d)) - radius**2, d, "sphere"), n, f"sphere(r={radius:g})", radius
    )


def ellipsoid(n: int, b) -> Hypersurface:
    """``sum_a |q^a|^2 / b_a = 1`` with one positive ``b_a`` per quaternion coordinate."""
    b = [float(v) for v in b]
    if len(b) != n + 1 or min(b) <= 0:
        raise ValueError(f"need {n + 1} positive semi-axis parameters")

    def rho(xs):
        out = -1.0
        for a, ba in enumerate(b):
            out = _sum_sq(xs, range(4 * a, 4 * a + 4)) * (1.0 / ba) + out
        return out

    return Hypersurface(ScalarField(rho, 4 * n + 4, "ellipsoid"), n, f"ellipsoid(b={tuple(b)})", float(np.sqrt(max(b))))


def plane(n: int, offset: float = 0.0) -> Hypersurface:
    """``t^1 = offset``."""
    return Hypersurface(ScalarField(lambda xs: xs[0] - offset, 4 * n + 4, "plane"), n, "plane(t1)", 1.0)


def deformed_sphere(n: int, kappa: float = 0.5) -> Hypersurface:
    """``|q|^2 + |p|^2 - 1 + kappa (t^1)^2``: the extra term singles out one real direction."""
    d = 4 * n + 4
    return Hypersurface(
        ScalarField(lambda xs: _sum_sq(xs, range(d)) - 1.0 + xs[0] * xs[0] * kappa, d, "deformed"),
        n,
        f"deformed_sphere(kappa={kappa:g})",
        1.0,
    )


def _variable_names(n: int) -> list[str]:
    return [f"{c}{a}" for a in range(1, n + 2) for c in "txyz"]


def from_expression(expr: str, n: int, name: str | None = None) -> Hypersurface:
    """Defining function from a formula in ``t1, x1, y1, z1, ..., t{n+1}, ..., z{n+1}``.

    The last quaternion may also be written ``pt, px, py, pz``.
    """
    import sympy

    names = _variable_names(n)
    syms = sympy.symbols(names)
    local = dict(zip(names, syms))
    for c, s in zip("txyz", syms[-4:]):
        local["p" + c] = s
    parsed = sympy.sympify(expr, locals=local)
    unknown = parsed.free_symbols - set(syms)
    if unknown:
        raise ValueError(f"unknown variables in expression: {sorted(map(str, unknown))}")
    fn = sympy.lambdify(syms, parsed, modules=[{"sqrt": lambda v: v**0.5, "exp": _exp}, "math"])
    return Hypersurface(ScalarField(lambda xs: fn(*xs), 4 * n + 4, expr), n, name or expr)


def _exp(v):
    return v.exp() if isinstance(v, Jet) else np.exp(v)


def project_to_surface(h: Hypersurface, points, iters: int = 50, tol: float = 1e-13) -> np.ndarray:
    """Newton steps along the gradient until ``|rho| < tol``."""
    x = np.array(points, dtype=float, copy=True)
    for _ in range(iters):
        j = h.rho.jet(x, 1)
        r = j.value
        if np.all(np.abs(r) < tol):
            break
        g = np.moveaxis(j.gradient(), 0, -1)
        x = x - (r / np.sum(g * g, axis=-1))[..., None] * g
    return x


def sample_points(h: Hypersurface, rng, m: int) -> np.ndarray:
    """``m`` points on the surface with ``|rho| < 1e-10``."""
    d = 4 * h.n + 4
    start = rng.normal(size=(m, d))
    start *= h.seed_radius / np.linalg.norm(start, axis=1, keepdims=True)
    pts = project_to_surface(h, start)
    bad = np.abs(h.rho(pts)) >= 1e-10
    if np.any(bad):
        raise RuntimeError(f"{int(bad.sum())} sample points failed to converge onto {h.name}")
    return pts


def _normal_jets(h: Hypersurface, p):
    """Order-1 jets of the unit normal field ``grad rho / |grad rho|``."""
    j = h.rho.jet(np.asarray(p, dtype=float), 2)
    grads = [j.diff(k) for k in range(j.dim)]
    norm2 = grads[0] * grads[0]
    for g in grads[1:]:
        norm2 = norm2 + g * g
    if np.any(norm2.value <= 1e-24):
        raise ValueError("degenerate defining function: d rho vanishes")
    inv = norm2 ** (-0.5)
    return [g * inv for g in grads]


def unit_normal(h: Hypersurface, p) -> np.ndarray:
    """``N`` at ``p``; shape ``(*batch, 4n+4)``."""
    return np.stack([nj.value for nj in _normal_jets(h, p)], axis=-1)


def horizontal_space(h: Hypersurface, p) -> np.ndarray:
    """Orthonormal basis of the horizontal space at a single point; shape ``(4n+4, 4n)``."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError("horizontal_space takes a single point")
    N = unit_normal(h, p)
    I = standard_triple(h.n + 1)
    rows = np.stack([N] + [Is @ N for Is in I])
    H = null_space(rows)
    if H.shape[1] != 4 * h.n:
        raise ValueError(f"horizontal space has dimension {H.shape[1]}, expected {4 * h.n}")
    return H


def second_fundamental_matrix(h: Hypersurface, p) -> np.ndarray:
    """``S[i, k] = -<D_{e_i} N, e_k>`` in ambient coordinates (single point).

    ``DN[i, k] = dN_i / dx_k``, so ``S = -DN^T``.
    """
    DN = np.stack([x.gradient() for x in _normal_jets(h, np.asarray(p, dtype=float))])
    return -DN.T


def second_fundamental_form(h: Hypersurface, p, X, Y) -> float:
    return float(np.asarray(X) @ second_fundamental_matrix(h, p) @ np.asarray(Y))


def _invariance_and_definiteness(B, H, n, tol):
    I = standard_triple(n + 1)
    worst_inv = 0.0
    for Is in I:
        A = H.T @ Is @ H
        worst_inv = max(worst_inv, float(np.max(np.abs(A.T @ B @ A - B))))
    eig = np.linalg.eigvalsh((B + B.T) / 2)
    return worst_inv, eig


def _verdict(results, tol):
    worst_inv = max(r[0] for r in results)
    if worst_inv > tol:
        return NOT_QC, worst_inv
    mins = [float(np.min(np.abs(e))) for _, e in results]
    if min(mins) <= tol:
        return INCONCLUSIVE, worst_inv
    signs = np.concatenate([np.sign(e) for _, e in results])
    return (QC if np.all(signs == signs[0]) else NOT_QC), worst_inv


def qc_check(h: Hypersurface, grid, tol: float = 1e-8):
    """``(verdict, worst invariance violation, min |eigenvalue| of II on H)``."""
    results = []
    for p in np.atleast_2d(np.asarray(grid, dtype=float)):
        H = horizontal_space(h, p)
        B = H.T @ second_fundamental_matrix(h, p) @ H
        results.append(_invariance_and_definiteness(B, H, h.n, tol))
    verdict, worst = _verdict(results, tol)
    return verdict, worst, min(float(np.min(np.abs(e))) for _, e in results)


def hessian_criterion(h: Hypersurface, grid, tol: float = 1e-8):
    """Same test on the ambient Hessian of ``rho`` restricted to ``H``."""
    results = []
    for p in np.atleast_2d(np.asarray(grid, dtype=float)):
        H = horizontal_space(h, p)
        B = H.T @ h.rho.jet(p, 2).hessian() @ H
        results.append(_invariance_and_definiteness(B, H, h.n, tol))
    verdict, worst = _verdict(results, tol)
    return verdict, worst, min(float(np.min(np.abs(e))) for _, e in results)


def dtheta(h: Hypersurface, p, j: int, X, Y) -> float:
    """``d theta_j(X, Y)`` for ``theta_j = <., I_j N>`` on constant extensions of ``X, Y``."""
    I = standard_triple(h.n + 1)[j - 1]
    nj = _normal_jets(h, p)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    # theta_j(V) = <V, I_j N>: a 1-form whose coefficients are jets
    coeff = [sum(I[k, i] * nj[i] for i in range(len(nj)) if I[k, i] != 0) for k in range(len(nj))]
    theta_Y = sum(Y[k] * coeff[k] for k in range(len(coeff)))
    theta_X = sum(X[k] * coeff[k] for k in range(len(coeff)))
    return float(X @ theta_Y.gradient() - Y @ theta_X.gradient())


def dtheta_relation_residual(h: Hypersurface, p, X, Y) -> float:
    """``d theta_1(I_1 X, Y) - II(I_1 X, I_1 Y) - II(X, Y)`` for horizontal ``X, Y``."""
    I1 = standard_triple(h.n + 1)[0]
    S = second_fundamental_matrix(h, p)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    lhs = dtheta(h, p, 1, I1 @ X, Y)
    return float(lhs - (I1 @ X) @ S @ (I1 @ Y) - X @ S @ Y)
