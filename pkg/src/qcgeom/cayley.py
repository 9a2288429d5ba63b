"""Cayley transform between the sphere ``|q|^2 + |p|^2 = 1`` in ``H^{n+1}`` and the group.

Ambient points are arrays ``[q^1 (4), ..., q^n (4), p (4)]`` of length
``4n + 4``.  The transform

    q' = (1 + p)^{-1} q,     p' = (1 + p)^{-1} (1 - p)

lands on the boundary ``Re p' = |q'|^2`` of the Siegel domain, which is
identified with the group through ``(q', w') = (q', -Im p')``.
"""

from __future__ import annotations

import csv

import numpy as np

from .heis import contact_form
from .jets import coordinate_jets
from .quat import Quaternion

__all__ = [
    "random_sphere_points",
    "random_tangents",
    "sphere_constraint",
    "siegel_constraint",
    "cayley",
    "inverse_cayley",
    "siegel_to_group",
    "group_to_siegel",
    "cayley_to_group",
    "cayley_jacobian",
    "sphere_contact_form",
    "group_contact_quaternion",
    "lam",
    "conformality_residual",
    "reciprocal_residual",
    "dump_pairs",
]

POLE_TOL = 1e-12


def _split(arr):
    arr = np.asarray(arr)
    n = arr.shape[-1] // 4 - 1
    qs = [Quaternion(*(arr[..., 4 * a + c] for c in range(4))) for a in range(n)]
    p = Quaternion(*(arr[..., 4 * n + c] for c in range(4)))
    return qs, p


def _join(qs, p):
    comps = []
    for q in list(qs) + [p]:
        comps.extend(np.broadcast_arrays(*map(np.asarray, q.coeffs())))
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def random_sphere_points(rng, n: int, m: int, min_pole_distance: float = 1e-3) -> np.ndarray:
    """Uniform points on ``S^{4n+3}`` (normalised Gaussians), away from ``p = -1``."""
    out = np.empty((0, 4 * n + 4))
    while len(out) < m:
        x = rng.normal(size=(m, 4 * n + 4))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        onep = x[:, 4 * n :].copy()
        onep[:, 0] += 1
        out = np.concatenate([out, x[np.linalg.norm(onep, axis=1) > min_pole_distance]])
    return out[:m]


def random_tangents(rng, points) -> np.ndarray:
    """Random ambient vectors projected to the tangent spaces of the sphere."""
    pts = np.asarray(points, dtype=float)
    v = rng.normal(size=pts.shape)
    return v - np.sum(v * pts, axis=-1, keepdims=True) * pts


def sphere_constraint(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return np.sum(s * s, axis=-1) - 1.0


def siegel_constraint(z) -> np.ndarray:
    """``Re p' - |q'|^2``."""
    z = np.asarray(z, dtype=float)
    return z[..., -4] - np.sum(z[..., :-4] ** 2, axis=-1)


def _check_pole(p: Quaternion):
    n2 = np.asarray((p + 1.0).norm_sq(), dtype=float)
    if np.any(n2 <= POLE_TOL):
        raise ValueError("point at the pole: 1 + p is not invertible")


def _cayley_quats(qs, p):
    inv = (p + 1.0).inverse()
    return [inv * q for q in qs], inv * (1.0 - p)


def cayley(s) -> np.ndarray:
    """Sphere (ambient) point(s) to Siegel point(s) ``[q', p']``."""
    qs, p = _split(np.asarray(s, dtype=float))
    _check_pole(p)
    return _join(*_cayley_quats(qs, p))


def inverse_cayley(z) -> np.ndarray:
    """``q = 2 (1 + p')^{-1} q'``, ``p = (1 + p')^{-1} (1 - p')``."""
    qs, p = _split(np.asarray(z, dtype=float))
    _check_pole(p)
    inv = (p + 1.0).inverse()
    return _join([2.0 * (inv * q) for q in qs], inv * (1.0 - p))


def siegel_to_group(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return np.concatenate([z[..., :-4], -z[..., -3:]], axis=-1)


def group_to_siegel(g) -> np.ndarray:
    """Inverse of :func:`siegel_to_group`: ``p' = |q'|^2 - w'``."""
    g = np.asarray(g, dtype=float)
    re = np.sum(g[..., :-3] ** 2, axis=-1, keepdims=True)
    return np.concatenate([g[..., :-3], re, -g[..., -3:]], axis=-1)


def cayley_to_group(s) -> np.ndarray:
    return siegel_to_group(cayley(s))


def cayley_jacobian(s) -> np.ndarray:
    """Jacobian of sphere -> group coordinates; shape ``(*batch, 4n+3, 4n+4)``."""
    s = np.asarray(s, dtype=float)
    xs = coordinate_jets(s, 1)
    n = s.shape[-1] // 4 - 1
    qs = [Quaternion(*xs[4 * a : 4 * a + 4]) for a in range(n)]
    p = Quaternion(*xs[4 * n : 4 * n + 4])
    qn, pn = _cayley_quats(qs, p)
    out = []
    for q in qn:
        out.extend(q.coeffs())
    out.extend(-c for c in (pn.x, pn.y, pn.z))
    J = np.stack([j.gradient() for j in out])  # (4n+3, 4n+4, *batch)
    return np.moveaxis(np.moveaxis(J, 0, -1), 0, -1)


def _qarr(q: Quaternion) -> np.ndarray:
    return np.stack(np.broadcast_arrays(*map(np.asarray, q.coeffs())), axis=-1)


def sphere_contact_form(s, v) -> np.ndarray:
    """``eta(v) = dq.conj(q) + dp.conj(p) - q.conj(dq) - p.conj(dp)`` as ``[0, x, y, z]`` arrays."""
    qs, p = _split(np.asarray(s, dtype=float))
    dqs, dp = _split(np.asarray(v, dtype=float))
    total = dp * p.conj() - p * dp.conj()
    for q, dq in zip(qs, dqs):
        total = total + dq * q.conj() - q * dq.conj()
    return _qarr(total)


def group_contact_quaternion(g, w) -> np.ndarray:
    """``Theta(w) = Theta_1(w) i + Theta_2(w) j + Theta_3(w) k`` at group point(s) ``g``."""
    g = np.asarray(g, dtype=float)
    th = contact_form(g)  # (3, d, *batch)
    vals = np.einsum("sk...,...k->...s", th, np.asarray(w, dtype=float))
    return np.concatenate([np.zeros(vals.shape[:-1] + (1,)), vals], axis=-1)


def lam(s) -> np.ndarray:
    """``lambda = |1 + p| (1 + p)^{-1}`` as quaternion arrays."""
    _, p = _split(np.asarray(s, dtype=float))
    onep = p + 1.0
    return _qarr(onep.inverse() * onep.norm())


def conformality_residual(s, v, return_parts: bool = False):
    """``|2 (C^* Theta)(v) - |1+p|^{-2} lambda eta(v) conj(lambda)|``."""
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    _, p = _split(s)
    _check_pole(p)
    g = cayley_to_group(s)
    J = cayley_jacobian(s)
    w = np.einsum("...ij,...j->...i", J, v)
    lhs = 2 * group_contact_quaternion(g, w)
    L = Quaternion.from_array(lam(s))
    eta = Quaternion.from_array(sphere_contact_form(s, v))
    rhs = _qarr(L * eta * L.conj()) / np.asarray((p + 1.0).norm_sq())[..., None]
    res = np.linalg.norm(lhs - rhs, axis=-1)
    if return_parts:
        return res, lhs, rhs
    return res


def reciprocal_residual(z, w):
    """``|lambda ((C^{-1})^* eta)(w) conj(lambda) - 8 |1+p'|^{-2} Theta(w)|`` on the Siegel side.

    ``z`` are Siegel points, ``w`` tangent vectors in group coordinates;
    ``lambda = (1 + p') / |1 + p'|``.
    """
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    g = siegel_to_group(z)
    xs = coordinate_jets(g, 1)
    nq = g.shape[-1] - 3
    re = xs[0] * xs[0]
    for x in xs[1:nq]:
        re = re + x * x
    comps = list(xs[:nq]) + [re] + [-x for x in xs[nq:]]
    n = nq // 4
    qs = [Quaternion(*comps[4 * a : 4 * a + 4]) for a in range(n)]
    p = Quaternion(*comps[4 * n :])
    inv = (p + 1.0).inverse()
    sq = [2.0 * (inv * q) for q in qs]
    sp = inv * (1.0 - p)
    jets = []
    for q in sq + [sp]:
        jets.extend(q.coeffs())
    J = np.moveaxis(np.moveaxis(np.stack([j.gradient() for j in jets]), 0, -1), 0, -1)
    s = np.stack([j.value for j in jets], axis=-1)
    v = np.einsum("...ij,...j->...i", J, w)
    eta = Quaternion.from_array(sphere_contact_form(s, v))
    _, pz = _split(z)
    onep = pz + 1.0
    L = onep * (1.0 / onep.norm())
    lhs = _qarr(L * eta * L.conj())
    rhs = 8.0 / np.asarray(onep.norm_sq())[..., None] * group_contact_quaternion(g, w)
    return np.linalg.norm(lhs - rhs, axis=-1)


def dump_pairs(path, sphere_points) -> None:
    """CSV of sphere points next to their Siegel images."""
    s = np.atleast_2d(np.asarray(sphere_points, dtype=float))
    z = cayley(s)
    d = s.shape[1]
    header = [f"s{i}" for i in range(d)] + [f"z{i}" for i in range(d)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for a, b in zip(s, z):
            w.writerow([repr(float(x)) for x in a] + [repr(float(x)) for x in b])
