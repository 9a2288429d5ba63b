"""Hypercomplex structures on ``R^{4n}`` and the Sp(n)Sp(1)-invariant projections.

Matrices act on column vectors in the horizontal frame
``T_1, X_1, Y_1, Z_1, ..., T_n, ..., Z_n``.  ``I_1, I_2, I_3`` are left
multiplication by ``i, j, k`` on each quaternion block, so ``I_1 T = X``,
``I_2 T = Y``, ``I_3 T = Z`` and ``I_1 I_2 = I_3``.

Bilinear forms and endomorphisms are identified through the (orthonormal)
frame metric, ``Psi(X, Y) = g(X, Psi Y)``, so one array serves both readings.
The two-form ``omega_s(X, Y) = g(I_s X, Y)`` is the matrix ``I_s^T``.

The Casimir operator on bilinear forms is
``(dagger Psi)(X, Y) = sum_s Psi(I_s X, I_s Y)``, i.e. ``sum_s I_s^T Psi I_s``;
it has eigenvalue 3 on the ``[3]`` component and -1 on the ``[-1]`` component.
"""

from __future__ import annotations

import functools
import json

import numpy as np

__all__ = [
    "standard_triple",
    "omegas",
    "four_part",
    "casimir",
    "split_3_minus1",
    "project_sym_minus1",
    "project_3_0",
    "sym",
    "sandwich",
    "tensor_to_json",
    "tensor_from_json",
]

_BLOCKS = {
    # columns are images of T, X, Y, Z
    1: [(0, 1, 1), (1, 0, -1), (2, 3, 1), (3, 2, -1)],
    2: [(0, 2, 1), (1, 3, -1), (2, 0, -1), (3, 1, 1)],
    3: [(0, 3, 1), (1, 2, 1), (2, 1, -1), (3, 0, -1)],
}


@functools.lru_cache(maxsize=None)
def _triple(n: int):
    out = []
    for s in (1, 2, 3):
        m = np.zeros((4 * n, 4 * n))
        for a in range(n):
            for src, dst, sign in _BLOCKS[s]:
                m[4 * a + dst, 4 * a + src] = sign
        m.setflags(write=False)
        out.append(m)
    return tuple(out)


def standard_triple(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(I_1, I_2, I_3)`` as read-only ``4n x 4n`` arrays."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _triple(int(n))


def omegas(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``omega_s[a, b] = g(I_s e_a, e_b)``."""
    return tuple(I.T for I in standard_triple(n))


def _n_of(psi) -> int:
    m = np.shape(psi)[0]
    if m % 4 or np.shape(psi)[1] != m:
        raise ValueError(f"expected a 4n x 4n tensor, got shape {np.shape(psi)}")
    return m // 4


def sandwich(A, psi, B):
    """``A psi B`` for a leading-(4n, 4n) tensor that may carry batch axes."""
    psi = np.asarray(psi)
    if psi.ndim == 2:
        return A @ psi @ B
    moved = np.moveaxis(psi.reshape(psi.shape[:2] + (-1,)), -1, 0)
    out = np.moveaxis(A @ moved @ B, 0, -1)
    return out.reshape(psi.shape)


def _conj(I, psi):
    return sandwich(I, psi, I)


def _casimir_raw(I, psi):
    return sandwich(I.T, psi, I)


def four_part(psi):
    """``(Psi^{+++}, Psi^{+--}, Psi^{-+-}, Psi^{--+})`` of an endomorphism."""
    I1, I2, I3 = standard_triple(_n_of(psi))
    a1, a2, a3 = _conj(I1, psi), _conj(I2, psi), _conj(I3, psi)
    return (
        (psi - a1 - a2 - a3) / 4,
        (psi - a1 + a2 + a3) / 4,
        (psi + a1 - a2 + a3) / 4,
        (psi + a1 + a2 - a3) / 4,
    )


def casimir(psi):
    """``sum_s Psi(I_s ., I_s .)`` on a bilinear form."""
    I1, I2, I3 = standard_triple(_n_of(psi))
    return _casimir_raw(I1, psi) + _casimir_raw(I2, psi) + _casimir_raw(I3, psi)


def split_3_minus1(psi):
    """``(Psi_[3], Psi_[-1])``: eigencomponents of :func:`casimir` for 3 and -1."""
    c = casimir(psi)
    return (psi + c) / 4, (3 * psi - c) / 4


def sym(psi):
    return (psi + np.swapaxes(psi, 0, 1)) / 2


def project_sym_minus1(psi):
    """Symmetric part, then its ``[-1]`` component."""
    return split_3_minus1(sym(psi))[1]


def project_3_0(psi):
    """``[3]`` component with its trace part removed."""
    p3 = split_3_minus1(psi)[0]
    m = p3.shape[0]
    tr = np.trace(p3, axis1=0, axis2=1)
    eye = np.eye(m).reshape((m, m) + (1,) * (p3.ndim - 2))
    return p3 - eye * (tr / m)


def tensor_to_json(psi) -> str:
    return json.dumps(np.asarray(psi, dtype=float).tolist())


def tensor_from_json(text: str) -> np.ndarray:
    arr = np.asarray(json.loads(text), dtype=float)
    _n_of(arr)
    return arr
