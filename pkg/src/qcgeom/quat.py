"""Quaternions and quaternionic vectors.

A :class:`Quaternion` stores its four real coefficients ``t, x, y, z`` (of
``1, i, j, k``).  The coefficients are only ever combined with ``+``, ``-``
and ``*``, so they may be floats, numpy arrays (a batch of quaternions) or
:class:`~qcgeom.jets.Jet` objects (a quaternion-valued field expanded around
a point).  Products are always taken left to right as written.

>>> i, j, k = Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1)
>>> i * j == k
True
>>> (Quaternion(1, 1) * Quaternion(1, 0, 1)).coeffs()
(1, 1, 1, 1)
"""

from __future__ import annotations

import numbers

import numpy as np

__all__ = [
    "Quaternion",
    "ONE",
    "I",
    "J",
    "K",
    "BASIS",
    "qdot",
    "hnorm_sq",
    "as_hvector",
    "hvector_array",
    "mul",
    "conj",
    "re",
    "im",
    "norm",
    "inverse",
]


def _is_scalar(value) -> bool:
    return isinstance(value, (numbers.Number, np.ndarray)) or _is_jet(value)


def _is_jet(value) -> bool:
    # avoids importing jets at module load
    return type(value).__name__ == "Jet"


class Quaternion:
    """``t + x i + y j + z k``."""

    __slots__ = ("t", "x", "y", "z")
    __array_ufunc__ = None  # make ndarray (op) Quaternion defer to us

    def __init__(self, t=0.0, x=0.0, y=0.0, z=0.0):
        self.t = t
        self.x = x
        self.y = y
        self.z = z

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        """Build from an array whose last axis has length 4."""
        arr = np.asarray(arr, dtype=float)
        if arr.shape[-1] != 4:
            raise ValueError(f"last axis must have length 4, got {arr.shape}")
        return cls(arr[..., 0], arr[..., 1], arr[..., 2], arr[..., 3])

    def to_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*map(np.asarray, self.coeffs())), axis=-1).astype(float)

    def coeffs(self) -> tuple:
        return (self.t, self.x, self.y, self.z)

    # algebra -------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)
        if _is_scalar(other):
            return Quaternion(self.t + other, self.x, self.y, self.z)
        return NotImplemented

    def __radd__(self, other):
        if _is_scalar(other):
            return Quaternion(other + self.t, self.x, self.y, self.z)
        return NotImplemented

    def __neg__(self):
        return Quaternion(-self.t, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        if isinstance(other, Quaternion) or _is_scalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a1, b1, c1, d1 = self.coeffs()
            a2, b2, c2, d2 = other.coeffs()
            return Quaternion(
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            )
        if _is_scalar(other):
            return Quaternion(self.t * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        # real scalars are central, so the side does not matter
        if _is_scalar(other):
            return Quaternion(other * self.t, other * self.x, other * self.y, other * self.z)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Quaternion):
            return self * other.inverse()
        if _is_scalar(other):
            return self * (1.0 / other)
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.t, -self.x, -self.y, -self.z)

    def re(self):
        return self.t

    def im(self) -> "Quaternion":
        return Quaternion(0.0 * self.t, self.x, self.y, self.z)

    def norm_sq(self):
        return self.t * self.t + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self):
        return np.sqrt(self.norm_sq())

    def inverse(self) -> "Quaternion":
        n2 = self.norm_sq()
        if not _is_jet(n2) and np.any(np.asarray(n2) == 0.0):
            raise ZeroDivisionError("inverse of the zero quaternion")
        return self.conj() * (1.0 / n2)

    # comparisons / display ------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return all(np.all(a == b) for a, b in zip(self.coeffs(), other.coeffs()))

    def __hash__(self):
        return hash(tuple(float(c) for c in self.coeffs()))

    def allclose(self, other, atol=1e-12) -> bool:
        other = other if isinstance(other, Quaternion) else Quaternion(other)
        return bool(np.allclose(self.to_array(), other.to_array(), atol=atol, rtol=0))

    def __repr__(self):
        return "Quaternion(t={!r}, x={!r}, y={!r}, z={!r})".format(*self.coeffs())


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)
BASIS = (ONE, I, J, K)


# functional aliases, mirroring the usual notation
def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    return a * b


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


def re(q: Quaternion):
    return q.re()


def im(q: Quaternion) -> Quaternion:
    return q.im()


def norm(q: Quaternion):
    return q.norm()


def inverse(q: Quaternion) -> Quaternion:
    return q.inverse()


# H^n -----------------------------------------------------------------------
def as_hvector(arr) -> list[Quaternion]:
    """Split an array with trailing axis ``4n`` into ``n`` quaternions."""
    arr = np.asarray(arr, dtype=float)
    if arr.shape[-1] % 4:
        raise ValueError("length of an H^n vector must be a multiple of 4")
    return [Quaternion.from_array(arr[..., 4 * a : 4 * a + 4]) for a in range(arr.shape[-1] // 4)]


def hvector_array(qs) -> np.ndarray:
    return np.concatenate([q.to_array() for q in qs], axis=-1)


def qdot(a, b) -> Quaternion:
    """``a . conj(b) = sum_alpha a^alpha conj(b^alpha)``."""
    out = Quaternion()
    for qa, qb in zip(a, b, strict=True):
        out = out + qa * qb.conj()
    return out


def hnorm_sq(a):
    """``|q|^2 = sum_alpha |q^alpha|^2``."""
    total = 0.0
    for q in a:
        total = total + q.norm_sq()
    return total
