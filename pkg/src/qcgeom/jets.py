"""Truncated Taylor jets in several variables (forward mode).

A :class:`Jet` holds the Taylor coefficients ``c_a = D^a f(p) / a!`` of a
function around a base point ``p`` for every multi-index ``|a| <= order``.
Coefficient arrays carry a trailing batch shape, so one jet can describe the
expansion at many base points at once.  Arithmetic is truncated polynomial
arithmetic; smooth univariate functions (``pow``, ``sqrt``, ``exp``, ...)
are composed through their Taylor series, which keeps polynomial fields
exact up to round-off.

A :class:`ScalarField` wraps a Python callable that receives the list of
coordinate jets and returns a jet, so fields are written as ordinary
formulas::

    f = ScalarField(lambda xs: xs[0] * xs[1] + 3.0, dim=7)
    f.jet(points, order=2).partial(0, 1)
"""

from __future__ import annotations

import functools
import math
import numbers
from itertools import combinations_with_replacement

import numpy as np

__all__ = [
    "MAX_ORDER",
    "JetOrderError",
    "Basis",
    "basis",
    "Jet",
    "coordinate_jets",
    "ScalarField",
    "constant_field",
    "coordinate_field",
    "eval_jet",
    "jet_scale",
]

MAX_ORDER = 4


class JetOrderError(ValueError):
    """Requested derivative order exceeds what a jet can provide."""


class Basis:
    """Graded monomial basis of the truncated polynomial ring."""

    def __init__(self, dim: int, order: int):
        self.dim = dim
        self.order = order
        exps = []
        for deg in range(order + 1):
            for combo in combinations_with_replacement(range(dim), deg):
                e = [0] * dim
                for v in combo:
                    e[v] += 1
                exps.append(tuple(e))
        # combinations_with_replacement is lexicographic; keep graded order
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), dim)
        self.degree = self.exps.sum(axis=1)
        self.index = {e: n for n, e in enumerate(exps)}
        self.size = len(exps)
        self.sizes = [int(np.sum(self.degree <= k)) for k in range(order + 1)]

    @functools.cached_property
    def product_table(self):
        """Pairs ``(i, j) -> k`` with ``exps[i] + exps[j] == exps[k]``, grouped by k."""
        pairs = []
        for i, ei in enumerate(self.exps):
            room = self.order - self.degree[i]
            for j in range(self.sizes[room]):
                k = self.index[tuple(ei + self.exps[j])]
                pairs.append((k, i, j))
        pairs.sort()
        arr = np.array(pairs, dtype=np.int64)
        ks = arr[:, 0]
        starts = np.flatnonzero(np.r_[True, ks[1:] != ks[:-1]])
        return arr[:, 1], arr[:, 2], starts

    @functools.lru_cache(maxsize=None)
    def derivative_table(self, var: int):
        """Source indices and factors for d/dx_var, landing in the order-1 basis."""
        lower = self.sizes[self.order - 1] if self.order > 0 else 0
        src = np.empty(lower, dtype=np.int64)
        fac = np.empty(lower)
        for n in range(lower):
            e = self.exps[n].copy()
            e[var] += 1
            src[n] = self.index[tuple(e)]
            fac[n] = e[var]
        return src, fac


@functools.lru_cache(maxsize=None)
def basis(dim: int, order: int) -> Basis:
    return Basis(dim, order)


def _factorial_weights(b: Basis) -> np.ndarray:
    return np.array([math.prod(math.factorial(int(v)) for v in e) for e in b.exps], dtype=float)


class Jet:
    """Truncated multivariate Taylor polynomial around a (batch of) base point(s)."""

    __slots__ = ("c", "dim", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, dim: int, order: int):
        self.c = coeffs
        self.dim = dim
        self.order = order

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, dim: int, order: int, batch_shape=()) -> "Jet":
        b = basis(dim, order)
        c = np.zeros((b.size,) + tuple(batch_shape))
        c[0] = value
        return cls(c, dim, order)

    @property
    def batch_shape(self) -> tuple:
        return self.c.shape[1:]

    @property
    def basis(self) -> Basis:
        return basis(self.dim, self.order)

    # access ---------------------------------------------------------------
    @property
    def value(self):
        return self.c[0]

    def coeff(self, exponent) -> np.ndarray:
        """Taylor coefficient of the monomial with the given exponent tuple."""
        exponent = tuple(int(v) for v in exponent)
        if sum(exponent) > self.order:
            raise JetOrderError(f"coefficient of degree {sum(exponent)} needs a jet of that order, have {self.order}")
        return self.c[self.basis.index[exponent]]

    def partial(self, *vars_: int) -> np.ndarray:
        """Partial derivative ``d^k f / dx_{v1} ... dx_{vk}`` at the base point."""
        e = [0] * self.dim
        for v in vars_:
            e[v] += 1
        return self.coeff(e) * math.prod(math.factorial(v) for v in e)

    def gradient(self) -> np.ndarray:
        return np.stack([self.partial(v) for v in range(self.dim)])

    def hessian(self) -> np.ndarray:
        h = np.empty((self.dim, self.dim) + self.batch_shape)
        for a in range(self.dim):
            for b in range(a, self.dim):
                h[a, b] = h[b, a] = self.partial(a, b)
        return h

    def derivatives(self) -> np.ndarray:
        """All coefficients converted to partial derivatives ``D^a f(p)``."""
        w = _factorial_weights(self.basis)
        return self.c * w.reshape((-1,) + (1,) * len(self.batch_shape))

    def max_abs(self) -> np.ndarray:
        return np.max(np.abs(self.c), axis=0)

    # order handling -------------------------------------------------------
    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetOrderError(f"cannot raise jet order from {self.order} to {order}")
        return Jet(self.c[: basis(self.dim, order).size], self.dim, order)

    def diff(self, var: int) -> "Jet":
        """Jet of ``df/dx_var``; one order is consumed."""
        if self.order == 0:
            raise JetOrderError("differentiating an order-0 jet needs order >= 1")
        src, fac = self.basis.derivative_table(var)
        c = self.c[src] * fac.reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(c, self.dim, self.order - 1)

    def scale_variables(self, s) -> "Jet":
        """Jet of ``x -> f(s x)`` given the jet of ``f`` at ``s p`` (base moves to ``p``)."""
        s = np.asarray(s, dtype=float)
        deg = self.basis.degree.reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(self.c * s**deg, self.dim, self.order)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.dim != self.dim:
                raise ValueError("jets over different numbers of variables")
            order = min(self.order, other.order)
            a = self if self.order == order else self.truncate(order)
            b = other if other.order == order else other.truncate(order)
            return a, b
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            return Jet(a.c + b.c, a.dim, a.order)
        if isinstance(other, (numbers.Number, np.ndarray)):
            c = np.array(self.c, dtype=float, copy=True)
            c = c + np.zeros_like(c[0:1] + other)
            c[0] = c[0] + other
            return Jet(c, self.dim, self.order)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.dim, self.order)

    def __sub__(self, other):
        if isinstance(other, (Jet, numbers.Number, np.ndarray)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            ii, jj, starts = a.basis.product_table
            prod = a.c[ii] * b.c[jj]
            return Jet(np.add.reduceat(prod, starts, axis=0), a.dim, a.order)
        if isinstance(other, (numbers.Number, np.ndarray)):
            return Jet(self.c * other, self.dim, self.order)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if isinstance(other, (numbers.Number, np.ndarray)):
            return Jet(self.c / other, self.dim, self.order)
        return NotImplemented

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, numbers.Integral) and exponent >= 0:
            out = Jet.constant(1.0, self.dim, self.order, self.batch_shape)
            base = self
            e = int(exponent)
            while e:
                if e & 1:
                    out = out * base
                e >>= 1
                if e:
                    base = base * base
            return out
        r = float(exponent)
        a0 = self.value
        if np.any(a0 <= 0) and not float(r).is_integer():
            raise ValueError("non-integer power of a jet with non-positive value")
        # d^k/dx^k x^r / k! = binom(r, k) x^(r-k)
        derivs = []
        coef = 1.0
        for k in range(self.order + 1):
            derivs.append(coef * a0 ** (r - k))
            coef *= (r - k) / (k + 1)
        return self._compose(derivs)

    def reciprocal(self) -> "Jet":
        a0 = self.value
        if np.any(a0 == 0):
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        return self._compose([(-1.0) ** k * a0 ** (-(k + 1)) for k in range(self.order + 1)])

    def sqrt(self) -> "Jet":
        return self ** 0.5

    def exp(self) -> "Jet":
        e0 = np.exp(self.value)
        return self._compose([e0 / math.factorial(k) for k in range(self.order + 1)])

    def log(self) -> "Jet":
        a0 = self.value
        terms = [np.log(a0)] + [(-1.0) ** (k + 1) / (k * a0**k) for k in range(1, self.order + 1)]
        return self._compose(terms)

    def _compose(self, taylor):
        """``g(self)`` where ``taylor[k] = g^(k)(a0) / k!`` at the constant term ``a0``."""
        delta = Jet(np.array(self.c, dtype=float, copy=True), self.dim, self.order)
        delta.c[0] = 0.0
        out = Jet.constant(0.0, self.dim, self.order, self.batch_shape)
        out.c[0] = taylor[0]
        power = None
        for k in range(1, self.order + 1):
            power = delta if power is None else power * delta
            out = out + power * taylor[k]
        return out

    def compose(self, inner: list) -> "Jet":
        """Chain rule: ``self`` expanded in ``y`` around ``y0``, with ``y = inner(x)``.

        ``inner`` is a list of jets in ``x`` whose values are ``y0``.
        """
        if len(inner) != self.dim:
            raise ValueError("need one inner jet per variable")
        order = min(self.order, min(j.order for j in inner))
        deltas = []
        for j in inner:
            j = j.truncate(order) if j.order > order else j
            d = Jet(np.array(j.c, dtype=float, copy=True), j.dim, order)
            d.c[0] = 0.0
            deltas.append(d)
        b = basis(self.dim, order)
        x_dim = inner[0].dim
        monos = [Jet.constant(1.0, x_dim, order, deltas[0].batch_shape)]
        out = monos[0] * self.c[0]
        for m in range(1, b.size):
            e = b.exps[m]
            v = int(np.flatnonzero(e)[0])
            prev = list(e)
            prev[v] -= 1
            mono = monos[b.index[tuple(prev)]] * deltas[v]
            monos.append(mono)
            out = out + mono * self.c[m]
        return out

    def __repr__(self):
        return f"Jet(dim={self.dim}, order={self.order}, batch={self.batch_shape})"


def jet_scale(value) -> np.ndarray:
    """``max(1, largest coefficient magnitude)`` used to scale tolerances."""
    if isinstance(value, Jet):
        return np.maximum(1.0, value.max_abs())
    return np.maximum(1.0, np.abs(value))


def _as_points(points, dim):
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != dim:
        raise ValueError(f"points must have trailing dimension {dim}, got {pts.shape}")
    return pts


def coordinate_jets(points, order: int) -> list[Jet]:
    """Jets of the coordinate functions at ``points`` (shape ``(..., dim)``)."""
    pts = np.asarray(points, dtype=float)
    dim = pts.shape[-1]
    if not 0 <= order <= MAX_ORDER:
        raise JetOrderError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
    b = basis(dim, order)
    batch = pts.shape[:-1]
    out = []
    for v in range(dim):
        c = np.zeros((b.size,) + batch)
        c[0] = pts[..., v]
        if order >= 1:
            c[1 + v] = 1.0
        out.append(Jet(c, dim, order))
    return out


class ScalarField:
    """A real function on ``R^dim`` that can be expanded to a jet at any point.

    ``fn`` receives the list of coordinate jets and may return a jet or a plain
    number (for constants).
    """

    def __init__(self, fn, dim: int, name: str | None = None):
        self.fn = fn
        self.dim = dim
        self.name = name or getattr(fn, "__name__", "field")

    def jet(self, points, order: int) -> Jet:
        pts = _as_points(points, self.dim)
        xs = coordinate_jets(pts, order)
        out = self.fn(xs)
        if not isinstance(out, Jet):
            out = Jet.constant(out, self.dim, order, pts.shape[:-1])
        return out

    def __call__(self, points):
        return self.jet(points, 0).value

    # pointwise algebra of fields --------------------------------------------
    def _combine(self, other, op, symbol):
        if isinstance(other, ScalarField):
            if other.dim != self.dim:
                raise ValueError("fields over different dimensions")
            return _CombinedField([self, other], lambda js: op(js[0], js[1]), self.dim, f"({self.name}{symbol}{other.name})")
        return _CombinedField([self], lambda js: op(js[0], other), self.dim, f"({self.name}{symbol}{other})")

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, "+")

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, "-")

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b, "*")

    def __rmul__(self, other):
        return self * other

    def __neg__(self):
        return (-1.0) * self

    def __truediv__(self, other):
        return self._combine(other, lambda a, b: a / b, "/")

    def __pow__(self, exponent):
        return _CombinedField([self], lambda js: js[0] ** exponent, self.dim, f"{self.name}**{exponent}")

    def __repr__(self):
        return f"ScalarField({self.name!r}, dim={self.dim})"


class _CombinedField(ScalarField):
    def __init__(self, parts, op, dim, name):
        super().__init__(None, dim, name)
        self.parts = parts
        self.op = op

    def jet(self, points, order):
        out = self.op([p.jet(points, order) for p in self.parts])
        if not isinstance(out, Jet):
            pts = _as_points(points, self.dim)
            out = Jet.constant(out, self.dim, order, pts.shape[:-1])
        return out


def constant_field(value: float, dim: int) -> ScalarField:
    return ScalarField(lambda xs: float(value), dim, name=repr(value))


def coordinate_field(var: int, dim: int, name: str | None = None) -> ScalarField:
    return ScalarField(lambda xs: xs[var], dim, name=name or f"x{var}")


def eval_jet(f: ScalarField, points, order: int) -> Jet:
    """Taylor coefficients of ``f`` at ``points`` up to ``order``."""
    if not 0 <= order <= MAX_ORDER:
        raise JetOrderError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
    return f.jet(points, order)
