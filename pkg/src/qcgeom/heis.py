"""The quaternionic Heisenberg group ``G(H) = H^n x Im H``.

Points are stored as flat coordinate vectors

    [t1, x1, y1, z1, ..., tn, xn, yn, zn, x, y, z]

of length ``4n + 3``; the last three entries are the centre.  The group law is

    (q_o, w_o) o (q, w) = (q_o + q, w + w_o + 2 Im(q_o . conj(q)))

The left-invariant frame is *derived* from this law (the velocity of
``s -> L_p(s u e_alpha)`` for ``u`` in ``{1, i, j, k}``) rather than typed in,
and is stored as first-order operators with exact polynomial coefficients so
that brackets can be compared as polynomial identities.
"""

from __future__ import annotations

import functools
import json
import numbers
from dataclasses import dataclass

import numpy as np

from .jets import ScalarField, coordinate_jets
from .quat import BASIS, Quaternion

__all__ = [
    "Polynomial",
    "FrameOperator",
    "GroupPoint",
    "KINDS",
    "dim",
    "center_index",
    "coord_index",
    "group_mul",
    "group_inverse",
    "frame",
    "horizontal_frame",
    "full_frame",
    "lie_bracket",
    "expected_bracket",
    "commutator_table",
    "contact_form",
    "contact_form_polys",
    "d_contact_form",
    "dilation",
    "left_translate",
    "FrameData",
    "frame_data",
]

KINDS = ("T", "X", "Y", "Z", "xi1", "xi2", "xi3")
_KIND_ALIASES = {"ξ1": "xi1", "ξ2": "xi2", "ξ3": "xi3"}


def dim(n: int) -> int:
    return 4 * n + 3


def coord_index(n: int, alpha: int, comp: int) -> int:
    """Index of component ``comp`` (0..3 for t,x,y,z) of ``q^alpha`` (1-based alpha)."""
    if not 1 <= alpha <= n:
        raise ValueError(f"alpha must be in 1..{n}, got {alpha}")
    return 4 * (alpha - 1) + comp


def center_index(n: int, s: int) -> int:
    """Index of centre coordinate ``s`` (1..3)."""
    if s not in (1, 2, 3):
        raise ValueError(f"centre index must be 1, 2 or 3, got {s}")
    return 4 * n + s - 1


# ---------------------------------------------------------------------------
# polynomials with exact (float) coefficients
# ---------------------------------------------------------------------------
class Polynomial:
    """Sparse real polynomial ``{exponent tuple: coefficient}`` in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        for e, c in (terms or {}).items():
            if c != 0:
                e = tuple(int(v) for v in e)
                clean[e] = clean.get(e, 0.0) + float(c)
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, index, coeff=1.0):
        e = [0] * nvars
        e[index] = 1
        return cls(nvars, {tuple(e): coeff})

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def _lift(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials in different numbers of variables")
            return other
        if isinstance(other, numbers.Real):
            return Polynomial.constant(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0.0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def diff(self, var: int) -> "Polynomial":
        terms = {}
        for e, c in self.terms.items():
            if e[var]:
                e2 = list(e)
                e2[var] -= 1
                terms[tuple(e2)] = c * e[var]
        return Polynomial(self.nvars, terms)

    def __call__(self, xs):
        """Evaluate on a sequence of coordinate values (floats, arrays or jets)."""
        total = 0.0
        for e, c in self.terms.items():
            term = c
            for v, k in enumerate(e):
                for _ in range(k):
                    term = term * xs[v]
            total = term + total
        return total

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        out = self([pts[..., v] for v in range(self.nvars)])
        return np.broadcast_to(np.asarray(out, dtype=float), pts.shape[:-1]).copy()

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"v{v}" + (f"^{k}" if k > 1 else "") for v, k in enumerate(e) if k)
            parts.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# first-order operators with polynomial coefficients
# ---------------------------------------------------------------------------
class FrameOperator:
    """``sum_k c_k(x) d/dx_k`` with polynomial coefficients ``c_k``."""

    __slots__ = ("nvars", "coeffs", "name")

    def __init__(self, nvars: int, coeffs: dict, name: str = ""):
        self.nvars = nvars
        self.coeffs = {k: p for k, p in coeffs.items() if not p.is_zero()}
        self.name = name

    @property
    def terms(self):
        return sorted(self.coeffs.items())

    def coefficient(self, k: int) -> Polynomial:
        return self.coeffs.get(k, Polynomial(self.nvars))

    def __call__(self, poly: Polynomial) -> Polynomial:
        out = Polynomial(self.nvars)
        for k, c in self.coeffs.items():
            out = out + c * poly.diff(k)
        return out

    def __add__(self, other):
        coeffs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            coeffs[k] = coeffs.get(k, Polynomial(self.nvars)) + c
        return FrameOperator(self.nvars, coeffs)

    def __rmul__(self, scalar):
        if not isinstance(scalar, numbers.Real):
            return NotImplemented
        return FrameOperator(self.nvars, {k: c * scalar for k, c in self.coeffs.items()}, self.name)

    def __neg__(self):
        return (-1.0) * self

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, FrameOperator):
            return NotImplemented
        return self.nvars == other.nvars and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient_matrix(self, points) -> np.ndarray:
        """Coefficients at ``points``; shape ``(nvars, *batch)``."""
        pts = np.asarray(points, dtype=float)
        out = np.zeros((self.nvars,) + pts.shape[:-1])
        for k, c in self.coeffs.items():
            out[k] = c.evaluate(pts)
        return out

    def __repr__(self):
        label = self.name or "FrameOperator"
        return f"{label}[" + ", ".join(f"d{k}: {c!r}" for k, c in self.terms) + "]"


def lie_bracket(a: FrameOperator, b: FrameOperator) -> FrameOperator:
    """``[A, B] = sum_k (A(b_k) - B(a_k)) d_k``."""
    if a.nvars != b.nvars:
        raise ValueError("operators on different spaces")
    coeffs = {}
    for k in set(a.coeffs) | set(b.coeffs):
        coeffs[k] = a(b.coefficient(k)) - b(a.coefficient(k))
    return FrameOperator(a.nvars, coeffs, name=f"[{a.name},{b.name}]")


# (first, second) -> s with [first, second] = 2 xi_s, first/second in "TXYZ"
_BRACKETS = {("X", "T"): 1, ("Y", "T"): 2, ("Z", "T"): 3, ("Y", "X"): 3, ("Z", "Y"): 1, ("X", "Z"): 2}


def _split_name(op: FrameOperator):
    return op.name[:1], op.name[1:]


def expected_bracket(a: FrameOperator, b: FrameOperator, n: int) -> FrameOperator:
    """Bracket of two frame fields according to the commutator table."""
    zero = FrameOperator(dim(n), {}, name="0")
    ka, ia = _split_name(a)
    kb, ib = _split_name(b)
    if ka == "x" or kb == "x" or ia != ib:
        return zero
    if (ka, kb) in _BRACKETS:
        return 2.0 * frame(f"xi{_BRACKETS[ka, kb]}", None, n)
    if (kb, ka) in _BRACKETS:
        return -2.0 * frame(f"xi{_BRACKETS[kb, ka]}", None, n)
    return zero


def commutator_table(n: int) -> list[tuple[str, str, bool]]:
    """``(A, B, exact)`` for every ordered pair of frame fields, ``exact`` meaning
    the bracket equals the tabulated value as a polynomial-coefficient operator."""
    ops = full_frame(n)
    return [(a.name, b.name, lie_bracket(a, b) == expected_bracket(a, b, n)) for a in ops for b in ops]


# ---------------------------------------------------------------------------
# group law, written once for any coefficient type
# ---------------------------------------------------------------------------
def _split(coords, n):
    qs = [Quaternion(*coords[4 * a : 4 * a + 4]) for a in range(n)]
    w = Quaternion(0.0, *coords[4 * n : 4 * n + 3])
    return qs, w


def _group_mul_coords(a, b, n):
    qa, wa = _split(a, n)
    qb, wb = _split(b, n)
    cross = Quaternion()
    for x, y in zip(qa, qb):
        cross = cross + x * y.conj()
    out = []
    for x, y in zip(qa, qb):
        out.extend((x + y).coeffs())
    w = wb + wa + 2.0 * cross
    out.extend((w.x, w.y, w.z))
    return out


def _n_from_dim(d: int) -> int:
    if d < 7 or (d - 3) % 4:
        raise ValueError(f"coordinate length {d} is not 4n+3 with n >= 1")
    return (d - 3) // 4


@dataclass(frozen=True)
class GroupPoint:
    """A point ``(q, w)`` of ``G(H)``; ``q`` has ``4n`` reals, ``w`` three."""

    q: tuple
    w: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        object.__setattr__(self, "w", tuple(float(v) for v in self.w))
        if len(self.q) % 4 or not self.q:
            raise ValueError("q must have 4n >= 4 entries")
        if len(self.w) != 3:
            raise ValueError("w must have three entries (imaginary quaternion)")

    @property
    def n(self) -> int:
        return len(self.q) // 4

    @classmethod
    def from_array(cls, arr) -> "GroupPoint":
        arr = np.asarray(arr, dtype=float).ravel()
        _n_from_dim(arr.size)
        return cls(tuple(arr[:-3]), tuple(arr[-3:]))

    @classmethod
    def identity(cls, n: int) -> "GroupPoint":
        return cls((0.0,) * (4 * n), (0.0, 0.0, 0.0))

    def to_array(self) -> np.ndarray:
        return np.array(self.q + self.w)

    def to_json(self) -> str:
        return json.dumps(list(self.q + self.w))

    @classmethod
    def from_json(cls, text: str) -> "GroupPoint":
        return cls.from_array(json.loads(text))

    def quaternions(self) -> list[Quaternion]:
        return [Quaternion(*self.q[4 * a : 4 * a + 4]) for a in range(self.n)]

    def center(self) -> Quaternion:
        return Quaternion(0.0, *self.w)

    def __matmul__(self, other: "GroupPoint") -> "GroupPoint":
        return group_mul(self, other)


def _as_coords(p):
    if isinstance(p, GroupPoint):
        return p.to_array()
    return np.asarray(p, dtype=float)


def group_mul(a, b):
    """Group product; accepts GroupPoints or coordinate arrays (batched on leading axes)."""
    if isinstance(a, GroupPoint) and isinstance(b, GroupPoint):
        if a.n != b.n:
            raise ValueError("points of groups with different n")
        return GroupPoint.from_array(group_mul(a.to_array(), b.to_array()))
    A, B = np.broadcast_arrays(_as_coords(a), _as_coords(b))
    n = _n_from_dim(A.shape[-1])
    out = _group_mul_coords([A[..., k] for k in range(A.shape[-1])], [B[..., k] for k in range(B.shape[-1])], n)
    return np.stack(out, axis=-1)


def group_inverse(a):
    if isinstance(a, GroupPoint):
        return GroupPoint.from_array(-a.to_array())
    return -_as_coords(a)


# ---------------------------------------------------------------------------
# the left-invariant frame
# ---------------------------------------------------------------------------
def _normalize_kind(kind: str) -> str:
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown frame kind {kind!r}; expected one of {KINDS}")
    return kind


@functools.lru_cache(maxsize=None)
def _frame_cached(kind: str, alpha: int, n: int) -> FrameOperator:
    d = dim(n)
    if kind.startswith("xi"):
        s = int(kind[2])
        return FrameOperator(d, {center_index(n, s): Polynomial.constant(d, 2.0)}, name=f"xi{s}")
    comp = "TXYZ".index(kind)
    coord_index(n, alpha, 0)  # validates alpha
    u = BASIS[comp]
    xs = [Polynomial.variable(d, v) for v in range(d)]
    qa = Quaternion(*xs[4 * (alpha - 1) : 4 * alpha])
    # d/ds L_p(s u e_alpha) at s=0: horizontal part u in slot alpha, centre 2 Im(q^alpha conj u)
    vert = 2.0 * (qa * u.conj())
    coeffs = {coord_index(n, alpha, c): Polynomial.constant(d, v) for c, v in enumerate(u.coeffs())}
    for s, poly in enumerate((vert.x, vert.y, vert.z), start=1):
        coeffs[center_index(n, s)] = poly
    return FrameOperator(d, coeffs, name=f"{kind}{alpha}")


def frame(kind: str, alpha: int | None, n: int) -> FrameOperator:
    """Frame field ``T_alpha, X_alpha, Y_alpha, Z_alpha`` or Reeb field ``xi_s``.

    ``alpha`` is 1-based and ignored for the Reeb fields.
    """
    kind = _normalize_kind(kind)
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind.startswith("xi"):
        return _frame_cached(kind, 0, n)
    if alpha is None or not 1 <= alpha <= n:
        raise ValueError(f"frame index alpha must be in 1..{n}, got {alpha}")
    return _frame_cached(kind, int(alpha), n)


def horizontal_frame(n: int) -> list[FrameOperator]:
    """``[T_1, X_1, Y_1, Z_1, ..., T_n, ..., Z_n]``."""
    return [frame(k, a, n) for a in range(1, n + 1) for k in "TXYZ"]


def full_frame(n: int) -> list[FrameOperator]:
    return horizontal_frame(n) + [frame(f"xi{s}", None, n) for s in (1, 2, 3)]


class FrameData:
    """Frame coefficients in array form: ``C(p) = C0 + C1 . p``.

    ``C`` has shape ``(4n+3, 4n+3)`` with row ``a`` the coefficients of the
    ``a``-th frame field (horizontal fields first, then the Reeb fields).
    """

    def __init__(self, n: int):
        self.n = n
        self.d = d = dim(n)
        ops = full_frame(n)
        self.ops = ops
        self.C0 = np.zeros((d, d))
        self.C1 = np.zeros((d, d, d))
        for a, op in enumerate(ops):
            for k, poly in op.coeffs.items():
                if poly.degree() > 1:
                    raise AssertionError("frame coefficients must be affine")
                for e, c in poly.terms.items():
                    if sum(e) == 0:
                        self.C0[a, k] = c
                    else:
                        self.C1[a, k, e.index(1)] = c

    def matrix(self, points) -> np.ndarray:
        """``C`` at the points; shape ``(d, d, *batch)``."""
        pts = np.asarray(points, dtype=float)
        extra = (1,) * (pts.ndim - 1)
        return self.C0.reshape(self.C0.shape + extra) + np.tensordot(self.C1, np.moveaxis(pts, -1, 0), axes=(2, 0))


@functools.lru_cache(maxsize=None)
def frame_data(n: int) -> FrameData:
    return FrameData(n)


# ---------------------------------------------------------------------------
# contact form
# ---------------------------------------------------------------------------
@functools.lru_cache(maxsize=None)
def contact_form_polys(n: int) -> tuple:
    """Rows ``Theta_s[k]`` of the contact form as polynomials; ``(3, d)`` nested tuple.

    ``2 Theta = dw - q . d conj(q) + dq . conj(q)`` (imaginary part, components i, j, k).
    """
    d = dim(n)
    xs = [Polynomial.variable(d, v) for v in range(d)]
    qs, _ = _split(xs, n)
    rows = [[Polynomial(d) for _ in range(d)] for _ in range(3)]
    for k in range(d):
        if k >= 4 * n:
            rows[k - 4 * n][k] = Polynomial.constant(d, 0.5)
            continue
        alpha, comp = divmod(k, 4)
        dq = BASIS[comp]
        val = 0.5 * (dq * qs[alpha].conj() - qs[alpha] * dq.conj())
        for s, c in enumerate((val.x, val.y, val.z)):
            rows[s][k] = c if isinstance(c, Polynomial) else Polynomial.constant(d, c)
    return tuple(tuple(r) for r in rows)


def contact_form(p, n: int | None = None) -> np.ndarray:
    """Values of ``Theta_1, Theta_2, Theta_3`` on coordinate directions.

    Returns shape ``(3, d)`` for a single point or ``(3, d, *batch)`` for
    arrays of points.
    """
    pts = _as_coords(p)
    n = _n_from_dim(pts.shape[-1]) if n is None else n
    rows = contact_form_polys(n)
    out = np.zeros((3, dim(n)) + pts.shape[:-1])
    for s in range(3):
        for k, poly in enumerate(rows[s]):
            if not poly.is_zero():
                out[s, k] = poly.evaluate(pts)
    return out


@functools.lru_cache(maxsize=None)
def d_contact_form(n: int) -> np.ndarray:
    """Constant 2-forms ``dTheta_s`` as antisymmetric ``(3, d, d)`` arrays.

    ``dTheta(u, v) = u(Theta(v)) - v(Theta(u))`` for constant fields ``u, v``.
    """
    d = dim(n)
    rows = contact_form_polys(n)
    out = np.zeros((3, d, d))
    for s in range(3):
        grad = np.zeros((d, d))  # grad[l, k] = d Theta_s[k] / dx_l
        for k, poly in enumerate(rows[s]):
            for l in range(d):
                dp = poly.diff(l)
                if not dp.is_zero():
                    grad[l, k] = dp.terms.get((0,) * d, 0.0)
        out[s] = grad - grad.T
    return out


# ---------------------------------------------------------------------------
# dilations and translations
# ---------------------------------------------------------------------------
def dilation(r: float, p):
    """``delta_r(q, w) = (r q, r^2 w)``."""
    if not np.isscalar(r) or r <= 0:
        raise ValueError(f"dilation factor must be a positive real, got {r!r}")
    if isinstance(p, GroupPoint):
        return GroupPoint.from_array(dilation(r, p.to_array()))
    pts = np.array(_as_coords(p), dtype=float, copy=True)
    pts[..., :-3] *= r
    pts[..., -3:] *= r * r
    return pts


def left_translate(g0, field: ScalarField) -> ScalarField:
    """``field o L_{g0}``, i.e. ``p -> field(g0 o p)``."""
    g = _as_coords(g0)
    n = _n_from_dim(g.size)
    if field.dim != dim(n):
        raise ValueError("field and translation live on different groups")
    gc = [float(v) for v in g]

    if getattr(field, "fn", None) is not None:
        return ScalarField(lambda xs: field.fn(_group_mul_coords(gc, xs, n)), field.dim, name=f"{field.name}oL")

    class _Translated(ScalarField):
        def jet(self, points, order):
            pts = np.asarray(points, dtype=float)
            xs = coordinate_jets(pts, order)
            moved = _group_mul_coords(gc, xs, n)
            base = np.stack([m.value for m in moved], axis=-1)
            return field.jet(base, order).compose(moved)

    return _Translated(None, field.dim, name=f"{field.name}oL")
