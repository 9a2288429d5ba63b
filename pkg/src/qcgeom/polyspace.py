"""Finite-dimensional polynomial spaces and kernels of linear differential conditions.

Used as an oracle: instead of hand-deriving special solutions of a linear
PDE system, sample the residual map on a monomial basis at enough points and
take its numerical null space.
"""

from __future__ import annotations

from itertools import combinations_with_replacement

import numpy as np
from scipy.linalg import null_space

from .jets import ScalarField

__all__ = ["monomials", "poly_field", "random_poly_field", "kernel_basis"]


def monomials(nvars: int, degree: int, min_degree: int = 0) -> list[tuple]:
    out = []
    for deg in range(min_degree, degree + 1):
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
    return out


def poly_field(coeffs, monos, nvars: int, name: str = "poly") -> ScalarField:
    """``sum_m coeffs[m] x^monos[m]`` as a field."""
    coeffs = np.asarray(coeffs, dtype=float)
    items = [(float(c), e) for c, e in zip(coeffs, monos) if c != 0.0]

    def fn(xs):
        total = 0.0
        for c, e in items:
            term = c
            for v, k in enumerate(e):
                for _ in range(k):
                    term = xs[v] * term
            total = term + total
        return total

    return ScalarField(fn, nvars, name=name)


def random_poly_field(rng, nvars: int, degree: int, scale: float = 1.0) -> ScalarField:
    monos = monomials(nvars, degree)
    return poly_field(rng.normal(scale=scale, size=len(monos)), monos, nvars, name=f"rand_deg{degree}")


def kernel_basis(residual_of_unknowns, nunknowns: int, rcond: float = 1e-9) -> np.ndarray:
    """Null space of a linear map given as ``x -> residual vector``.

    The map is assembled column by column from unit vectors; returns an
    orthonormal basis with shape ``(nunknowns, k)``.
    """
    cols = [np.ravel(residual_of_unknowns(np.eye(nunknowns)[i])) for i in range(nunknowns)]
    A = np.stack(cols, axis=1)
    return null_space(A, rcond=rcond)
