import numpy as np
import pytest

from qcgeom.decomp import (
    casimir,
    four_part,
    omegas,
    project_3_0,
    project_sym_minus1,
    sandwich,
    split_3_minus1,
    standard_triple,
    sym,
    tensor_from_json,
    tensor_to_json,
)

SIGNS = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_triple_relations(n):
    I1, I2, I3 = standard_triple(n)
    eye = np.eye(4 * n)
    assert np.array_equal(I1 @ I2, I3)
    assert np.array_equal(I2 @ I1, -I3)
    for Is in (I1, I2, I3):
        assert np.array_equal(Is @ Is, -eye)
        assert np.array_equal(Is.T @ Is, eye)


def test_triple_on_basis():
    I1, I2, I3 = standard_triple(1)
    T, X, Y, Z = np.eye(4)
    # I_1: (T, X, Y, Z) -> (X, -T, Z, -Y), columns are images
    assert np.array_equal(I1 @ T, X) and np.array_equal(I1 @ X, -T)
    assert np.array_equal(I1 @ Y, Z) and np.array_equal(I1 @ Z, -Y)
    assert np.array_equal(I2 @ T, Y) and np.array_equal(I2 @ X, -Z)
    assert np.array_equal(I3 @ T, Z) and np.array_equal(I3 @ X, Y)


def test_triple_is_read_only():
    with pytest.raises(ValueError):
        standard_triple(1)[0][0, 0] = 1.0


def _signature_residual(parts, n):
    I = standard_triple(n)
    worst = 0.0
    for part, sg in zip(parts, SIGNS):
        for Is, e in zip(I, sg):
            # commutes (e=+1): I P I^{-1} = P, i.e. I P I = -P
            worst = max(worst, np.max(np.abs(sandwich(Is, part, Is) + e * part)))
    return worst


def test_four_part_examples():
    I1 = standard_triple(1)[0]
    parts = four_part(np.eye(4))
    assert np.allclose(parts[0], np.eye(4)) and all(np.allclose(p, 0) for p in parts[1:])
    parts = four_part(I1)
    assert np.allclose(parts[1], I1) and all(np.allclose(parts[k], 0) for k in (0, 2, 3))


@pytest.mark.parametrize("n", [1, 2])
def test_four_part_random(rng, n):
    for _ in range(100):
        psi = rng.normal(size=(4 * n, 4 * n))
        parts = four_part(psi)
        assert np.max(np.abs(sum(parts) - psi)) < 1e-12
        assert _signature_residual(parts, n) < 1e-12
        for a in range(4):
            for b in range(a + 1, 4):
                assert abs(np.sum(parts[a] * parts[b])) < 1e-12


def test_casimir_examples():
    n = 2
    g = np.eye(8)
    assert np.allclose(casimir(g), 3 * g)
    p3, pm = split_3_minus1(g)
    assert np.allclose(p3, g) and np.allclose(pm, 0)
    w1 = omegas(n)[0]
    c = casimir(w1)
    # omega_1 lies in a single eigenspace
    assert np.allclose(c, -w1) or np.allclose(c, 3 * w1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_casimir_eigen(rng, n):
    psi = rng.normal(size=(4 * n, 4 * n, 100))
    p3, pm = split_3_minus1(psi)
    assert np.max(np.abs(casimir(p3) - 3 * p3)) < 1e-12
    assert np.max(np.abs(casimir(pm) + pm)) < 1e-12
    assert np.max(np.abs(p3 + pm - psi)) < 1e-12
    # idempotent and mutually annihilating
    a3, am = split_3_minus1(p3)
    b3, bm = split_3_minus1(pm)
    assert np.max(np.abs(a3 - p3)) < 1e-12 and np.max(np.abs(am)) < 1e-12
    assert np.max(np.abs(bm - pm)) < 1e-12 and np.max(np.abs(b3)) < 1e-12


def test_n1_three_part_proportional_to_identity(rng):
    for _ in range(100):
        a = rng.normal(size=(4, 4))
        s = a + a.T
        p3 = split_3_minus1(s)[0]
        assert np.max(np.abs(p3 - np.trace(s) / 4 * np.eye(4))) < 1e-12


def test_projection_examples(rng):
    g = np.eye(8)
    assert np.allclose(project_sym_minus1(g), 0) and np.allclose(project_3_0(g), 0)
    assert np.allclose(project_sym_minus1(omegas(2)[0]), 0)
    psi = rng.normal(size=(8, 8, 100))
    p = project_3_0(psi)
    assert np.max(np.abs(np.trace(p, axis1=0, axis2=1))) < 1e-12
    assert np.max(np.abs(project_3_0(p) - p)) < 1e-12
    q = project_sym_minus1(psi)
    assert np.max(np.abs(project_sym_minus1(q) - q)) < 1e-12
    assert np.max(np.abs(q - sym(q))) < 1e-12


def test_json_round_trip(rng):
    psi = rng.normal(size=(4, 4))
    assert np.array_equal(tensor_from_json(tensor_to_json(psi)), psi)
