import csv

import numpy as np
import pytest

from qcgeom.autos import (
    VectorField,
    compatibility_residuals,
    dilation_generator,
    dump_fit,
    flow_lie_derivative,
    lie_derivative_eta,
    qc_field_check,
    qc_field_from_triple,
    reconstruction_error,
    right_rotation_generator,
    rotation_generator,
    translation_generator,
    triple_of,
)
from qcgeom.heis import center_index, contact_form, dim, frame
from qcgeom.jets import constant_field, coordinate_field


def grid(rng, n, m=100):
    return rng.uniform(-2, 2, size=(m, dim(n)))


def xi_field(n, s):
    op = frame(f"xi{s}", None, n)
    return VectorField(lambda xs: [float(op.coefficient(k).terms.get((0,) * dim(n), 0.0)) for k in range(dim(n))], n, f"xi{s}")


def t1_xi1(n):
    return VectorField(lambda xs: [0.0] * (4 * n) + [2.0 * xs[0], 0.0, 0.0], n, "t1*xi1")


def test_zero_triple(rng):
    n = 1
    z = constant_field(0.0, 7)
    Q = qc_field_from_triple(z, z, z)
    assert np.all(Q(grid(rng, n, 10)) == 0.0)


def test_constant_triple(rng):
    n = 2
    cs = (0.5, -1.0, 2.0)
    Q = qc_field_from_triple(*(constant_field(c, dim(n)) for c in cs))
    p = grid(rng, n, 10)
    expected = np.zeros(dim(n))
    for s, c in enumerate(cs, start=1):
        expected[center_index(n, s)] = 2.0 * c  # xi_s = 2 d/dw_s
    assert np.allclose(Q(p), expected)
    comp = compatibility_residuals(*(constant_field(c, dim(n)) for c in cs), p)
    assert all(np.max(v) == 0.0 for v in comp.values())


@pytest.mark.parametrize("n", [1, 2])
def test_dilation_triple(rng, n):
    Q = dilation_generator(n)
    f = triple_of(Q)
    p = grid(rng, n)
    # Theta_s(Q_dil) = w_s: the q-terms cancel, 2 w d/dw contributes 1/2 . 2 w
    for s in range(3):
        assert np.allclose(f[s](p), p[:, center_index(n, s + 1)], atol=1e-14)
    comp = compatibility_residuals(*f, p)
    assert all(np.max(v) < 1e-10 for v in comp.values())


def test_lie_derivative_examples(rng):
    n = 1
    p = grid(rng, n)
    for s in (1, 2, 3):
        assert np.max(np.abs(lie_derivative_eta(xi_field(n, s), p))) == 0.0
    L = lie_derivative_eta(dilation_generator(n), p)
    assert np.allclose(L, 2 * contact_form(p, n), atol=1e-13)
    zero = VectorField(lambda xs: [0.0] * 7, n)
    assert np.all(lie_derivative_eta(zero, p) == 0.0)
    v = rng.normal(size=p.shape)
    assert np.allclose(lie_derivative_eta(dilation_generator(n), p, v), 2 * np.einsum("sk...,...k->s...", contact_form(p, n), v))


@pytest.mark.parametrize("n", [1, 2])
def test_dilation_and_translations(rng, n):
    p = grid(rng, n)
    ok, fit = qc_field_check(dilation_generator(n), p)
    assert ok
    assert np.max(np.abs(fit.nu - 2.0)) < 1e-9
    assert np.max(np.abs(fit.O)) < 1e-9
    for _ in range(3):
        ok, fit = qc_field_check(translation_generator(rng.normal(size=dim(n))), p)
        assert ok
        assert np.max(np.abs(fit.nu)) < 1e-9 and np.max(np.abs(fit.O)) < 1e-9
    assert np.all(fit.cond < 1e3)


def test_rotation(rng):
    n = 2
    p = grid(rng, n)
    tau = np.array([0.3, -0.5, 0.8])
    tau /= np.linalg.norm(tau)
    ok, fit = qc_field_check(rotation_generator(n, tau), p)
    assert ok
    assert np.max(np.abs(fit.nu)) < 1e-9
    assert np.max(fit.antisymmetry) < 1e-9
    O = fit.O
    assert np.max(np.abs(O - O[0])) < 1e-12  # constant
    assert np.max(np.abs(O[0])) > 0.5
    # O rotates the forms by the adjoint action of tau: o = 2 [tau]_x
    hat = np.array([[0, -tau[2], tau[1]], [tau[2], 0, -tau[0]], [-tau[1], tau[0], 0]])
    assert np.allclose(O[0], 2 * hat, atol=1e-12)
    # the flow oracle agrees
    v = rng.normal(size=p.shape)
    Q = rotation_generator(n, tau)
    assert np.max(np.abs(lie_derivative_eta(Q, p, v) - flow_lie_derivative(Q, p, v))) < 1e-6


def test_right_rotation_with_rotated_center_is_not_qc(rng):
    n = 1
    p = grid(rng, n)
    ok, fit = qc_field_check(right_rotation_generator(n, [0.0, 0.0, 1.0]), p)
    assert not ok
    assert np.max(fit.residual) > 0.1


def test_non_qc_field(rng):
    n = 1
    p = grid(rng, n)
    ok, fit = qc_field_check(t1_xi1(n), p)
    assert not ok
    assert np.max(fit.residual) > 0.5


@pytest.mark.parametrize("n", [1, 2])
def test_cartan_vs_flow(rng, n):
    p = grid(rng, n, 50)
    v = rng.normal(size=p.shape)
    fields = [dilation_generator(n), translation_generator(rng.normal(size=dim(n))), t1_xi1(n)]
    for Q in fields:
        diff = lie_derivative_eta(Q, p, v) - flow_lie_derivative(Q, p, v)
        assert np.max(np.abs(diff)) < 1e-6, Q.name


@pytest.mark.parametrize("n", [1, 2])
def test_reconstruction(rng, n):
    p = grid(rng, n)
    tau = rng.normal(size=3)
    for Q in (dilation_generator(n), translation_generator(rng.normal(size=dim(n))), rotation_generator(n, tau)):
        assert qc_field_check(Q, p)[0]
        for i in (1, 2, 3):
            assert np.max(reconstruction_error(Q, p, i=i)) < 1e-10
    assert np.max(reconstruction_error(t1_xi1(n), p)) > 0.1


def test_horizontal_part_sign(rng):
    """The reconstructed field from f = (w_1, w_2, w_3) is the dilation itself."""
    n = 1
    fs = [coordinate_field(center_index(n, s), 7) for s in (1, 2, 3)]
    p = grid(rng, n)
    assert np.allclose(qc_field_from_triple(*fs)(p), dilation_generator(n)(p), atol=1e-13)


def test_dump(tmp_path, rng):
    n = 1
    p = grid(rng, n, 5)
    ok, fit = qc_field_check(dilation_generator(n), p)
    path = tmp_path / "fit.csv"
    dump_fit(path, p, fit)
    rows = list(csv.reader(open(path)))
    assert rows[0][:7] == [f"p{k}" for k in range(7)]
    assert len(rows) == 6
    assert np.isclose(float(rows[1][7]), 2.0)
