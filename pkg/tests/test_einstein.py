import numpy as np
import pytest

from qcgeom.calculus import apply, full_hessian
from qcgeom.einstein import (
    HData,
    SolutionParams,
    conformal_ricci_traceless,
    conformal_scal,
    conformal_torsion_parts,
    expected_scal,
    hessian_relations,
    mu_o,
    residual_con01,
    residual_con03,
    solution_h,
    vertical_hessian,
    yamabe_residual,
    yamabe_u,
)
from qcgeom.heis import center_index, dim, frame
from qcgeom.jets import constant_field, coordinate_field


def grid(rng, n, m=300):
    return rng.uniform(-2, 2, size=(m, dim(n)))


def random_params(rng, n):
    c, nu = rng.uniform(0.2, 2.0, size=2)
    return SolutionParams(float(c), float(nu), n, tuple(rng.uniform(-1, 1, size=dim(n))))


def test_params_validation():
    with pytest.raises(ValueError):
        SolutionParams(0.0, 1.0)
    with pytest.raises(ValueError):
        SolutionParams(1.0, -1.0)
    with pytest.raises(ValueError):
        SolutionParams(1.0, 1.0, 1, (0.0,) * 6)
    assert mu_o(SolutionParams(2.0, 3.0)) == 18.0


def test_solution_values(rng):
    assert solution_h(SolutionParams(1.0, 1.0))(np.zeros(7)) == 1.0
    p = np.zeros(7)
    p[center_index(1, 1)] = 1.0
    assert solution_h(SolutionParams(2.0, 1.0))(p) == 4.0
    for n in (1, 2):
        h = solution_h(random_params(rng, n))
        assert np.all(h(rng.uniform(-5, 5, size=(10_000, dim(n)))) > 0)


def test_constant_h_gives_zero(rng):
    n = 2
    p = grid(rng, n, 20)
    h = constant_field(3.0, dim(n))
    assert np.all(residual_con01(h, p) == 0)
    assert np.all(residual_con03(h, p) == 0)
    assert np.all(hessian_relations(h, p) == 0)
    diag, off = vertical_hessian(h, p)
    assert np.all(diag == 0) and np.all(off == 0)
    assert np.all(conformal_scal(h, p) == 0)
    assert np.all(conformal_ricci_traceless(h, p) == 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_solution_family_identities(rng, n):
    for _ in range(3):
        params = random_params(rng, n)
        h = solution_h(params)
        p = grid(rng, n)
        d = HData(h, p, n)
        sc = d.scale()
        assert np.max(np.abs(residual_con01(d, p)) / sc) < 1e-8
        assert np.max(np.abs(residual_con03(d, p)) / sc) < 1e-8
        assert np.max(hessian_relations(d, p) / sc) < 1e-8
        diag, off = vertical_hessian(d, p)
        assert np.max(np.abs(diag - 8 * mu_o(params)) / sc) < 1e-8
        assert np.max(off / sc) < 1e-8
        assert np.max(np.abs(conformal_ricci_traceless(d, p)) / sc) < 1e-8


def test_con03_trivial_for_n1(rng):
    h = coordinate_field(0, 7) * coordinate_field(1, 7) + 5.0
    assert np.all(residual_con03(h, grid(rng, 1, 10)) == 0)


def test_vertical_hessian_unit_params(rng):
    diag, off = vertical_hessian(solution_h(SolutionParams(1.0, 1.0)), grid(rng, 1, 50))
    assert np.allclose(diag, 8.0, atol=1e-12)
    assert np.all(off == 0)


def test_non_solutions(rng):
    n = 1
    p = grid(rng, n, 50)
    # t^1 is linear so its Hessian vanishes; x t^1 has a nonzero mixed Hessian
    xt = coordinate_field(center_index(n, 1), 7) * coordinate_field(0, 7)
    assert np.max(np.abs(residual_con01(xt, p))) > 1.0
    assert np.max(hessian_relations(xt, p)) > 1.0
    h = constant_field(1.0, 7) + coordinate_field(0, 7)
    pts = rng.uniform(-0.3, 0.3, size=(50, 7))
    t0, _ = conformal_torsion_parts(h * h, pts)
    assert np.max(np.abs(t0)) > 1e-2


def test_t1_is_invisible_to_con01(rng):
    """t^1 has zero horizontal Hessian and zero Reeb derivatives, so con01 cannot see it."""
    n = 2
    params = random_params(rng, n)
    h = solution_h(params)
    p = grid(rng, n, 50)
    t1 = coordinate_field(0, dim(n))
    base = residual_con01(h, p)
    for eps in (1e-2, 1e-3, 1e-4):
        assert np.array_equal(residual_con01(h + eps * t1, p), base)
    # a quadratic perturbation is visible and linear in eps
    quad = t1 * t1
    r = [np.max(np.abs(residual_con01(h + eps * quad, p) - base)) for eps in (1e-2, 1e-3)]
    assert np.isclose(r[0] / r[1], 10.0, rtol=1e-6)


def test_scalar_curvature(rng):
    for n in (1, 2, 3):
        params = random_params(rng, n)
        h = solution_h(params)
        p = grid(rng, n)
        s = conformal_scal(h, p)
        target = expected_scal(params)
        origin_value = conformal_scal(solution_h(SolutionParams(params.c, params.nu, n)), np.zeros(dim(n)))
        assert np.isclose(origin_value, target, rtol=1e-14)
        assert (s.max() - s.min()) / abs(s.mean()) < 1e-8
        assert np.max(np.abs(s - target)) / target < 1e-8
    assert conformal_scal(constant_field(2.0, 7), np.zeros(7)) == 0.0
    with pytest.raises(ValueError):
        conformal_scal(constant_field(-1.0, 7), np.zeros(7))


def test_three_sasakian_normalisation():
    for n in (1, 2, 3):
        nu = 0.7
        params = SolutionParams(1 / (8 * nu), nu, n)
        value = conformal_scal(solution_h(params), np.zeros(dim(n)))
        assert abs(value - 16 * n * (n + 2)) / (16 * n * (n + 2)) < 1e-8


@pytest.mark.parametrize("n", [1, 2])
def test_yamabe(rng, n):
    params = random_params(rng, n)
    h = solution_h(params)
    u = yamabe_u(h, n)
    p = grid(rng, n)
    res, sc = yamabe_residual(u, p, expected_scal(params), n, return_scale=True)
    assert np.max(np.abs(res) / sc) < 1e-7
    # u decays like |q|^(-4n-4), so measure the wrong-constant residual against the terms themselves
    lap = yamabe_residual(u, p, 0.0, n)
    wrong = yamabe_residual(u, p, 1.5 * expected_scal(params), n)
    assert np.min(np.abs(wrong) / np.abs(lap)) > 0.4
    assert np.all(yamabe_residual(constant_field(0.3, dim(n)), p, 0.0, n) == 0)
    with pytest.raises(ValueError):
        yamabe_residual(constant_field(0.0, dim(n)), p, 1.0, n)


def test_higher_order_facts(rng):
    n = 2
    params = SolutionParams(0.8, 1.3, n)
    h = solution_h(params)
    m = mu_o(params)
    p = grid(rng, n, 30)
    for alpha in (1, 2):
        T = frame("T", alpha, n)
        t3 = apply(T, apply(T, apply(T, h)))
        t4 = apply(T, t3)
        assert np.allclose(t4(p), 24 * m, rtol=1e-12)
        assert np.allclose(t3(p), 24 * m * p[:, 4 * (alpha - 1)], rtol=1e-10, atol=1e-10)
    for s in (1, 2, 3):
        xih = apply(frame(f"xi{s}", None, n), h)
        H = full_hessian(xih, p, n)
        for a in range(n):
            for b in range(n):
                assert np.max(np.abs(H[4 * a, 4 * b])) < 1e-10
