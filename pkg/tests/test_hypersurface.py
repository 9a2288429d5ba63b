import numpy as np
import pytest

from qcgeom.decomp import standard_triple
from qcgeom.hypersurface import (
    INCONCLUSIVE,
    NOT_QC,
    QC,
    Hypersurface,
    deformed_sphere,
    dtheta,
    dtheta_relation_residual,
    ellipsoid,
    from_expression,
    hessian_criterion,
    horizontal_space,
    plane,
    project_to_surface,
    qc_check,
    sample_points,
    second_fundamental_form,
    second_fundamental_matrix,
    sphere,
    unit_normal,
)
from qcgeom.jets import constant_field


def test_sphere_horizontal_space_at_pole():
    n = 1
    p = np.zeros(8)
    p[4] = 1.0
    H = horizontal_space(sphere(n), p)
    assert H.shape == (8, 4)
    P = H @ H.T
    assert np.allclose(P, np.diag([1, 1, 1, 1, 0, 0, 0, 0]), atol=1e-12)


@pytest.mark.parametrize("surf", [sphere(1), ellipsoid(1, [1, 2]), ellipsoid(2, [0.5, 1.0, 3.0])], ids=lambda s: s.name)
def test_horizontal_space_invariant(rng, surf):
    for p in sample_points(surf, rng, 10):
        H = horizontal_space(surf, p)
        assert H.shape[1] == 4 * surf.n
        N = unit_normal(surf, p)
        assert np.max(np.abs(H.T @ N)) < 1e-12
        for Is in standard_triple(surf.n + 1):
            v = Is @ H
            assert np.max(np.abs(v - H @ (H.T @ v))) < 1e-12


def test_sphere_second_fundamental_form(rng):
    s = sphere(1)
    for p in sample_points(s, rng, 5):
        H = horizontal_space(s, p)
        X, Y = H @ rng.normal(size=4), H @ rng.normal(size=4)
        assert np.isclose(second_fundamental_form(s, p, X, Y), -X @ Y, atol=1e-12)
        assert abs(second_fundamental_form(s, p, X, Y) - second_fundamental_form(s, p, Y, X)) < 1e-12


def test_plane(rng):
    pl = plane(1)
    p = rng.normal(size=(3, 8))
    p[:, 0] = 0.0
    for q in p:
        assert np.all(second_fundamental_matrix(pl, q) == 0.0)
    verdict, worst, mineig = qc_check(pl, p)
    assert verdict == INCONCLUSIVE and worst == 0.0 and mineig == 0.0


def test_verdicts(rng):
    for surf in (sphere(1), ellipsoid(1, [1, 2]), ellipsoid(2, [1.0, 2.0, 0.5]), sphere(2, 1.5)):
        pts = sample_points(surf, rng, 20)
        verdict, worst, mineig = qc_check(surf, pts)
        assert verdict == QC, surf.name
        assert worst < 1e-10 and mineig > 1e-3
        assert hessian_criterion(surf, pts)[0] == QC
    bad = deformed_sphere(1, 0.5)
    pts = sample_points(bad, rng, 20)
    verdict, worst, _ = qc_check(bad, pts)
    assert verdict == NOT_QC and worst > 0.1
    assert hessian_criterion(bad, pts)[0] == NOT_QC


def test_dtheta_relation(rng):
    for surf in (sphere(1), ellipsoid(1, [1, 2]), ellipsoid(2, [1.0, 2.0, 0.5])):
        for p in sample_points(surf, rng, 10):
            H = horizontal_space(surf, p)
            X, Y = H @ rng.normal(size=H.shape[1]), H @ rng.normal(size=H.shape[1])
            assert abs(dtheta_relation_residual(surf, p, X, Y)) < 1e-8


def test_dtheta_antisymmetric(rng):
    s = ellipsoid(1, [1, 2])
    p = sample_points(s, rng, 1)[0]
    X, Y = rng.normal(size=8), rng.normal(size=8)
    assert np.isclose(dtheta(s, p, 2, X, Y), -dtheta(s, p, 2, Y, X), atol=1e-14)


def test_expression_dsl(rng):
    s = from_expression("t1**2 + x1**2 + y1**2 + z1**2 + pt**2 + px**2 + py**2 + pz**2 - 1", 1)
    pts = sample_points(s, rng, 10)
    assert np.allclose(np.sum(pts**2, axis=1), 1.0, atol=1e-12)
    assert qc_check(s, pts)[0] == QC
    e = from_expression("exp(t1) + x2**2 - 3", 1)
    p = project_to_surface(e, rng.normal(size=(4, 8)))
    assert np.max(np.abs(e.rho(p))) < 1e-10
    with pytest.raises(ValueError):
        from_expression("t1 + w7", 1)


def test_validation():
    with pytest.raises(ValueError):
        ellipsoid(1, [1.0])
    with pytest.raises(ValueError):
        ellipsoid(1, [1.0, -2.0])
    with pytest.raises(ValueError):
        Hypersurface(constant_field(1.0, 7), 1)
    with pytest.raises(ValueError):
        horizontal_space(sphere(1), np.zeros((2, 8)))
    with pytest.raises(ValueError):
        unit_normal(Hypersurface(constant_field(1.0, 8), 1), np.zeros(8))
