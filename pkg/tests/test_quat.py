import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcgeom.quat import BASIS, ONE, I, J, K, Quaternion, as_hvector, conj, hnorm_sq, hvector_array, inverse, mul, norm, qdot

coef = st.floats(-10, 10, allow_nan=False)
quats = st.builds(Quaternion, coef, coef, coef, coef)
nonzero = quats.filter(lambda q: q.norm() > 1e-3)


def test_basis_table():
    assert I * I == -ONE and J * J == -ONE and K * K == -ONE
    assert I * J == K and J * K == I and K * I == J
    assert J * I == -K
    assert I * J * K == -ONE


def test_spec_examples():
    assert mul(I, J) == K
    q = Quaternion(1.5, -2.0, 0.25, 3.0)
    assert q * 1 == q
    assert (ONE + I) * (ONE + J) == Quaternion(1, 1, 1, 1)
    assert conj(I) == -I
    assert inverse(Quaternion(2.0)) == Quaternion(0.5)
    assert norm(Quaternion(1, 1, 1, 1)) == 2.0


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        Quaternion().inverse()


@settings(max_examples=200, deadline=None)
@given(quats, quats, quats)
def test_associative(a, b, c):
    assert ((a * b) * c).allclose(a * (b * c), atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(quats, quats)
def test_norm_multiplicative_and_conj(a, b):
    assert np.isclose((a * b).norm(), a.norm() * b.norm(), rtol=1e-12, atol=1e-12)
    assert (a * b).conj().allclose(b.conj() * a.conj(), atol=1e-10)
    assert np.isclose((a * b).re(), (b * a).re(), atol=1e-10)
    assert (a * a.conj()).allclose(Quaternion(a.norm_sq()), atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(nonzero, nonzero)
def test_inverse_of_product(a, b):
    assert (a * b).inverse().allclose(b.inverse() * a.inverse(), atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(nonzero, quats)
def test_unit_rotation_preserves_norm(lam, q):
    u = lam / lam.norm()
    assert np.isclose((u * q * u.conj()).norm(), q.norm(), atol=1e-9)


def test_batched_coefficients(rng):
    a = Quaternion.from_array(rng.normal(size=(50, 4)))
    b = Quaternion.from_array(rng.normal(size=(50, 4)))
    prod = (a * b).to_array()
    for k in range(50):
        qa = Quaternion(*a.to_array()[k])
        qb = Quaternion(*b.to_array()[k])
        assert np.allclose(prod[k], (qa * qb).to_array(), atol=1e-14)


def test_hvectors(rng):
    arr = rng.normal(size=8)
    qs = as_hvector(arr)
    assert len(qs) == 2
    assert np.array_equal(hvector_array(qs), arr)
    assert np.isclose(hnorm_sq(qs), np.sum(arr**2))
    assert hnorm_sq(as_hvector(np.zeros(8))) == 0.0
    # q . conj(q) = sum q^a conj(q^a) is real
    d = qdot(qs, qs)
    assert d.allclose(Quaternion(np.sum(arr**2)))


def test_array_on_left_defers():
    q = Quaternion(1.0, 2.0, 3.0, 4.0)
    out = np.array([2.0, 3.0]) * q
    assert isinstance(out, Quaternion)
    assert np.allclose(out.to_array(), [[2, 4, 6, 8], [3, 6, 9, 12]])
