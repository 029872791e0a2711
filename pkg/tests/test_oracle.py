import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from busgate.fock import enumerate_basis
from busgate.oracle import (embed_two_mode, fidelity, is_unitary, lift_unitary, permanent,
                            permanent_naive)


def random_unitary(n, rng):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_permanent_small_cases():
    assert permanent(np.zeros((0, 0))) == 1
    assert permanent([[2.0]]) == 2
    assert permanent([[1, 2], [3, 4]]) == pytest.approx(10)
    assert permanent(np.ones((5, 5))) == pytest.approx(120)


def test_permanent_limits():
    with pytest.raises(ValueError):
        permanent(np.ones((2, 3)))
    with pytest.raises(ValueError):
        permanent(np.ones((9, 9)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31))
def test_permanent_matches_naive(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n)) + 0j
    assert permanent(a) == pytest.approx(permanent_naive(a), rel=1e-9, abs=1e-9)


def test_hom_from_lifting():
    bs = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    lifted = lift_unitary(bs, 2)
    basis = enumerate_basis(2, 2)
    out = lifted @ basis.basis_vector((1, 1))
    assert abs(out[basis.position((1, 1))]) < 1e-15
    assert abs(out[basis.position((2, 0))]) ** 2 == pytest.approx(0.5)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(1, 3), st.integers(0, 2**31))
def test_lifting_is_unitary_and_multiplicative(m, n, seed):
    rng = np.random.default_rng(seed)
    u, v = random_unitary(m, rng), random_unitary(m, rng)
    lu, lv = lift_unitary(u, n), lift_unitary(v, n)
    assert is_unitary(lu, 1e-9)
    np.testing.assert_allclose(lift_unitary(u @ v, n), lu @ lv, atol=1e-9)


def test_one_photon_lift_is_the_matrix(rng):
    u = random_unitary(4, rng)
    np.testing.assert_allclose(lift_unitary(u, 1), u, atol=1e-12)


def test_lift_rejects():
    with pytest.raises(ValueError):
        lift_unitary(np.ones((2, 2)), 1)
    with pytest.raises(ValueError):
        lift_unitary(np.eye(3), 1, enumerate_basis(4, 1))


def test_fidelity():
    assert fidelity([1, 0], [1j, 0]) == pytest.approx(1.0)
    assert fidelity([1, 1], [1, -1]) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        fidelity([0, 0], [1, 0])


def test_embed_two_mode():
    g = np.array([[0, 1], [1, 0]])
    u = embed_two_mode(g, (1, 3), 4)
    assert u[1, 3] == 1 and u[3, 1] == 1 and u[0, 0] == 1 and u[1, 1] == 0
