import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multischmidt.errors import NotCommuting, NotHermitian, ShapeMismatch
from multischmidt.linalg import (
    commutes,
    complete_unitary,
    hermitian_eig,
    is_unitary,
    joint_diagonalize,
    offdiag_norm,
    singular_values,
    svd,
)
from multischmidt.state import haar_unitary

from helpers import random_hermitian

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def _recon(es):
    return es.basis @ np.diag(es.values) @ es.basis.conj().T


# hermitian_eig

def test_eig_identity():
    es = hermitian_eig(np.eye(3))
    assert np.allclose(es.values, [1, 1, 1])
    assert is_unitary(es.basis)


def test_eig_pauli_x():
    es = hermitian_eig(X)
    assert np.allclose(es.values, [1, -1])
    v = es.basis[:, 0] / es.basis[0, 0]
    assert np.allclose(v, [1, 1])
    v = es.basis[:, 1] / es.basis[0, 1]
    assert np.allclose(v, [1, -1])


def test_eig_random_reconstruction():
    h = random_hermitian(5, 0)
    es = hermitian_eig(h)
    assert np.linalg.norm(_recon(es) - h) < 1e-10
    assert is_unitary(es.basis)


@pytest.mark.parametrize("n", [1, 2, 3, 6, 10, 17])
def test_eig_matches_numpy(n):
    h = random_hermitian(n, n)
    es = hermitian_eig(h)
    ref = np.sort(np.linalg.eigvalsh(h))[::-1]
    assert np.allclose(es.values, ref, atol=1e-12)
    assert np.all(np.diff(es.values) <= 0)


def test_eig_degenerate():
    u = haar_unitary(4, np.random.default_rng(3))
    h = u @ np.diag([2.0, 2.0, -1.0, -1.0]) @ u.conj().T
    es = hermitian_eig(h)
    assert np.allclose(es.values, [2, 2, -1, -1])
    assert np.linalg.norm(_recon(es) - h) < 1e-12


def test_eig_not_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eig_not_square():
    with pytest.raises(ShapeMismatch):
        hermitian_eig(np.zeros((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10**6))
def test_eig_property(n, seed):
    h = random_hermitian(n, seed)
    es = hermitian_eig(h)
    assert np.linalg.norm(_recon(es) - h) <= 10 * 1e-9 * max(np.linalg.norm(h), 1e-14)
    assert is_unitary(es.basis)


# svd

def test_svd_diag():
    p, s, q = svd(np.diag([3.0, 2.0]))
    assert np.allclose(s, [3, 2])
    assert np.allclose(np.abs(p), np.eye(2)) and np.allclose(np.abs(q), np.eye(2))


def test_svd_zero():
    p, s, q = svd(np.zeros((2, 3)))
    assert np.all(s == 0)
    assert is_unitary(p) and is_unitary(q)


@pytest.mark.parametrize("shape", [(3, 4), (4, 3), (1, 5), (5, 1), (6, 6), (4, 32)])
def test_svd_matches_numpy(shape):
    rng = np.random.default_rng(sum(shape))
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    p, s, q = svd(a)
    m, n = shape
    full = np.zeros((m, n), dtype=complex)
    full[: len(s), : len(s)] = np.diag(s)
    assert np.linalg.norm(p @ full @ q - a) < 1e-10
    assert np.allclose(s, np.linalg.svd(a, compute_uv=False), atol=1e-12)
    assert is_unitary(p) and is_unitary(q)


def test_svd_small_singular_values_kept():
    # rank decisions at 1e-10 relative need singular values well below sqrt(eps)
    u = haar_unitary(4, np.random.default_rng(1))
    v = haar_unitary(4, np.random.default_rng(2))
    a = u @ np.diag([1.0, 1e-3, 1e-9, 1e-12]) @ v
    s = singular_values(a)
    assert np.allclose(s, [1.0, 1e-3, 1e-9, 1e-12], rtol=1e-3, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
def test_svd_property(m, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    p, s, q = svd(a)
    full = np.zeros((m, n), dtype=complex)
    full[: len(s), : len(s)] = np.diag(s)
    assert np.linalg.norm(p @ full @ q - a) <= 10 * 1e-9 * np.linalg.norm(a)
    assert np.all(s >= 0) and np.all(np.diff(s) <= 0)


# commutes / is_unitary

def test_commutes_examples():
    assert commutes(np.eye(2), X)
    assert commutes(np.diag([1, 2]), np.diag([3, 4]))
    assert not commutes(X, Z)


def test_commutes_shape():
    with pytest.raises(ShapeMismatch):
        commutes(np.eye(2), np.eye(3))


def test_is_unitary_examples():
    assert is_unitary(np.eye(3))
    assert not is_unitary(np.diag([1, 2]))
    assert is_unitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def test_complete_unitary():
    rng = np.random.default_rng(0)
    cols = haar_unitary(5, rng)[:, :2]
    u = complete_unitary(cols, 5)
    assert is_unitary(u)
    assert np.allclose(u[:, :2], cols)


# joint_diagonalize

def test_joint_single_matches_eig():
    h = random_hermitian(4, 9)
    w = joint_diagonalize([h])
    assert offdiag_norm(w.conj().T @ h @ w) < 1e-9


def test_joint_diagonal_pair():
    w = joint_diagonalize([np.diag([1.0, 2.0]), np.diag([5.0, 5.0])])
    assert np.allclose(np.abs(w), np.eye(2)) or np.allclose(np.abs(w), np.eye(2)[::-1])


def test_joint_planted():
    rng = np.random.default_rng(4)
    q = haar_unitary(5, rng)
    # degenerate individually, jointly resolvable
    a = q @ np.diag([1, 1, 2, 2, 3]) @ q.conj().T
    b = q @ np.diag([4, 5, 4, 5, 4]) @ q.conj().T
    w = joint_diagonalize([a, b])
    for m in (a, b):
        assert offdiag_norm(w.conj().T @ m @ w) < 1e-9
    assert is_unitary(w)


def test_joint_not_commuting():
    with pytest.raises(NotCommuting):
        joint_diagonalize([X, Z])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 4), st.integers(0, 10**6))
def test_joint_property(n, k, seed):
    rng = np.random.default_rng(seed)
    q = haar_unitary(n, rng)
    mats = [q @ np.diag(rng.integers(0, 3, n).astype(float)) @ q.conj().T for _ in range(k)]
    w = joint_diagonalize(mats)
    for m in mats:
        assert offdiag_norm(w.conj().T @ m @ w) <= 10 * 1e-9 * max(np.linalg.norm(m), 1e-14)


def test_offdiag_norm_no_cancellation():
    m = np.diag([1.0, 1e-3]).astype(complex)
    m[0, 1] = 1e-17
    assert offdiag_norm(m) == pytest.approx(1e-17, rel=1e-12)
    stacked = np.array([m, m.T])
    assert offdiag_norm(stacked) == pytest.approx(np.sqrt(2) * 1e-17, rel=1e-12)
    assert offdiag_norm(np.ones((2, 3))) == pytest.approx(2.0)
