import numpy as np
import pytest

from symext import matrix
from symext.bellstate import BELL_VECTORS, bell_projector

SQRT2 = np.sqrt(2.0)


def test_hermitian_validates_and_symmetrizes():
    m = matrix.hermitian([[1.0, 1e-13j], [0.0, 2.0]])
    assert np.allclose(m, m.conj().T)
    with pytest.raises(ValueError):
        matrix.hermitian([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        matrix.hermitian(np.zeros((2, 3)))


def test_kron_identity():
    assert np.array_equal(matrix.kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_diagonal_paulis():
    assert np.allclose(matrix.kron(matrix.SZ, matrix.SZ), np.diag([1.0, -1.0, -1.0, 1.0]))


def test_kron_sx_sx_fixes_phi_plus():
    # direct matrix-vector arithmetic in the computational basis
    phi_plus = np.array([1.0, 0.0, 0.0, 1.0]) / SQRT2
    assert np.allclose(matrix.kron(matrix.SX, matrix.SX) @ phi_plus, phi_plus)


def test_kron_trace_multiplicative():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = matrix.hermitian(
            (lambda g: g + g.conj().T)(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        )
        b = matrix.hermitian(
            (lambda g: g + g.conj().T)(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        )
        assert np.isclose(np.trace(matrix.kron(a, b)), np.trace(a) * np.trace(b))
        # associativity
        c = np.eye(2)
        assert np.allclose(matrix.kron(matrix.kron(a, c), b), matrix.kron(a, matrix.kron(c, b)))


def test_eigh_sorted_permutation():
    w, v = matrix.eigh(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1.0, 2.0, 3.0])
    # columns are a permutation of the standard basis
    assert np.allclose(np.abs(v), np.eye(3)[:, [1, 2, 0]])


def test_eigh_pure_state():
    w, _ = matrix.eigh(bell_projector(0))
    assert np.allclose(w, [0.0, 0.0, 0.0, 1.0], atol=1e-14)


def test_eigh_maximally_mixed():
    w, _ = matrix.eigh(np.eye(4) / 4)
    assert np.allclose(w, 0.25)


def test_eigh_reconstruction_random():
    rng = np.random.default_rng(7)
    for dim in (2, 3, 4, 8):
        for _ in range(25):
            g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            m = (g + g.conj().T) / 2
            w, v = matrix.eigh(m)
            assert np.all(np.diff(w) >= 0)
            assert np.linalg.norm((v * w) @ v.conj().T - m) <= 1e-10 * np.linalg.norm(m)
            assert np.allclose(v.conj().T @ v, np.eye(dim), atol=1e-12)


def test_partial_trace_bell_marginal():
    marg = matrix.partial_trace(bell_projector(0), (2, 2), keep=0)
    assert np.allclose(marg, np.eye(2) / 2)


def test_partial_trace_product():
    rng = np.random.default_rng(3)
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    a = (g + g.conj().T) / 2
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = (g + g.conj().T) / 2
    assert np.allclose(matrix.partial_trace(np.kron(a, b), (2, 3), keep=0), a * np.trace(b))
    assert np.allclose(matrix.partial_trace(np.kron(a, b), (2, 3), keep=1), b * np.trace(a))


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(11)
    g = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    m = (g + g.conj().T) / 2
    for keep in ((0,), (1,), (2,), (0, 1), (1, 2)):
        red = matrix.partial_trace(m, (2, 2, 2), keep=keep)
        assert np.isclose(np.trace(red), np.trace(m))


def test_partial_trace_dimension_mismatch():
    with pytest.raises(ValueError):
        matrix.partial_trace(np.eye(6), (2, 2), keep=0)


def test_partial_transpose_identity():
    assert np.allclose(matrix.partial_transpose(np.eye(4)), np.eye(4))


def test_partial_transpose_involution_and_trace():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        m = (g + g.conj().T) / 2
        for sub in (0, 1):
            pt = matrix.partial_transpose(m, sub)
            assert np.allclose(matrix.partial_transpose(pt, sub), m)
            assert np.isclose(np.trace(pt), np.trace(m))
            assert np.allclose(pt, pt.conj().T)


def test_partial_transpose_phi_plus_min_eig():
    # oracle: PT of the Phi+ projector is the swap operator over 2
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[2 * i + j, 2 * j + i] = 1.0
    pt = matrix.partial_transpose(bell_projector(0))
    assert np.allclose(pt, swap / 2)
    assert np.isclose(matrix.min_eig(pt), -0.5)


def test_bell_vectors_orthonormal():
    assert np.allclose(BELL_VECTORS.conj().T @ BELL_VECTORS, np.eye(4))
