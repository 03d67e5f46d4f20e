"""Dense Hermitian-matrix substrate for dimensions up to 8.

Thin layer over numpy: Kronecker products, Hermitian eigendecomposition,
partial trace and partial transpose, plus a validating constructor that
re-symmetrizes input to absorb round-off.  All functions treat matrices as
immutable values and return fresh arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import SolverFailure

HERM_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SX, SY, SZ)


def hermitian(entries, tol: float = HERM_TOL) -> np.ndarray:
    """Validated Hermitian-matrix constructor.

    Checks Hermiticity entrywise within ``tol`` and returns the exactly
    symmetrized matrix (m + m†)/2 so downstream code never sees round-off
    asymmetry.
    """
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    return (m + m.conj().T) / 2


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""
    m = hermitian(m)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # non-convergence of the LAPACK iteration
        raise SolverFailure(f"eigendecomposition failed: {exc}") from exc
    return w, v


def min_eig(m) -> float:
    """Smallest eigenvalue; accepts anything ``eigh`` accepts."""
    return float(eigh(m)[0][0])


def partial_trace(m, dims, keep) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    ``dims`` are the factor dimensions in tensor order; ``keep`` the indices
    of factors to retain (order preserved).  The total trace is preserved.
    """
    m = np.asarray(m, dtype=complex)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    if int(np.prod(dims)) != m.shape[0] or m.shape[0] != m.shape[1]:
        raise ValueError(f"dims {dims} do not match matrix shape {m.shape}")
    keep = sorted(set(int(k) for k in (keep if np.iterable(keep) else [keep])))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} factors")
    traced = [i for i in range(n) if i not in keep]
    perm = keep + traced
    t = m.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    dk = int(np.prod([dims[i] for i in keep], dtype=int)) if keep else 1
    dt = int(np.prod([dims[i] for i in traced], dtype=int)) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ikjk->ij", t)


def partial_transpose(m, subsystem: int = 1) -> np.ndarray:
    """Transpose one factor of a two-qubit (4x4) operator.

    ``subsystem`` is 0 for A, 1 for B.  Involution; preserves trace and
    Hermiticity.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError("partial_transpose expects a 4x4 matrix")
    if subsystem not in (0, 1):
        raise ValueError("subsystem must be 0 (A) or 1 (B)")
    t = m.reshape(2, 2, 2, 2)
    if subsystem == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(4, 4)
