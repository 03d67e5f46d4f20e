"""Symmetry reduction of swap-invariant three-qubit operators.

Operators on A (x) B (x) B' that commute with the Pauli twirl and with the
B<->B' swap block-diagonalize after a change of basis into three encoded
qubits F, G, H:

    X_F = XXX   X_G = XIX   X_H = XXI
    Z_F = ZZZ   Z_G = ZZI   Z_H = ZIZ

In that basis a symmetrized Bell projector becomes trivial on F and block
diagonal on the GH triplet/singlet split,

    Sym_BB'(|beta_j><beta_j| (x) 1)  =  c * 1_F (x) (R_j  (+)  |Psi-><Psi-|),

with the 3x3 triplet blocks R_j written in the basis {|00>, |Psi+>, |11>}.
The positive prefactor c is measured numerically once and asserted equal for
all four Bell indices; positivity statements never depend on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import matrix
from .bellstate import BELL_VECTORS, bell_projector

SQRT2 = math.sqrt(2.0)

# B<->B' swap as an index permutation: |a b c> -> |a c b>
SWAP_PERM = np.array([4 * a + 2 * c + b for a in range(2) for b in range(2) for c in range(2)])
_SWAP_IX = np.ix_(SWAP_PERM, SWAP_PERM)

# encoded-basis assignments: FGH index -> ABB' index
_FGH_TO_ABB = (0b000, 0b110, 0b101, 0b011, 0b111, 0b001, 0b010, 0b100)


@dataclass(frozen=True)
class TripletBlock:
    """Triplet-subspace 3x3 block plus the singlet weight of a reduced operator."""

    r: np.ndarray
    singlet_weight: float

    def full_block(self) -> np.ndarray:
        """4x4 direct sum (triplet block, then singlet weight)."""
        out = np.zeros((4, 4))
        out[:3, :3] = self.r
        out[3, 3] = self.singlet_weight
        return out

    def min_eig(self) -> float:
        return min(float(np.linalg.eigvalsh(self.r)[0]), self.singlet_weight)


def swap_bb_matrix() -> np.ndarray:
    v = np.zeros((8, 8))
    v[SWAP_PERM, np.arange(8)] = 1.0
    return v


def symmetrize_bb(m) -> np.ndarray:
    """(M + V M V†)/2 for the B<->B' swap V; a trace-preserving projection."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (8, 8):
        raise ValueError("symmetrize_bb expects an 8x8 matrix on A(x)B(x)B'")
    return (m + m[_SWAP_IX]) / 2


def fgh_matrix() -> np.ndarray:
    """Permutation whose columns are the encoded FGH basis vectors in ABB' coordinates."""
    u = np.zeros((8, 8))
    for k, m in enumerate(_FGH_TO_ABB):
        u[m, k] = 1.0
    return u


_U = fgh_matrix()


def to_fgh(m) -> np.ndarray:
    """Rewrite an ABB'-ordered operator in the encoded FGH basis."""
    return _U.T @ np.asarray(m, dtype=complex) @ _U


def from_fgh(m) -> np.ndarray:
    return _U @ np.asarray(m, dtype=complex) @ _U.T


# GH basis change: computational (|00>,|01>,|10>,|11>) <- (|00>,|Psi+>,|11>,|Psi->)
_T_GH = np.array(
    [
        [1, 0, 0, 0],
        [0, 1 / SQRT2, 0, 1 / SQRT2],
        [0, 1 / SQRT2, 0, -1 / SQRT2],
        [0, 0, 1, 0],
    ]
)


def gh_block_matrix(triplet: np.ndarray, singlet_weight: float) -> np.ndarray:
    """4x4 GH operator with the given triplet block and singlet weight."""
    blk = np.zeros((4, 4), dtype=complex)
    blk[:3, :3] = triplet
    blk[3, 3] = singlet_weight
    return _T_GH @ blk @ _T_GH.T


def embed_gh_block(triplet: np.ndarray, singlet_weight: float) -> np.ndarray:
    """Lift 1_F (x) (triplet (+) singlet) from the FGH picture back to ABB' ordering."""
    return from_fgh(np.kron(np.eye(2), gh_block_matrix(triplet, singlet_weight)))


_R_PHI_P = np.array([[2, SQRT2, 0], [SQRT2, 1, 0], [0, 0, 0]])
_R_PHI_M = np.array([[2, -SQRT2, 0], [-SQRT2, 1, 0], [0, 0, 0]])
_R_PSI_P = np.array([[0, 0, 0], [0, 1, SQRT2], [0, SQRT2, 2]])
_R_PSI_M = np.array([[0, 0, 0], [0, 1, -SQRT2], [0, -SQRT2, 2]])
_R = (_R_PHI_P, _R_PSI_P, _R_PSI_M, _R_PHI_M)  # index order (I, x, y, z)


def r_matrix(j: int) -> TripletBlock:
    """Triplet block of the symmetrized Bell projector with index j in (I, x, y, z)."""
    if j not in (0, 1, 2, 3):
        raise ValueError("Bell index must be 0..3")
    return TripletBlock(_R[j].copy(), 1.0)


def reduce_bell_operator(k) -> TripletBlock:
    """Reduced form of sum_j k_j Sym(|beta_j><beta_j| (x) 1); k need not be positive.

    The triplet block is sum_j k_j R_j and the singlet weight is sum_j k_j;
    the omitted global prefactor (see ``reduction_prefactor``) does not affect
    positivity.
    """
    k = np.asarray(k, dtype=float)
    if k.shape != (4,):
        raise ValueError("expected a real 4-vector")
    r = sum(k[j] * _R[j] for j in range(4))
    return TripletBlock(r, float(np.sum(k)))


def f_matrices() -> tuple[np.ndarray, ...]:
    """Constraint matrices of the reduced 3x3 optimization problems.

    R_{Phi+-} = F0 + F1 +- sqrt(2) F2 and R_{Psi+-} = F0 - F1 +- sqrt(2) F3.
    """
    f0 = np.eye(3)
    f1 = np.diag([1.0, 0.0, -1.0])
    f2 = np.array([[0.0, 1, 0], [1, 0, 0], [0, 0, 0]])
    f3 = np.array([[0.0, 0, 0], [0, 0, 1], [0, 1, 0]])
    return f0, f1, f2, f3


@lru_cache(maxsize=1)
def reduction_prefactor() -> float:
    """Global constant c relating the 8x8 and reduced pictures, measured numerically.

    Evaluated from the Phi+ case and asserted identical (to 1e-12) for the
    other three Bell indices.
    """
    c_vals = []
    for j in range(4):
        w = to_fgh(symmetrize_bb(matrix.kron(bell_projector(j), np.eye(2))))
        target = np.kron(np.eye(2), gh_block_matrix(_R[j], 1.0))
        c = float(np.vdot(target, w).real / np.vdot(target, target).real)
        resid = float(np.linalg.norm(w - c * target))
        if resid > 1e-12:
            raise AssertionError(f"reduction mismatch for Bell index {j}: residual {resid:.2e}")
        c_vals.append(c)
    if max(c_vals) - min(c_vals) > 1e-12 or c_vals[0] <= 0:
        raise AssertionError(f"inconsistent reduction prefactors {c_vals}")
    return c_vals[0]
