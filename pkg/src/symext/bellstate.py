"""Bell-diagonal two-qubit state algebra.

A Bell-diagonal state is a mixture of the four Bell projectors; it is fully
described by its eigenvalue vector (p_I, p_x, p_y, p_z), where index j labels
the Bell state obtained by applying the Pauli sigma_j to Bob's half of Phi+.
An equivalent coordinate system (alpha_1, alpha_2, alpha_3) diagonalizes the
structure of both the extendibility criterion and the distillation dynamics:

    alpha_1 = p_I - p_x - p_y + p_z
    alpha_2 = sqrt(2) (p_I - p_z)
    alpha_3 = sqrt(2) (p_x - p_y)

with alpha_0 = sum(p) = 1 for normalized states.  The state tetrahedron is
cut out by alpha_1 +/- sqrt(2) alpha_2 >= -1 and -alpha_1 +/- sqrt(2) alpha_3
>= -1, one inequality per eigenvalue.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import matrix
from .errors import NotAStateError
from .jsonfmt import dumps

SQRT2 = math.sqrt(2.0)

#: numerical slack absorbed by constructors (clamp-and-renormalize)
STATE_TOL = 1e-12

# Bell basis in the computational basis (|00>,|01>,|10>,|11>), column order
# (Phi+, Psi+, Psi-, Phi-).  Phases fixed so every vector is real.
BELL_VECTORS = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, -1, 0],
        [1, 0, 0, -1],
    ],
    dtype=complex,
).T / SQRT2

BELL_LABELS = ("phi+", "psi+", "psi-", "phi-")


def bell_projector(j: int) -> np.ndarray:
    v = BELL_VECTORS[:, j]
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class BellProbs:
    """Eigenvalue 4-vector (p_I, p_x, p_y, p_z) of a Bell-diagonal state.

    The float fields are authoritative.  Operations that produce states by
    exact rational recursions (the distillation steps) may attach the exact
    components as a hidden cache so that derived log-ratio quantities keep
    their algebraic identities beyond float-storage precision; the cache
    never affects equality or serialization.
    """

    p_i: float
    p_x: float
    p_y: float
    p_z: float
    _exact: tuple[Fraction, Fraction, Fraction, Fraction] | None = field(
        default=None, repr=False, compare=False
    )

    @classmethod
    def from_values(cls, values) -> "BellProbs":
        p = np.asarray(values, dtype=float)
        if p.shape != (4,):
            raise NotAStateError(f"expected 4 probabilities, got shape {p.shape}")
        if np.min(p) < -STATE_TOL:
            raise NotAStateError(f"negative probability {np.min(p):.3e}")
        if abs(float(np.sum(p)) - 1.0) > STATE_TOL:
            raise NotAStateError(f"probabilities sum to {np.sum(p)!r}, not 1")
        if np.min(p) < 0.0:  # absorb round-off without perturbing clean input
            p = np.clip(p, 0.0, None)
            p = p / np.sum(p)
        return cls(*[float(x) for x in p])

    @classmethod
    def from_exact(cls, fracs) -> "BellProbs":
        """Construct from exact nonnegative rationals summing to 1."""
        fracs = tuple(Fraction(f) for f in fracs)
        if len(fracs) != 4 or any(f < 0 for f in fracs) or sum(fracs) != 1:
            raise NotAStateError("exact components must be 4 nonnegative rationals summing to 1")
        return cls(*(float(f) for f in fracs), _exact=fracs)

    def exact(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """Exact rational components: the cache when present, else the floats."""
        if self._exact is not None:
            return self._exact
        return tuple(Fraction(v) for v in self.as_tuple())

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_i, self.p_x, self.p_y, self.p_z)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    def to_json(self) -> str:
        return dumps({"p": list(self.as_tuple())})

    @classmethod
    def from_json(cls, text: str) -> "BellProbs":
        return cls.from_values(json.loads(text)["p"])


@dataclass(frozen=True)
class AlphaCoords:
    """Working coordinates (alpha_1, alpha_2, alpha_3); alpha_0 == 1 implicitly."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        for name, val in (("a1", self.a1), ("a2", self.a2), ("a3", self.a3)):
            if not math.isfinite(val):
                raise NotAStateError(f"{name} is not finite")
        if min(state_inequalities(self.a1, self.a2, self.a3)) < -STATE_TOL:
            raise NotAStateError(
                f"({self.a1}, {self.a2}, {self.a3}) lies outside the state tetrahedron"
            )

    @classmethod
    def from_values(cls, values) -> "AlphaCoords":
        a = np.asarray(values, dtype=float)
        if a.shape == (4,):
            if abs(a[0] - 1.0) > STATE_TOL:
                raise NotAStateError(f"alpha_0 = {a[0]!r}, must be 1 for a state")
            a = a[1:]
        if a.shape != (3,):
            raise NotAStateError(f"expected 3 or 4 coordinates, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)

    def as_tuple4(self) -> tuple[float, float, float, float]:
        return (1.0, self.a1, self.a2, self.a3)

    def to_json(self) -> str:
        return dumps({"alpha": list(self.as_tuple4())})

    @classmethod
    def from_json(cls, text: str) -> "AlphaCoords":
        return cls.from_values(json.loads(text)["alpha"])


def state_inequalities(a1: float, a2: float, a3: float) -> tuple[float, float, float, float]:
    """The four tetrahedron constraints, each >= 0 iff one eigenvalue is >= 0.

    Order matches the eigenvalue order (p_I, p_x, p_y, p_z).
    """
    return (
        a1 + SQRT2 * a2 + 1.0,
        -a1 + SQRT2 * a3 + 1.0,
        -a1 - SQRT2 * a3 + 1.0,
        a1 - SQRT2 * a2 + 1.0,
    )


def p_to_alpha(p: BellProbs) -> AlphaCoords:
    pi, px, py, pz = p.as_tuple()
    return AlphaCoords(pi - px - py + pz, SQRT2 * (pi - pz), SQRT2 * (px - py))


def alpha_to_p(alpha: AlphaCoords) -> BellProbs:
    """Inverse coordinate map; exact round-trip partner of ``p_to_alpha``."""
    a1, a2, a3 = alpha.as_tuple()
    return BellProbs.from_values(
        (
            (1.0 + a1 + SQRT2 * a2) / 4.0,
            (1.0 - a1 + SQRT2 * a3) / 4.0,
            (1.0 - a1 - SQRT2 * a3) / 4.0,
            (1.0 + a1 - SQRT2 * a2) / 4.0,
        )
    )


def to_density_matrix(p: BellProbs) -> np.ndarray:
    """4x4 density matrix sum_j p_j |beta_j><beta_j|."""
    w = p.as_array()
    return matrix.hermitian((BELL_VECTORS * w) @ BELL_VECTORS.conj().T)


def twirl(rho) -> BellProbs:
    """Bell-basis diagonal of a two-qubit density matrix.

    Equals the state after averaging over the four sigma_i x sigma_i
    conjugations, read off as Bell-diagonal eigenvalues.  Bell-diagonal
    inputs are fixed points.
    """
    rho = matrix.hermitian(rho)
    if rho.shape != (4, 4):
        raise ValueError("twirl expects a 4x4 density matrix")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise NotAStateError("input is not normalized")
    if matrix.min_eig(rho) < -1e-10:
        raise NotAStateError("input is not positive semidefinite")
    diag = np.einsum("ij,jk,ik->i", BELL_VECTORS.conj().T, rho, BELL_VECTORS.T).real
    return BellProbs.from_values(diag)


def qber(p: BellProbs) -> tuple[float, float, float]:
    """Error rates (q_x, q_y, q_z); q_j = 1 - p_I - p_j."""
    pi, px, py, pz = p.as_tuple()
    return (1.0 - pi - px, 1.0 - pi - py, 1.0 - pi - pz)


def is_separable(p: BellProbs) -> bool:
    """Positivity of the partial transpose (exact for two qubits)."""
    pt = matrix.partial_transpose(to_density_matrix(p), 1)
    return matrix.min_eig(pt) >= -STATE_TOL


def permute(p: BellProbs, perm) -> BellProbs:
    """Reorder the eigenvalues: result[i] = p[perm[i]].

    Any reordering is realizable by a local change of basis, so derived
    verdicts (separability, extendibility) are invariant under it.
    """
    perm = tuple(int(i) for i in perm)
    if sorted(perm) != [0, 1, 2, 3]:
        raise ValueError(f"{perm} is not a permutation of (0, 1, 2, 3)")
    vals = p.as_tuple()
    return BellProbs.from_values([vals[i] for i in perm])
