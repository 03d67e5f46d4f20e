"""Closed-form symmetric-extension decision and certificates.

A Bell-diagonal state has a symmetric extension iff at least one of three
polynomial inequalities in (alpha_1, alpha_2, alpha_3) holds:

    (a)  4 a1 (a2^2 - a3^2) - (a2^2 - a3^2)^2 - 4 a1^2 (a2^2 + a3^2) >= 0
    (b)  a2^2 - a3^2 - 2 sqrt(2) a1 |a2| >= 0
    (c)  a3^2 - a2^2 + 2 sqrt(2) a1 |a3| >= 0

Condition (a) comes from a rank-one solution of the reduced trace-minimization
problem; (b) and (c) from the four rank-two solutions forced by complementary
slackness, which fill in the convex hull.  Every positive decision is backed
by an explicit 3x3 certificate Z with Tr[F_i Z] = alpha_i, Z >= 0 and
Tr Z <= 1, which lifts to an explicit 8x8 extension state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matrix, reduction
from .bellstate import AlphaCoords, BellProbs, p_to_alpha, to_density_matrix
from .errors import CertificateError, DegenerateInputError
from .jsonfmt import dumps

SQRT2 = math.sqrt(2.0)

#: additive slack on the boundary inequalities
BOUNDARY_TOL = 1e-12

#: inputs this close to a division-by-zero surface take the degenerate path
_DEGENERATE_TOL = 1e-13


def criterion_terms(alpha: AlphaCoords) -> tuple[float, float, float]:
    """The three left-hand sides; the state is extendible iff any is >= 0."""
    a1, a2, a3 = alpha.as_tuple()
    d = a2 * a2 - a3 * a3
    ga = 4.0 * a1 * d - d * d - 4.0 * a1 * a1 * (a2 * a2 + a3 * a3)
    gb = d - 2.0 * SQRT2 * a1 * abs(a2)
    gc = -d + 2.0 * SQRT2 * a1 * abs(a3)
    return (ga, gb, gc)


def has_symext(alpha: AlphaCoords) -> bool:
    return max(criterion_terms(alpha)) >= -BOUNDARY_TOL


def boundary_margin(alpha: AlphaCoords) -> float:
    """|max of the three criterion terms| — a proxy for distance to the decision boundary."""
    return abs(max(criterion_terms(alpha)))


def rank1_trace(alpha: AlphaCoords) -> float:
    """Trace of the rank-one certificate candidate.

    A value <= 1 proves extendibility (sufficient, not necessary).  Undefined
    when a1 = 0 or a2^2 = a3^2, where the rank-one construction divides by
    zero; callers fall back to the inequality test directly.
    """
    a1, a2, a3 = alpha.as_tuple()
    d = a2 * a2 - a3 * a3
    if abs(a1) < _DEGENERATE_TOL or abs(d) < _DEGENERATE_TOL:
        raise DegenerateInputError("rank-one trace undefined: a1 = 0 or a2^2 = a3^2")
    return (d * d + 4.0 * a1 * a1 * (a2 * a2 + a3 * a3)) / (4.0 * a1 * d)


@dataclass(frozen=True)
class ExtCertificate:
    """Primal extendibility certificate.

    ``z`` is a real symmetric 3x3 matrix with Tr[F_i z] = alpha_i, z >= 0 and
    Tr z <= 1.  ``witness_x`` carries the dual vertex (x1, x2, x3) whose
    slackness condition produced a rank-two ``z``; None otherwise.
    """

    kind: str  # rank_one | rank_two | boundary_vertex
    z: np.ndarray
    witness_x: tuple[float, float, float] | None = None

    @property
    def trace(self) -> float:
        return float(np.trace(self.z))

    def to_json(self) -> str:
        return dumps(
            {
                "kind": self.kind,
                "Z": self.z.tolist(),
                "trace": self.trace,
                "witness_x": list(self.witness_x) if self.witness_x is not None else None,
            }
        )


def _constraint_residual(z: np.ndarray, alpha: AlphaCoords) -> float:
    a1, a2, a3 = alpha.as_tuple()
    return max(
        abs(z[0, 0] - z[2, 2] - a1),
        abs(2.0 * z[0, 1] - a2),
        abs(2.0 * z[1, 2] - a3),
    )


def _rank_two_candidates(alpha: AlphaCoords):
    """The four slackness-forced 3x3 candidates and their dual vertices.

    For x = (1, +-sqrt2, 0) the candidate is written directly; the
    x = (-1, 0, +-sqrt2) pair is the same matrix with rows/columns 1 and 3
    interchanged and (a1, a2) -> (-a1, a3) substituted.
    """
    a1, a2, a3 = alpha.as_tuple()
    for s in (1.0, -1.0):
        z = np.array(
            [
                [-s * a2, SQRT2 * a2, -s * a3],
                [SQRT2 * a2, -2.0 * s * a2, SQRT2 * a3],
                [-s * a3, SQRT2 * a3, -2.0 * SQRT2 * a1 - s * a2],
            ]
        ) / (2.0 * SQRT2)
        yield (1.0, s * SQRT2, 0.0), z
    for s in (1.0, -1.0):
        z = np.array(
            [
                [2.0 * SQRT2 * a1 - s * a3, SQRT2 * a2, -s * a2],
                [SQRT2 * a2, -2.0 * s * a3, SQRT2 * a3],
                [-s * a2, SQRT2 * a3, -s * a3],
            ]
        ) / (2.0 * SQRT2)
        yield (-1.0, 0.0, s * SQRT2), z


def extension_certificate(alpha: AlphaCoords) -> ExtCertificate:
    """Explicit certificate for an extendible state.

    Construction order: the rank-one closed form when defined and of trace
    <= 1; otherwise the four rank-two candidates (smallest-trace PSD one
    wins); otherwise the degenerate a2 = a3 = 0 diagonal forms.  Raises
    ``CertificateError`` if nothing is positive semidefinite although the
    criterion says extendible — that would be a bug, not a state property.
    """
    if not has_symext(alpha):
        raise ValueError("state has no symmetric extension; no certificate exists")
    a1, a2, a3 = alpha.as_tuple()
    d = a2 * a2 - a3 * a3

    if abs(a2) < _DEGENERATE_TOL and abs(a3) < _DEGENERATE_TOL:
        # on the alpha_1 axis every candidate family collapses; use the
        # explicit diagonal forms (these coincide with the surviving
        # rank-two candidate whenever a1 != 0)
        if abs(a1) < _DEGENERATE_TOL:
            return ExtCertificate("boundary_vertex", np.eye(3) / 4.0)
        s = abs(a1)
        z = np.diag([(s + a1) / 2.0, 0.0, (s - a1) / 2.0])
        return ExtCertificate("boundary_vertex", z)

    if abs(a1) >= _DEGENERATE_TOL and abs(d) >= _DEGENERATE_TOL:
        tr = rank1_trace(alpha)
        if tr <= 1.0 + BOUNDARY_TOL:
            z22 = d / (4.0 * a1)
            z33 = a1 * a3 * a3 / d
            z13 = a1 * a2 * a3 / d
            z = np.array(
                [
                    [a1 + z33, a2 / 2.0, z13],
                    [a2 / 2.0, z22, a3 / 2.0],
                    [z13, a3 / 2.0, z33],
                ]
            )
            if float(np.linalg.eigvalsh(z)[0]) >= -1e-10:
                return ExtCertificate("rank_one", z)

    best: tuple[tuple[float, float, float], np.ndarray] | None = None
    for x, z in _rank_two_candidates(alpha):
        if float(np.linalg.eigvalsh(z)[0]) < -1e-10:
            continue
        if float(np.trace(z)) > 1.0 + 1e-9:
            continue
        if best is None or np.trace(z) < np.trace(best[1]):
            best = (x, z)
    if best is not None:
        return ExtCertificate("rank_two", best[1], best[0])

    raise CertificateError(f"no PSD certificate found for extendible alpha {alpha.as_tuple()}")


#: lift postcondition tolerances: (min eigenvalue, trace, swap residual, marginal)
LIFT_TOLS = (1e-9, 1e-12, 1e-12, 1e-9)


def lift_extension(cert: ExtCertificate, p: BellProbs) -> np.ndarray:
    """Explicit 8x8 extension state realizing a certificate.

    Places Z on the GH triplet block and the leftover trace weight on the
    singlet, trivially on F:  rho = (1/2) 1_F (x) (Z (+) (1 - Tr Z) Psi-),
    rotated back into A(x)B(x)B' ordering.  Verifies positivity, unit trace,
    swap invariance and the marginal condition before returning.
    """
    alpha = p_to_alpha(p)
    if _constraint_residual(cert.z, alpha) > 1e-10:
        raise CertificateError("certificate does not match the state's moments")
    w = 1.0 - cert.trace
    rho = reduction.embed_gh_block(cert.z / 2.0, w / 2.0)

    tol_eig, tol_tr, tol_swap, tol_marg = LIFT_TOLS
    lam_min = matrix.min_eig(rho)
    if lam_min < -tol_eig:
        raise CertificateError(f"lifted state not PSD: min eigenvalue {lam_min:.3e}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol_tr:
        raise CertificateError(f"lifted state trace {tr!r} != 1")
    swap_resid = float(np.linalg.norm(rho - reduction.symmetrize_bb(rho)))
    if swap_resid > tol_swap:
        raise CertificateError(f"lifted state not swap-invariant: {swap_resid:.3e}")
    marg = matrix.partial_trace(rho, (2, 2, 2), keep=(0, 1))
    marg_resid = float(np.linalg.norm(marg - to_density_matrix(p)))
    if marg_resid > tol_marg:
        raise CertificateError(f"marginal mismatch: {marg_resid:.3e}")
    return rho


def cross_section_boundary(a1: float, which: str) -> float | None:
    """alpha_2^2 on a cross-section boundary ellipse, or None outside its span.

    "outer": the a3 = 0 section, 4 (a1 - 1/2)^2 + a2^2 = 1 — outside it no
    state on the (a1, a2) fiber is extendible for any a3.
    "inner": the tetrahedron-face section, (9/4)(a1 - 1/3)^2 + (3/2) a2^2 = 1
    — inside it every fiber state is extendible.
    """
    if which == "outer":
        v = 1.0 - 4.0 * (a1 - 0.5) ** 2
    elif which == "inner":
        v = (1.0 - 2.25 * (a1 - 1.0 / 3.0) ** 2) * (2.0 / 3.0)
    else:
        raise ValueError("which must be 'outer' or 'inner'")
    if v < -BOUNDARY_TOL:
        return None
    return max(v, 0.0)
