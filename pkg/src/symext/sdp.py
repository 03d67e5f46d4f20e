"""Numerical semidefinite-programming oracle for symmetric extendibility.

Two independent routes, kept deliberately decoupled from the closed-form
criterion so they can cross-check it:

* the reduced 3x3 programs — minimize sum x_j alpha_j over F(x) >= 0 (dual
  form; extendible iff the optimum is >= -1) and minimize Tr Z over
  Tr[F_i Z] = alpha_i, Z >= 0 (primal form; extendible iff the optimum is
  <= 1) — solved with a log-det barrier method and damped Newton steps;

* the full 8x8 feasibility problem on A(x)B(x)B' — existence of a PSD,
  unit-trace, swap-invariant operator with the prescribed AB marginal —
  decided by Dykstra-corrected alternating projections between the PSD cone
  and the affine constraint set, with a barrier solve of the trace-
  minimization form as fallback when the projections stall.

Verdicts are never coerced: a solve that cannot decide reports undecided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import matrix, reduction
from .bellstate import AlphaCoords
from .errors import NotAStateError, SolverFailure
from .jsonfmt import dumps

#: default margin tolerance; callers may widen for speed
DEFAULT_TOL = 1e-7

#: barrier schedule: mu -> mu/10 from 1 down to (and including) 1e-9
MU_START, MU_STOP, MU_SHRINK = 1.0, 1e-9, 0.1

#: alternating-projection iteration cap
PROJECTION_CAP = 50000


@dataclass(frozen=True)
class SdpProblem:
    """Structured description of the full extendibility SDP for one state."""

    dimension: int
    constraint_ops: tuple[np.ndarray, ...]
    constraint_vals: np.ndarray
    objective: str

    def gram_condition(self) -> float:
        """Condition number of the constraint-operator Gram matrix."""
        ops = self.constraint_ops
        g = np.array([[np.vdot(a, b).real for b in ops] for a in ops])
        return float(np.linalg.cond(g))


@dataclass
class SdpVerdict:
    """Outcome of one extendibility solve.

    ``extendible`` is None when the solver could not decide.  ``margin`` is a
    signed distance proxy: the optimal objective value for the reduced
    programs, minus the residual gap for the projection method.
    """

    extendible: bool | None
    margin: float
    primal_solution: np.ndarray | None
    dual_solution: np.ndarray | None
    gap: float
    slackness_residual: float
    iterations: int
    status: str
    method: str

    def to_json(self) -> str:
        return dumps(
            {
                "extendible": self.extendible,
                "margin": self.margin,
                "gap": self.gap,
                "slackness_residual": self.slackness_residual,
                "iterations": self.iterations,
                "status": self.status,
                "method": self.method,
                "primal_solution": None
                if self.primal_solution is None
                else np.real_if_close(self.primal_solution, tol=1).tolist(),
                "dual_solution": None
                if self.dual_solution is None
                else np.asarray(self.dual_solution).tolist(),
            }
        )


def _is_pd(m) -> bool:
    try:
        np.linalg.cholesky(m)
        return True
    except np.linalg.LinAlgError:
        return False


def _barrier_minimize(c, m0, mats, y0):
    """Minimize c.y subject to m0 + sum_k y_k mats[k] >= 0.

    ``y0`` must be strictly feasible.  Follows the central path with the
    standard log-det barrier, damped Newton steps and backtracking line
    search.  Returns (y, M(y), newton_iterations, converged).
    """
    c = np.asarray(c, dtype=float)
    mats = np.asarray(mats)
    y = np.array(y0, dtype=float)

    def m_of(yv):
        return m0 + np.tensordot(yv, mats, axes=1)

    def phi(yv, mu):
        m = m_of(yv)
        try:
            chol = np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            return np.inf
        return c @ yv - mu * 2.0 * float(np.sum(np.log(np.diag(chol).real)))

    if not _is_pd(m_of(y)):
        raise SolverFailure("barrier start point is not strictly feasible")

    iters = 0
    converged = True
    mu = MU_START
    while mu >= MU_STOP * (1.0 - 1e-12):
        for _ in range(100):
            iters += 1
            m = m_of(y)
            minv = np.linalg.inv(m)
            w = np.einsum("ij,mjk->mik", minv, mats)
            g = c - mu * np.einsum("mii->m", w).real
            h = mu * np.einsum("aij,bji->ab", w, w).real
            try:
                step = -np.linalg.solve(h, g)
            except np.linalg.LinAlgError:
                step = -np.linalg.lstsq(h, g, rcond=None)[0]
            decrement = -(g @ step)
            if decrement / 2.0 < 1e-13:
                break
            f0 = phi(y, mu)
            t = 1.0
            while t > 1e-14:
                yn = y + t * step
                if phi(yn, mu) <= f0 + 0.25 * t * (g @ step):
                    break
                t *= 0.5
            if t <= 1e-14:
                break
            y = y + t * step
        else:
            converged = False
        mu *= MU_SHRINK
    return y, m_of(y), iters, converged


def _f_stack():
    f0, f1, f2, f3 = reduction.f_matrices()
    return f0, np.stack([f1, f2, f3])


def _dual_point_from_slackness(z: np.ndarray) -> np.ndarray:
    """Multipliers x minimizing ||F(x) Z||_F; exact at a primal optimum.

    More robust than reading mu * Z^-1 off the central path, which degrades
    when the optimal Z is rank deficient.
    """
    f0, fs = _f_stack()
    cols = np.stack([(f @ z).ravel() for f in fs], axis=1)
    rhs = -(f0 @ z).ravel()
    x, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
    return x


def _primal_point_from_slackness(fx: np.ndarray, alpha: AlphaCoords) -> np.ndarray:
    """Moment-feasible Z minimizing ||F(x) Z||_F; exact at a dual optimum."""
    a1, a2, a3 = alpha.as_tuple()
    z0 = np.array([[a1, a2 / 2, 0.0], [a2 / 2, 0.0, a3 / 2], [0.0, a3 / 2, 0.0]])
    g1 = np.zeros((3, 3))
    g1[0, 2] = g1[2, 0] = 1.0
    g2 = np.zeros((3, 3))
    g2[1, 1] = 1.0
    g3 = np.zeros((3, 3))
    g3[0, 0] = g3[2, 2] = 1.0
    cols = np.stack([(fx @ g).ravel() for g in (g1, g2, g3)], axis=1)
    rhs = -(fx @ z0).ravel()
    y, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
    return z0 + y[0] * g1 + y[1] * g2 + y[2] * g3


def solve_simplified_dual(alpha: AlphaCoords, tol: float = DEFAULT_TOL) -> SdpVerdict:
    """Reduced dual program: minimize sum x_j alpha_j with F(x) >= 0.

    Extendible iff the optimum is >= -1 (within ``tol``).  The central-path
    byproduct mu * F(x)^-1 is returned as a primal estimate; its moment
    residuals vanish at the exact central point.
    """
    f0, fs = _f_stack()
    c = np.array(alpha.as_tuple())
    y, m, iters, converged = _barrier_minimize(c, f0, fs, np.zeros(3))
    if not converged:
        raise SolverFailure(f"dual barrier did not converge in {iters} Newton steps")
    value = float(c @ y)
    z_rec = _primal_point_from_slackness(m, alpha)
    gap = float(np.einsum("ij,ji->", m, z_rec).real)
    slack = float(np.linalg.norm(m @ z_rec))
    return SdpVerdict(
        extendible=bool(value >= -1.0 - tol),
        margin=value,
        primal_solution=z_rec,
        dual_solution=y,
        gap=gap,
        slackness_residual=slack,
        iterations=iters,
        status="converged",
        method="barrier_dual_3x3",
    )


def solve_simplified_primal(alpha: AlphaCoords, tol: float = DEFAULT_TOL) -> SdpVerdict:
    """Reduced primal program: minimize Tr Z over Tr[F_i Z] = alpha_i, Z >= 0.

    Extendible iff the optimum is <= 1 (within ``tol``).  The constraint
    system is always feasible for valid coordinates; a diagonal shift gives
    the strictly feasible start.
    """
    a1, a2, a3 = alpha.as_tuple()
    m0 = np.array([[a1, a2 / 2, 0.0], [a2 / 2, 0.0, a3 / 2], [0.0, a3 / 2, 0.0]])
    g1 = np.zeros((3, 3))
    g1[0, 2] = g1[2, 0] = 1.0
    g2 = np.zeros((3, 3))
    g2[1, 1] = 1.0
    g3 = np.zeros((3, 3))
    g3[0, 0] = g3[2, 2] = 1.0
    shift = 2.0 + abs(a1) + abs(a2) + abs(a3)
    y0 = np.array([0.0, shift, shift])
    if not _is_pd(m0 + shift * (g2 + g3)):  # cannot happen for valid alpha
        raise SolverFailure("primal constraint system infeasible")
    y, z, iters, converged = _barrier_minimize(np.array([0.0, 1.0, 2.0]), m0, [g1, g2, g3], y0)
    if not converged:
        raise SolverFailure(f"primal barrier did not converge in {iters} Newton steps")
    value = float(np.trace(z))
    _, fs = _f_stack()
    x_rec = _dual_point_from_slackness(z)
    f_of_x = np.eye(3) + np.tensordot(x_rec, fs, axes=1)
    gap = float(np.einsum("ij,ji->", f_of_x, z).real)
    slack = float(np.linalg.norm(f_of_x @ z))
    return SdpVerdict(
        extendible=bool(value <= 1.0 + tol),
        margin=value,
        primal_solution=z,
        dual_solution=x_rec,
        gap=gap,
        slackness_residual=slack,
        iterations=iters,
        status="converged",
        method="barrier_primal_3x3",
    )


def slackness_report(primal: SdpVerdict, dual: SdpVerdict) -> float:
    """Complementary-slackness residual ||F(x*) Z*||_F across a solved pair."""
    if primal.primal_solution is None or dual.dual_solution is None:
        raise ValueError("both verdicts must carry solutions")
    _, fs = _f_stack()
    f_of_x = np.eye(3) + np.tensordot(np.asarray(dual.dual_solution), fs, axes=1)
    return float(np.linalg.norm(f_of_x @ primal.primal_solution))


# ---------------------------------------------------------------------------
# full 8x8 problem


@lru_cache(maxsize=1)
def _pauli_basis():
    """The 15 normalized traceless two-qubit Pauli products and their lifts."""
    ls = []
    for i in range(4):
        for j in range(4):
            if i == j == 0:
                continue
            ls.append(matrix.kron(matrix.PAULI[i], matrix.PAULI[j]) / 2.0)
    lt = [reduction.symmetrize_bb(matrix.kron(l, np.eye(2))) for l in ls]
    return tuple(ls), tuple(lt)


def full_problem(rho) -> SdpProblem:
    """Constraint data of the full extendibility SDP for a two-qubit state."""
    rho = matrix.hermitian(rho)
    ls, lt = _pauli_basis()
    vals = np.array([np.einsum("ij,ji->", l, rho).real for l in ls])
    return SdpProblem(
        dimension=8,
        constraint_ops=lt,
        constraint_vals=vals,
        objective="minimize Tr[X]",
    )


@lru_cache(maxsize=1)
def _herm_basis_8():
    """Orthonormal real basis of Hermitian 8x8 matrices (64 elements)."""
    out = []
    for i in range(8):
        e = np.zeros((8, 8), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for i in range(8):
        for j in range(i + 1, 8):
            e = np.zeros((8, 8), dtype=complex)
            e[i, j] = e[j, i] = inv_sqrt2
            out.append(e)
            e = np.zeros((8, 8), dtype=complex)
            e[i, j] = 1j * inv_sqrt2
            e[j, i] = -1j * inv_sqrt2
            out.append(e)
    return np.array(out)


@lru_cache(maxsize=1)
def _full_sdp_data():
    """Constraint matrix, its pseudo-inverse and a null-space matrix basis."""
    _, lt = _pauli_basis()
    hb = _herm_basis_8()
    cmat = np.einsum("cij,aji->ca", np.array(lt), hb).real
    null = np.linalg.svd(cmat)[2][15:]
    nmats = np.tensordot(null, hb, axes=1)
    return cmat, np.linalg.pinv(cmat), nmats


def _min_trace_full(rho):
    """Barrier solve of: minimize Tr X s.t. the 15 lifted moments match rho, X >= 0.

    The state is extendible iff the optimum is <= 1.
    """
    cmat, cpinv, nmats = _full_sdp_data()
    hb = _herm_basis_8()
    ls, _ = _pauli_basis()
    tvals = np.array([np.einsum("ij,ji->", l, rho).real for l in ls])
    x_part = np.tensordot(cpinv @ tvals, hb, axes=1)
    lam = float(np.linalg.eigvalsh(x_part)[0].real)
    x0 = x_part + (max(0.0, -lam) + 0.5) * np.eye(8)
    cvec = np.einsum("mii->m", nmats).real
    y, xm, iters, converged = _barrier_minimize(cvec, x0, nmats, np.zeros(nmats.shape[0]))
    return float(np.trace(xm).real), xm, iters, converged


@lru_cache(maxsize=1)
def _affine_operator():
    """Matrix form (real fast path) of the orthogonal projection onto the affine set.

    The affine set is {X Hermitian : V X V† = X, Tr_B' X = rho}; the
    projection is affine in (X, rho), so it is cached as a pair of real
    matrices acting on flattened inputs.
    """
    a_op = np.zeros((64, 64))
    b_op = np.zeros((64, 16))
    for k in range(64):
        e = np.zeros(64)
        e[k] = 1.0
        a_op[:, k] = _project_affine_functional(e.reshape(8, 8), np.zeros((4, 4))).real.ravel()
    for k in range(16):
        e = np.zeros(16)
        e[k] = 1.0
        b_op[:, k] = _project_affine_functional(np.zeros((8, 8)), e.reshape(4, 4)).real.ravel()
    return a_op, b_op


def _project_affine_functional(x, rho):
    """Orthogonal projection onto the swap-invariant, fixed-marginal affine set."""
    s = reduction.symmetrize_bb(x)
    r = rho - np.einsum("ikjk->ij", s.reshape(4, 2, 4, 2))
    t = np.einsum("ikjk->ij", r.reshape(2, 2, 2, 2)) / 2.0
    delta = r - np.kron(t, np.eye(2)) / 2.0
    return s + reduction.symmetrize_bb(np.kron(delta, np.eye(2)))


def _project_psd(x):
    w, v = np.linalg.eigh(x)
    np.clip(w, 0.0, None, out=w)
    return (v * w) @ (v.conj().T if np.iscomplexobj(v) else v.T)


def check_extendible_numeric(
    rho,
    tol: float = DEFAULT_TOL,
    max_iter: int = PROJECTION_CAP,
    fallback: bool = True,
) -> SdpVerdict:
    """Decide symmetric extendibility of an arbitrary two-qubit density matrix.

    Runs Dykstra-corrected alternating projections between the PSD cone and
    the affine set {swap-invariant, marginal = rho}.  Declares extendible when
    the projection gap drops below ``tol`` or an affine point is PSD within
    1e-9; declares non-extendible when the gap stabilizes at a clearly
    positive value.  If the projections stall, a barrier solve of the
    trace-minimization form decides (unless ``fallback`` is off, in which
    case the verdict is undecided — never a guess).
    """
    rho = matrix.hermitian(rho)
    if rho.shape != (4, 4):
        raise ValueError("expected a two-qubit (4x4) density matrix")
    if abs(float(np.trace(rho).real) - 1.0) > 1e-10:
        raise NotAStateError("density matrix is not normalized")
    if matrix.min_eig(rho) < -1e-10:
        raise NotAStateError("density matrix is not positive semidefinite")

    real_input = float(np.max(np.abs(rho.imag))) < 1e-14

    if real_input:
        a_op, b_op = _affine_operator()
        rho_r = rho.real
        b = b_op @ rho_r.ravel()

        def proj_aff(v):
            return a_op @ v + b

        x = proj_aff((np.kron(rho_r, np.eye(2)) / 2.0).ravel())
        shape = (8, 8)

        def to_mat(v):
            return v.reshape(shape)

        def to_vec(m):
            return m.real.ravel()
    else:

        def proj_aff(v):
            return _project_affine_functional(v, rho)

        x = proj_aff(matrix.kron(rho, np.eye(2)) / 2.0)

        def to_mat(v):
            return v

        def to_vec(m):
            return m

    p = x * 0.0
    q = x * 0.0
    gap = math.inf
    gap_prev = math.inf
    stable = 0
    psd_slack = 1e-9
    for it in range(1, max_iter + 1):
        y = to_vec(_project_psd(to_mat(x + p)))
        p = x + p - y
        x2 = proj_aff(y + q)
        q = y + q - x2
        gap = float(np.linalg.norm(y - x2))
        x = x2
        if gap < tol:
            return SdpVerdict(
                extendible=True,
                margin=-gap,
                primal_solution=to_mat(x).copy(),
                dual_solution=None,
                gap=gap,
                slackness_residual=0.0,
                iterations=it,
                status="converged",
                method="projection",
            )
        if it % 25 == 0:
            z_aff = to_mat(proj_aff(y))
            lam = float(np.linalg.eigvalsh(z_aff)[0].real)
            if lam >= -psd_slack:
                return SdpVerdict(
                    extendible=True,
                    margin=-max(0.0, -lam),
                    primal_solution=z_aff,
                    dual_solution=None,
                    gap=gap,
                    slackness_residual=0.0,
                    iterations=it,
                    status="converged",
                    method="projection",
                )
        if abs(gap - gap_prev) < 1e-12 * (1.0 + gap):
            stable += 1
            if stable > 60 and gap > 10.0 * tol:
                return SdpVerdict(
                    extendible=False,
                    margin=-gap,
                    primal_solution=to_mat(x).copy(),
                    dual_solution=None,
                    gap=gap,
                    slackness_residual=0.0,
                    iterations=it,
                    status="converged",
                    method="projection",
                )
        else:
            stable = 0
        gap_prev = gap

    if fallback:
        value, xm, extra, converged = _min_trace_full(rho)
        if converged:
            return SdpVerdict(
                extendible=bool(value <= 1.0 + tol),
                margin=1.0 - value,
                primal_solution=xm,
                dual_solution=None,
                gap=gap,
                slackness_residual=0.0,
                iterations=max_iter + extra,
                status="converged",
                method="projection+barrier",
            )

    return SdpVerdict(
        extendible=None,
        margin=-gap,
        primal_solution=to_mat(x).copy(),
        dual_solution=None,
        gap=gap,
        slackness_residual=0.0,
        iterations=max_iter,
        status="undecided",
        method="projection",
    )
