"""Two-way advantage-distillation dynamics on Bell-diagonal states.

The bit-error-detection step (B-step) compares the parity of two bit pairs
over the public channel and keeps the first pair only when the parities
agree.  On the eigenvalue vector it acts as an exact quadratic recursion:

    p_I' = (p_I^2 + p_z^2)/N    p_x' = (p_x^2 + p_y^2)/N
    p_z' = 2 p_I p_z / N        p_y' = 2 p_x p_y / N

with N = (p_I + p_z)^2 + (p_x + p_y)^2 the success probability.  The block
generalization (CAD over N bits, announcing each bit's parity against the
first) keeps a block iff zero or all bits flipped, giving binomial closed
forms; a block of 2^n reproduces n successful B-steps.

The quantity that controls whether the procedure can ever break a symmetric
extension is

    d_c = log2( (p_I - p_z)^2 / ((p_I + p_z)(p_x + p_y)) ),

which exactly doubles per B-step (and multiplies by N under CAD).  Reaching
d_c >= 2 forces the state outside every extendible region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .analytic import has_symext
from .bellstate import AlphaCoords, BellProbs, p_to_alpha
from .errors import DegenerateInputError
from .jsonfmt import dumps

#: hard cap on B-step rounds considered (doubling reaches any target long before)
MAX_ROUNDS = 64

# The recursions are exact rational maps, so they are evaluated on exact
# rationals of the (float) input components and rounded only on output.
# d_c reads the exact components back; this keeps its doubling/scaling
# identities to log-evaluation precision, where float-rounded storage alone
# would lose them entirely for strongly cancelling states (p_I ~ p_z).


def bstep(p: BellProbs) -> tuple[BellProbs, float]:
    """One successful B-step: the renormalized output state and the success probability."""
    pi, px, py, pz = (Fraction(v) for v in p.as_tuple())
    n = (pi + pz) ** 2 + (px + py) ** 2
    if n == 0:
        raise DegenerateInputError("B-step undefined: zero success probability")
    out = BellProbs.from_exact(
        (
            (pi * pi + pz * pz) / n,
            (px * px + py * py) / n,
            2 * px * py / n,
            2 * pi * pz / n,
        )
    )
    return out, float(n)


def cad(p: BellProbs, n: int) -> tuple[BellProbs, float]:
    """Advantage distillation on a block of ``n`` bits.

    Returns the renormalized output state and the success probability (the
    sum of the four unnormalized components).  ``n = 2**k`` is equivalent to
    ``k`` successful rounds of B-steps, including the cumulative success
    probability.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("block size must be an integer >= 1")
    if n == 1:  # announces nothing; exact identity
        return p, 1.0
    pi, px, py, pz = (Fraction(v) for v in p.as_tuple())
    sp, sm = (pi + pz) ** n, (pi - pz) ** n
    tp, tm = (px + py) ** n, (px - py) ** n
    raw = ((sp + sm) / 2, (tp + tm) / 2, (tp - tm) / 2, (sp - sm) / 2)
    success = sum(raw)
    if float(success) < 1e-300:
        raise DegenerateInputError(f"CAD success probability underflow at block size {n}")
    out = BellProbs.from_exact(tuple(v / success for v in raw))
    return out, float(success)


def _log2_fraction(value: Fraction) -> float:
    return math.log2(value.numerator) - math.log2(value.denominator)


def d_c(p: BellProbs) -> float:
    """log2 ratio of the squared I/z bias to the parity-agreement cross term.

    Positive exactly on states the B-step procedure improves; doubles per
    successful B-step.  Returns -inf when the numerator vanishes, +inf when
    only the denominator does; undefined (raises) when both vanish.
    """
    pi, px, py, pz = p.exact()
    num = (pi - pz) ** 2
    den = (pi + pz) * (px + py)
    if num == 0 and den == 0:
        raise DegenerateInputError("d_c undefined: numerator and denominator both vanish")
    if num == 0:
        return -math.inf
    if den == 0:
        return math.inf
    return _log2_fraction(num / den)


def d_c_alpha(a1: float, a2: float) -> float:
    """alpha-coordinate form log2(2 a2^2 / (1 - a1^2)); independent of a3."""
    num = 2.0 * a2 * a2
    den = 1.0 - a1 * a1
    if num == 0.0 and den == 0.0:
        raise DegenerateInputError("d_c undefined at this projected point")
    if num == 0.0:
        return -math.inf
    if den == 0.0:
        return math.inf
    return math.log2(num / den)


def constant_dc_alpha2(a1: float, d: float) -> float:
    """alpha_2 >= 0 on the constant-d_c ellipse a1^2 + 2^(1-d) a2^2 = 1."""
    if not abs(a1) < 1.0:
        raise ValueError("requires |alpha_1| < 1")
    return math.sqrt((1.0 - a1 * a1) * 2.0 ** (d - 1.0))


def rounds_to_break(p: BellProbs) -> int | None:
    """Number of successful B-steps guaranteed to break the extension.

    None when d_c <= 0 (the sign is invariant under the recursion, so the
    extension can never be broken).  Otherwise the smallest r >= 0 with
    2^r * d_c >= 2, additionally verified by running the recursion and
    checking the resulting state against the closed-form criterion.
    """
    value = d_c(p)
    if value <= 0.0:
        return None
    r = 0
    while value < 2.0:
        value *= 2.0
        r += 1
        if r > MAX_ROUNDS:
            raise DegenerateInputError("round count exceeded the doubling cap")
    state = p
    for _ in range(r):
        state, _ = bstep(state)
    if has_symext(p_to_alpha(state)):
        raise AssertionError(
            f"state after {r} B-steps still extendible; doubling guarantee violated"
        )
    return r


@dataclass(frozen=True)
class DistillStep:
    """One record along a distillation run."""

    round: int
    p: BellProbs
    alpha: AlphaCoords
    d_c: float | None
    success_prob: float
    extendible: bool

    def to_json(self) -> str:
        return dumps(
            {
                "round": self.round,
                "p": list(self.p.as_tuple()),
                "alpha": list(self.alpha.as_tuple4()),
                "d_c": self.d_c,
                "success_prob": self.success_prob,
                "extendible": self.extendible,
            }
        )


@dataclass(frozen=True)
class DistillTrace:
    steps: tuple[DistillStep, ...]
    terminated: str  # broke_extension | max_rounds | not_distillable

    def to_jsonl(self) -> str:
        lines = [s.to_json() for s in self.steps]
        lines.append(dumps({"terminated": self.terminated}))
        return "\n".join(lines) + "\n"


def run_bsteps(p: BellProbs, max_rounds: int = 20) -> DistillTrace:
    """Iterate B-steps until the extension breaks, recording each state.

    P-steps and the final one-way code are not simulated: they require no
    back-communication and cannot break an extension, so the B-step sequence
    carries the whole question.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    steps = []
    state = p
    succ = 1.0
    for rnd in range(max_rounds + 1):
        alpha = p_to_alpha(state)
        try:
            dc_val = d_c(state)
        except DegenerateInputError:
            dc_val = None
        ext = has_symext(alpha)
        steps.append(DistillStep(rnd, state, alpha, dc_val, succ, ext))
        if not ext:
            return DistillTrace(tuple(steps), "broke_extension")
        if dc_val is None or dc_val <= 0.0:
            return DistillTrace(tuple(steps), "not_distillable")
        if rnd == max_rounds:
            break
        state, succ = bstep(state)
    return DistillTrace(tuple(steps), "max_rounds")
