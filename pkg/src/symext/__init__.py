"""Symmetric extendibility of Bell-diagonal two-qubit states.

Closed-form extendibility criterion with explicit extension certificates,
independent SDP oracles (reduced 3x3 and full 8x8), two-way advantage-
distillation dynamics, and the noise thresholds they imply for the six-state
and BB84 schemes.
"""

from .analytic import (
    ExtCertificate,
    boundary_margin,
    criterion_terms,
    cross_section_boundary,
    extension_certificate,
    has_symext,
    lift_extension,
    rank1_trace,
)
from .bellstate import (
    AlphaCoords,
    BellProbs,
    alpha_to_p,
    is_separable,
    p_to_alpha,
    permute,
    qber,
    to_density_matrix,
    twirl,
)
from .distill import (
    DistillStep,
    DistillTrace,
    bstep,
    cad,
    constant_dc_alpha2,
    d_c,
    d_c_alpha,
    rounds_to_break,
    run_bsteps,
)
from .errors import CertificateError, DegenerateInputError, NotAStateError, SolverFailure
from .qkd import (
    RegionVerdict,
    SchemeState,
    bb84_worst_case,
    classify_region,
    region_scan,
    scheme_state,
    threshold,
)
from .reduction import (
    TripletBlock,
    f_matrices,
    fgh_matrix,
    r_matrix,
    reduce_bell_operator,
    reduction_prefactor,
    symmetrize_bb,
)
from .sdp import (
    SdpProblem,
    SdpVerdict,
    check_extendible_numeric,
    slackness_report,
    solve_simplified_dual,
    solve_simplified_primal,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaCoords",
    "BellProbs",
    "CertificateError",
    "DegenerateInputError",
    "DistillStep",
    "DistillTrace",
    "ExtCertificate",
    "NotAStateError",
    "RegionVerdict",
    "SchemeState",
    "SdpProblem",
    "SdpVerdict",
    "SolverFailure",
    "TripletBlock",
    "alpha_to_p",
    "bb84_worst_case",
    "boundary_margin",
    "bstep",
    "cad",
    "check_extendible_numeric",
    "classify_region",
    "constant_dc_alpha2",
    "criterion_terms",
    "cross_section_boundary",
    "d_c",
    "d_c_alpha",
    "extension_certificate",
    "f_matrices",
    "fgh_matrix",
    "has_symext",
    "is_separable",
    "lift_extension",
    "p_to_alpha",
    "permute",
    "qber",
    "r_matrix",
    "rank1_trace",
    "reduce_bell_operator",
    "reduction_prefactor",
    "region_scan",
    "rounds_to_break",
    "run_bsteps",
    "scheme_state",
    "slackness_report",
    "solve_simplified_dual",
    "solve_simplified_primal",
    "symmetrize_bb",
    "threshold",
    "to_density_matrix",
    "twirl",
]
