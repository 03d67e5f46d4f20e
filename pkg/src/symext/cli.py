"""Command-line interface.

Subcommands: analyze, distill, threshold, region-scan, verify-sdp,
certificate.  Data goes to stdout, diagnostics to stderr.  Exit codes:
0 success, 2 argument/parse error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import analytic, bellstate, distill, qkd, sdp
from .errors import DegenerateInputError, NotAStateError, SolverFailure
from .jsonfmt import dumps, fmt_float

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _parse_floats(text: str, n: int, flag: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != n:
        raise ValueError(f"{flag} expects {n} comma-separated numbers, got {len(parts)}")
    out = []
    for pos, item in enumerate(parts):
        try:
            out.append(float(item))
        except ValueError:
            raise ValueError(f"{flag}: cannot parse {item!r} at position {pos}") from None
    return out


def _add_state_args(sub: argparse.ArgumentParser):
    sub.add_argument("--p", help="state as p_I,p_x,p_y,p_z")
    sub.add_argument("--alpha", help="state as alpha_1,alpha_2,alpha_3")
    sub.add_argument("--scheme", choices=["six-state", "bb84"], help="scheme state")
    sub.add_argument("--q", type=float, help="observed error rate (with --scheme)")
    sub.add_argument("--t", type=float, default=0.0, help="BB84 free parameter (default 0)")


def _state_from_args(args, parser: argparse.ArgumentParser) -> bellstate.BellProbs:
    given = [name for name in ("p", "alpha", "scheme") if getattr(args, name) is not None]
    if len(given) != 1:
        parser.error("exactly one of --p, --alpha, --scheme must be supplied")
    if args.p is not None:
        return bellstate.BellProbs.from_values(_parse_floats(args.p, 4, "--p"))
    if args.alpha is not None:
        vals = _parse_floats(args.alpha, 3, "--alpha")
        return bellstate.alpha_to_p(bellstate.AlphaCoords.from_values(vals))
    if args.q is None:
        parser.error("--scheme requires --q")
    return qkd.scheme_state(args.scheme, args.q, args.t)


def _analyze_payload(p: bellstate.BellProbs) -> dict:
    alpha = bellstate.p_to_alpha(p)
    try:
        dc_val = distill.d_c(p)
    except DegenerateInputError:
        dc_val = math.nan
    extendible = analytic.has_symext(alpha)
    cert_summary = None
    if extendible:
        cert = analytic.extension_certificate(alpha)
        cert_summary = {"kind": cert.kind, "trace": cert.trace}
    qx, qy, qz = bellstate.qber(p)
    rounds = None
    if not math.isnan(dc_val):
        try:
            rounds = distill.rounds_to_break(p)
        except DegenerateInputError:
            rounds = None
    return {
        "p": list(p.as_tuple()),
        "alpha": list(alpha.as_tuple4()),
        "qber": {"x": qx, "y": qy, "z": qz},
        "d_c": dc_val,
        "separable": bellstate.is_separable(p),
        "extendible": extendible,
        "rounds_to_break": rounds,
        "certificate": cert_summary,
    }


def _flat_csv(payload: dict) -> str:
    """Single-row CSV of the scalar fields of a payload."""
    flat: dict[str, str] = {}

    def put(key, value):
        if isinstance(value, bool):
            flat[key] = "true" if value else "false"
        elif value is None:
            flat[key] = ""
        elif isinstance(value, (int, np.integer)):
            flat[key] = str(int(value))
        elif isinstance(value, float):
            flat[key] = fmt_float(value)
        else:
            flat[key] = str(value)

    for key, value in payload.items():
        if isinstance(value, dict):
            for k2, v2 in value.items():
                if not isinstance(v2, (list, dict)):
                    put(f"{key}.{k2}", v2)
        elif isinstance(value, list):
            for i, v2 in enumerate(value):
                if not isinstance(v2, (list, dict)):
                    put(f"{key}.{i}", v2)
        else:
            put(key, value)
    return ",".join(flat.keys()) + "\n" + ",".join(flat.values()) + "\n"


def _emit(payload: dict, output: str, stream) -> None:
    if output == "json":
        stream.write(dumps(payload) + "\n")
    else:
        stream.write(_flat_csv(payload))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symext",
        description="Symmetric extendibility of Bell-diagonal states: "
        "analysis, certificates, SDP cross-checks, distillation dynamics.",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized self-checks")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("analyze", help="state summary: coordinates, QBER, d_c, verdicts")
    _add_state_args(s)
    s.add_argument("--output", choices=["json", "csv"], default="json")

    s = subs.add_parser("distill", help="B-step trace as JSON lines")
    _add_state_args(s)
    s.add_argument("--max-rounds", type=int, default=20)
    s.add_argument("--output", choices=["json", "csv"], default="json")

    s = subs.add_parser("threshold", help="noise threshold of a scheme")
    s.add_argument("--scheme", choices=["six-state", "bb84"], required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--output", choices=["json", "csv", "plain"], default="plain")

    s = subs.add_parser("region-scan", help="grid classification of the projected state space")
    s.add_argument("--resolution", default="65", help="N or N1,N2 grid points per axis")
    s.add_argument("--both-signs", action="store_true", help="scan negative alpha_2 too")
    s.add_argument("--output", choices=["json", "csv"], default="csv")

    s = subs.add_parser("verify-sdp", help="closed form vs reduced SDPs vs full 8x8 SDP")
    _add_state_args(s)
    s.add_argument("--tol", type=float, default=sdp.DEFAULT_TOL)
    s.add_argument("--output", choices=["json", "csv"], default="json")

    s = subs.add_parser("certificate", help="extension certificate and lift verification")
    _add_state_args(s)
    s.add_argument("--output", choices=["json", "csv"], default="json")
    return parser


def _cmd_analyze(args, parser) -> int:
    p = _state_from_args(args, parser)
    _emit(_analyze_payload(p), args.output, sys.stdout)
    return EXIT_OK


def _cmd_distill(args, parser) -> int:
    p = _state_from_args(args, parser)
    if args.max_rounds < 0:
        parser.error("--max-rounds must be >= 0")
    trace = distill.run_bsteps(p, args.max_rounds)
    if args.output == "json":
        sys.stdout.write(trace.to_jsonl())
    else:
        sys.stdout.write("round,p_i,p_x,p_y,p_z,d_c,success_prob,extendible\n")
        for step in trace.steps:
            dc_txt = fmt_float(step.d_c) if step.d_c is not None else "nan"
            sys.stdout.write(
                ",".join(
                    [str(step.round)]
                    + [fmt_float(v) for v in step.p.as_tuple()]
                    + [dc_txt, fmt_float(step.success_prob)]
                    + ["true" if step.extendible else "false"]
                )
                + "\n"
            )
        sys.stdout.write(f"terminated,{trace.terminated}\n")
    return EXIT_OK


def _cmd_threshold(args, parser) -> int:
    value = qkd.threshold(args.scheme, args.tol, seed=args.seed)
    if args.output == "plain":
        sys.stdout.write(fmt_float(value) + "\n")
    else:
        _emit({"scheme": args.scheme, "tol": args.tol, "q_max": value}, args.output, sys.stdout)
    return EXIT_OK


def _cmd_region_scan(args, parser) -> int:
    text = args.resolution
    try:
        res = tuple(int(v) for v in text.split(",")) if "," in text else int(text)
    except ValueError:
        parser.error(f"--resolution: cannot parse {text!r}")
    threads = max(1, int(os.environ.get("SYMEXT_THREADS", "1")))
    records = qkd.region_scan(res, both_signs=args.both_signs, threads=threads)
    if args.output == "csv":
        sys.stdout.write(qkd.scan_to_csv(records))
    else:
        sys.stdout.write(qkd.scan_to_jsonl(records))
    return EXIT_OK


def _cmd_verify_sdp(args, parser) -> int:
    p = _state_from_args(args, parser)
    alpha = bellstate.p_to_alpha(p)
    analytic_verdict = analytic.has_symext(alpha)
    primal = sdp.solve_simplified_primal(alpha, tol=args.tol)
    dual = sdp.solve_simplified_dual(alpha, tol=args.tol)
    full = sdp.check_extendible_numeric(bellstate.to_density_matrix(p), tol=args.tol)
    payload = {
        "p": list(p.as_tuple()),
        "alpha": list(alpha.as_tuple4()),
        "analytic": {
            "extendible": analytic_verdict,
            "margin": analytic.boundary_margin(alpha),
        },
        "simplified_primal": {
            "extendible": primal.extendible,
            "margin": primal.margin,
            "gap": primal.gap,
            "iterations": primal.iterations,
        },
        "simplified_dual": {
            "extendible": dual.extendible,
            "margin": dual.margin,
            "gap": dual.gap,
            "iterations": dual.iterations,
            "witness_x": np.asarray(dual.dual_solution).tolist(),
        },
        "full_sdp": {
            "extendible": full.extendible,
            "margin": full.margin,
            "status": full.status,
            "method": full.method,
            "iterations": full.iterations,
        },
        "slackness_residual": sdp.slackness_report(primal, dual),
        "agree": (analytic_verdict == primal.extendible == dual.extendible)
        and (full.extendible is None or full.extendible == analytic_verdict),
    }
    _emit(payload, args.output, sys.stdout)
    return EXIT_OK


def _cmd_certificate(args, parser) -> int:
    p = _state_from_args(args, parser)
    alpha = bellstate.p_to_alpha(p)
    if not analytic.has_symext(alpha):
        dual = sdp.solve_simplified_dual(alpha)
        payload = {
            "extendible": False,
            "certificate": None,
            "dual_witness_x": np.asarray(dual.dual_solution).tolist(),
            "dual_value": dual.margin,
        }
        _emit(payload, args.output, sys.stdout)
        return EXIT_OK
    cert = analytic.extension_certificate(alpha)
    rho = analytic.lift_extension(cert, p)
    from .reduction import SWAP_PERM

    marg = np.einsum("ikjk->ij", rho.reshape(4, 2, 4, 2))
    swapped = rho[np.ix_(SWAP_PERM, SWAP_PERM)]
    payload = {
        "extendible": True,
        "certificate": {
            "kind": cert.kind,
            "Z": cert.z.tolist(),
            "trace": cert.trace,
            "witness_x": list(cert.witness_x) if cert.witness_x else None,
        },
        "lift": {
            "min_eigenvalue": float(np.linalg.eigvalsh(rho)[0].real),
            "trace": float(np.trace(rho).real),
            "swap_residual": float(np.linalg.norm(rho - swapped)),
            "marginal_error": float(np.linalg.norm(marg - bellstate.to_density_matrix(p))),
        },
    }
    _emit(payload, args.output, sys.stdout)
    return EXIT_OK


COMMANDS = {
    "analyze": _cmd_analyze,
    "distill": _cmd_distill,
    "threshold": _cmd_threshold,
    "region-scan": _cmd_region_scan,
    "verify-sdp": _cmd_verify_sdp,
    "certificate": _cmd_certificate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, parser)
    except SystemExit as exc:  # parser.error inside a command
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    except (NotAStateError, DegenerateInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
