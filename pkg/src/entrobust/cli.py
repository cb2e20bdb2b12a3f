"""Command-line front end.

Subcommands::

    entrobust robustness --family bd --params '{"p": [0.7, 0.1, 0.1, 0.1]}'
    entrobust robustness --matrix state.json --method sdp
    entrobust verify --suite bd --samples 1000 --seed 7
    entrobust sdp-solve problem.json

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 non-convergence, 4 infeasible or unbounded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .analytic import RankDeficientError, robustness_analytic, robustness_wootters
from .io import (
    density_from_json,
    descriptor_to_json,
    dumps,
    matrix_to_json,
    problem_from_json,
    result_to_json,
    solution_to_json,
)
from .optim.family import LpError, robustness_family_lp, robustness_tetrahedron_lp
from .optim.ppt import robustness_ppt_sdp
from .optim.sdp import DEFAULT_TOL, Infeasible, NotConverged, Unbounded, solve_sdp
from .states import FAMILIES, descriptor, family_state, wootters_decompose
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_INFEASIBLE = 4


class InputError(ValueError):
    """Malformed command-line input."""


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from None


def _read_file(path: str, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return _load_json(fh.read(), what)
    except OSError as exc:
        raise InputError(f"cannot read {what} {path!r}: {exc.strerror}") from None


def _emit(obj, out: str | None) -> None:
    text = dumps(obj)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _matrix_robustness(rho, method: str | None, tol: float):
    if method is None:
        full = rho.dims == (2, 2) and wootters_decompose(rho).full_rank
        method = "analytic" if full else "sdp"
    if method == "analytic":
        if rho.dims != (2, 2):
            raise InputError("the closed form for an explicit matrix needs dims [2, 2]; use --method sdp")
        return robustness_wootters(rho)
    if method == "lp":
        if rho.dims != (2, 2):
            raise InputError("the LP for an explicit matrix needs dims [2, 2]")
        return robustness_tetrahedron_lp(rho)
    return robustness_ppt_sdp(rho, tol)


def _family_robustness(desc, method: str | None, tol: float):
    method = method or "analytic"
    if method == "analytic":
        return robustness_analytic(desc)
    if method == "lp":
        return robustness_family_lp(desc)
    rho = family_state(desc)
    if not rho.is_bipartite:
        raise InputError(f"the PPT SDP needs a bipartite state, got dims {list(rho.dims)}")
    return robustness_ppt_sdp(rho, tol)


def cmd_robustness(args) -> tuple[dict, int]:
    if (args.family is None) == (args.matrix is None):
        raise InputError("give exactly one of --family or --matrix")
    if args.family is not None:
        params = _load_json(args.params or "{}", "--params")
        desc = descriptor(args.family, params)
        res = _family_robustness(desc, args.method, args.tol)
        source = descriptor_to_json(desc)
    else:
        rho = density_from_json(_read_file(args.matrix, "matrix file"))
        res = _matrix_robustness(rho, args.method, args.tol)
        source = {"matrix": matrix_to_json(rho)}
    report = {
        "version": __version__,
        "input": source,
        "seed": args.seed,
        "tol": args.tol,
        **result_to_json(res),
    }
    return report, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    report = run_suite(args.suite, args.samples, args.seed, args.tol)
    return report, EXIT_OK if report["pass"] else EXIT_VERIFY


def cmd_sdp_solve(args) -> tuple[dict, int]:
    problem = problem_from_json(_read_file(args.input, "SDP file"))
    try:
        sol = solve_sdp(problem, args.tol)
    except (Infeasible, Unbounded) as exc:
        status = "infeasible" if isinstance(exc, Infeasible) else "unbounded"
        out = {"version": __version__, "status": status, "message": str(exc)}
        if exc.certificate is not None:
            cert = exc.certificate
            out["certificate"] = matrix_to_json(cert) if getattr(cert, "ndim", 1) == 2 else list(cert)
        return out, EXIT_INFEASIBLE
    return {"version": __version__, "status": "optimal", "tol": args.tol, **solution_to_json(sol)}, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entrobust", description="Robustness of entanglement.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="solver tolerance (default 1e-8)")
        p.add_argument("--out", default=None, help="write JSON here instead of stdout")

    p = sub.add_parser("robustness", help="robustness of a family member or an explicit matrix")
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--params", help="family parameters as a JSON object")
    p.add_argument("--matrix", help="JSON file with {dims, re, im}")
    p.add_argument("--method", choices=("analytic", "sdp", "lp"), default=None)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(handler=cmd_robustness)

    p = sub.add_parser("verify", help="run a cross-validation suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("sdp-solve", help="solve an SDP given as JSON {c, F0, Fi}")
    p.add_argument("input")
    common(p)
    p.set_defaults(handler=cmd_sdp_solve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, matching the invalid-input code
        return int(exc.code or 0)
    if getattr(args, "tol", 1.0) <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        report, code = args.handler(args)
    except (InputError, RankDeficientError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotConverged, LpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (Infeasible, Unbounded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
