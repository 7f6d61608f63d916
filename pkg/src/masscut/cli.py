"""
Command-line front end.

    masscut SOLVER --input data.json [--fractions a,b,c] [--seed N] [--tol T]
                   [--jitter S] [--svg out.svg] [--report out.json]
    masscut verify --input data.json --report out.json

Exit codes: 0 converged, 2 no convergence, 3 precondition or certificate
failure, 4 input error. Diagnostics go to stderr; the report goes to stdout.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from .errors import InputError, MassCutError, NoConvergence, PreconditionError
from .geometry import HalfSpace, Hyperplane
from .hamsandwich import ham_sandwich_2d, ham_sandwich_3d
from .io import load_measures, region_from_dict, region_to_dict, report_to_dict, write_json
from .lifted import circle_solver, sine_solver, wedge_solver
from .measure import SolveReport, as_fractions, jitter
from .oracle import verify
from .polyhedral import nface_solver, nvertex_solver
from .separated import (bhj_solver, check_concentrated, check_nicely_separated,
                        check_spheres_separated, check_well_separated)
from .slab import annulus_solver, slab_solver
from .svg import emit_svg

log = logging.getLogger("masscut")

SOLVERS = ("hs2", "hs3", "circle", "sine", "wedge", "slab", "annulus", "bhj", "nfaces",
           "nvertices")
EXIT_OK, EXIT_NO_CONVERGENCE, EXIT_PRECONDITION, EXIT_INPUT = 0, 2, 3, 4


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="masscut", description="Mass partition cuts of weighted point clouds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SOLVERS:
        p = sub.add_parser(name)
        p.add_argument("--input", required=True)
        p.add_argument("--fractions", type=_floats)
        p.add_argument("--period", type=float, default=1.0)
        p.add_argument("--direction", type=_floats, default=[0.0, 1.0],
                       help="crease normal for wedge (default 0,1)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-3)
        p.add_argument("--jitter", type=float, default=0.0)
        p.add_argument("--svg")
        p.add_argument("--report")
    p = sub.add_parser("check-separation")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=("well", "nicely", "spheres", "concentrated"), default="well")
    p.add_argument("--report")
    p = sub.add_parser("verify")
    p.add_argument("--input", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--tol", type=float)
    return parser


def _count(measures, n, name):
    if len(measures) != n:
        raise InputError(f"{name} needs {n} measures, got {len(measures)}")


def _plane_report(measures, plane: Hyperplane, solver, seed, tol, converged=True) -> SolveReport:
    region = HalfSpace(plane, 1)
    res = verify(region, measures).residuals
    return SolveReport(res, 0, 0, converged, plane, solver=solver, tol=tol, seed=seed,
                       extra={"fractions": tuple(0.5 for _ in measures)})


def solve(command: str, measures, args) -> SolveReport:
    seed, tol = args.seed, args.tol
    fr = args.fractions
    if command == "hs2":
        _count(measures, 2, command)
        plane = ham_sandwich_2d(*measures, seed=seed)
        return _plane_report(measures, plane, "hs2", seed, tol)
    if command == "hs3":
        _count(measures, 3, command)
        _, report = ham_sandwich_3d(*measures, seed=seed, tol=tol)
        return report
    if command == "circle":
        _count(measures, 3, command)
        return circle_solver(*measures, seed=seed, tol=tol)[1]
    if command == "sine":
        _count(measures, 3, command)
        return sine_solver(*measures, period=args.period, seed=seed, tol=tol)[1]
    if command == "wedge":
        _count(measures, 3, command)
        return wedge_solver(*measures, v=tuple(args.direction), seed=seed, tol=tol)[1]
    if command == "slab":
        return slab_solver(measures, fr, seed=seed, tol=tol)[1]
    if command == "annulus":
        return annulus_solver(measures, fr, seed=seed, tol=tol)[1]
    if command == "bhj":
        return bhj_solver(measures, fr, tol=tol, seed=seed)[1]
    if command == "nfaces":
        return nface_solver(measures, fr)[1]
    if command == "nvertices":
        return nvertex_solver(measures, fr, tol=max(tol, 1e-2), seed=seed)[1]
    raise InputError(f"unknown solver {command}")


def _emit(report: SolveReport, measures, args) -> dict:
    out = report_to_dict(report, report.extra.get("fractions")
                         or (tuple(args.fractions) if args.fractions else None))
    if "fractions" not in out:
        out["fractions"] = [0.5] * len(measures)
    if args.report:
        write_json(out, args.report)
    if args.svg and report.region is not None:
        emit_svg(measures, report.region, args.svg)
    print(json.dumps(out))
    return out


def _run_solver(args) -> int:
    measures = load_measures(args.input)
    if args.fractions is not None:
        as_fractions(args.fractions, len(measures))
    if args.jitter:
        measures = [jitter(m, args.jitter, args.seed + i) for i, m in enumerate(measures)]
    try:
        report = solve(args.command, measures, args)
    except NoConvergence as exc:
        print(f"masscut: {exc}", file=sys.stderr)
        if exc.report is not None and exc.report.region is not None:
            _emit(exc.report, measures, args)
        return EXIT_NO_CONVERGENCE
    _emit(report, measures, args)
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def _run_check(args) -> int:
    measures = load_measures(args.input)
    checks = {"well": check_well_separated, "nicely": check_nicely_separated,
              "spheres": check_spheres_separated}
    out = {"kind": args.kind, "certified": True}
    if args.kind == "concentrated":
        cert = check_concentrated(measures)
        out["planes"] = [region_to_dict(h) for h in cert.planes]
        out["anchors"] = {"p": list(map(float, cert.anchors.p)),
                          "ps": [list(map(float, v)) for v in cert.anchors.ps],
                          "qs": [list(map(float, v)) for v in cert.anchors.qs]}
    else:
        cert = checks[args.kind](measures)
        out["witnesses"] = [{"key": list(key) if isinstance(key, tuple) else key,
                             "witness": region_to_dict(w)}
                            for key, w in cert.witnesses]
    if args.report:
        write_json(out, args.report)
    print(json.dumps(out))
    return EXIT_OK


def _run_verify(args) -> int:
    measures = load_measures(args.input)
    try:
        with open(args.report) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read report {args.report}: {exc}") from exc
    region = region_from_dict(doc.get("region", {}))
    if isinstance(region, Hyperplane):
        region = HalfSpace(region, 1)
    fractions = doc.get("fractions") or [0.5] * len(measures)
    tol = args.tol if args.tol is not None else float(doc.get("tol") or 1e-3)
    result = verify(region, measures, fractions, tol)
    claimed = doc.get("residuals", [])
    reproduced = len(claimed) == len(result.residuals) and all(
        abs(a - b) <= 1e-12 for a, b in zip(claimed, result.residuals))
    out = {"residuals": list(result.residuals), "max_residual": result.max_residual,
           "tol": tol, "passed": result.passed, "reproduced": reproduced}
    print(json.dumps(out))
    if not reproduced:
        print("masscut: residuals in the report do not match a recount", file=sys.stderr)
        return EXIT_PRECONDITION
    if doc.get("converged", True) and not result.passed:
        print("masscut: certificate fails at the stated tolerance", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "check-separation":
            return _run_check(args)
        return _run_solver(args)
    except PreconditionError as exc:
        print(f"masscut: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InputError, ValueError) as exc:
        print(f"masscut: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MassCutError as exc:
        print(f"masscut: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"masscut: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
