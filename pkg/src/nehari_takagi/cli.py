"""Command-line interface.

Exit codes: 0 success (solvable / verified), 2 negative answer (not solvable,
verification failed), 1 any error. Reports go to standard output as JSON,
diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import sys
from dataclasses import asdict

import numpy as np

from . import io
from .errors import NehariError, NotSolvable
from .nehari import (
    HANKEL_REL_TOL,
    VERIFY_COEFFS,
    VERIFY_FFT_POINTS,
    VERIFY_SUP_POINTS,
    SchurParameter,
    check,
    sample_solution,
    solve,
    verify_solution,
)
from .realization import RANK_TOL
from .resolvent import GammaGeneratingMatrix, assemble
from .selftest import scalar_suite
from .stein import gramians, hankel_spectrum

EXIT_OK, EXIT_ERROR, EXIT_NO = 0, 1, 2


def _tolerances(args, problem) -> dict:
    tol = {"tol_rank": RANK_TOL, "tol_inertia": None}
    tol.update(problem.tolerances)
    if args.tol_rank is not None:
        tol["tol_rank"] = args.tol_rank
    if args.tol_inertia is not None:
        tol["tol_inertia"] = args.tol_inertia
    return tol


def _emit(text: str, out: str | None) -> None:
    if out:
        io.atomic_write(out, text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _epsilon(spec: str | None, p: int, q: int, seed: int | None) -> SchurParameter:
    if spec is None or spec == "zero":
        return SchurParameter.zero(p, q)
    if spec == "random":
        rng = np.random.default_rng(seed)
        c = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
        return SchurParameter(0.5 * c / np.linalg.norm(c, 2))
    return io.load_epsilon(spec)


def _resolvent(args, problem, kappa, tol):
    if getattr(args, "resolvent", None):
        G = io.load_resolvent(args.resolvent)
        if (G.p, G.q) != (problem.realization.p, problem.realization.q):
            raise NehariError("resolvent and problem have different dimensions")
        return G
    return solve(problem.realization, kappa, tol["tol_inertia"])


def cmd_check(args) -> int:
    problem = io.load_problem(args.problem)
    tol = _tolerances(args, problem)
    report = check(problem.realization, problem.kappa, tol["tol_inertia"], tol["tol_rank"])
    _emit(io.dumps(asdict(report)), args.out)
    return EXIT_OK if report.solvable else EXIT_NO


def cmd_solve(args) -> int:
    problem = io.load_problem(args.problem)
    tol = _tolerances(args, problem)
    try:
        G = solve(problem.realization, problem.kappa, tol["tol_inertia"])
    except NotSolvable as exc:
        print(f"not solvable: {exc}", file=sys.stderr)
        return EXIT_NO
    payload = io.resolvent_to_dict(G)
    payload["diagnostics"]["tolerances"] = {"tol_rank": tol["tol_rank"],
                                            "tol_inertia": tol["tol_inertia"]}
    _emit(io.dumps(payload), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    problem = io.load_problem(args.problem)
    tol = _tolerances(args, problem)
    r = problem.realization
    seed = args.seed if args.seed is not None else problem.seed
    eps = _epsilon(args.epsilon, r.p, r.q, seed)
    G = _resolvent(args, problem, problem.kappa, tol)
    handle = sample_solution(G, eps, problem.kappa)
    n = args.grid
    if n < 1:
        raise ValueError("--grid must be positive")
    vals, moved = handle.circle_values(n)
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["theta", "sigma_max"]
    for i in range(r.p):
        for j in range(r.q):
            header += [f"re_{i}{j}", f"im_{i}{j}"]
    writer.writerow(header)
    sig = np.linalg.norm(vals, 2, axis=(1, 2))
    for k in range(n):
        row = [io._format_float(2 * np.pi * k / n), io._format_float(sig[k])]
        for x in vals[k].ravel():
            row += [io._format_float(x.real), io._format_float(x.imag)]
        writer.writerow(row)
    summary = {
        "grid": n,
        "sup_sigma_max": float(np.max(sig)),
        "kappa1": G.kappa1,
        "epsilon": io.epsilon_to_dict(eps),
        "perturbed_points": moved,
        "singular_probe_points": list(handle.singular_probe_points),
    }
    if args.out:
        io.atomic_write(args.out, buf.getvalue())
        sys.stdout.write(io.dumps(summary) + "\n")
    else:
        sys.stdout.write(buf.getvalue())
        sys.stderr.write(io.dumps(summary) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = io.load_problem(args.problem)
    tol = _tolerances(args, problem)
    r = problem.realization
    kappa = problem.kappa if args.kappa is None else args.kappa
    seed = args.seed if args.seed is not None else problem.seed
    eps = _epsilon(args.epsilon, r.p, r.q, seed)
    if args.solution_resolvent:
        args.resolvent = args.solution_resolvent
        G = _resolvent(args, problem, kappa, tol)
    else:
        # the resolvent depends on the data only, not on the budget being verified
        G = GammaGeneratingMatrix(assemble(r, tol_inertia=tol["tol_inertia"]))
    handle = sample_solution(G, eps)
    report = verify_solution(
        handle, r, kappa,
        sup_points=args.grid or VERIFY_SUP_POINTS,
        coeffs=args.coeffs or VERIFY_COEFFS,
        fft_points=args.fft_points,
        rel_tol=args.tol_hankel,
    )
    payload = asdict(report)
    payload["tolerances"].update({"tol_rank": tol["tol_rank"], "tol_inertia": tol["tol_inertia"]})
    payload["kappa1"] = G.kappa1
    _emit(io.dumps(payload), args.out)
    return EXIT_OK if report.passed else EXIT_NO


def cmd_spectrum(args) -> int:
    problem = io.load_problem(args.problem)
    sv = hankel_spectrum(gramians(problem.realization))
    _emit(io.dumps({"hankel_singular_values": [float(x) for x in sv]}), args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = scalar_suite()
    for name, ok, err in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  (error {err:.3e})")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NO


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with every other failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=None,
                        help=f"relative rank tolerance for minimality (default {RANK_TOL})")
    common.add_argument("--tol-inertia", type=float, default=None,
                        help="dead band for the inertia of I - PQ (default 1e-9 (1 + ||PQ||))")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output file (default: standard output)")

    parser = _Parser(
        prog="nehari-takagi",
        description="Rational matrix Nehari-Takagi problem on the unit disk.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="decide solvability")
    p.add_argument("problem")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", parents=[common], help="export the resolvent matrix")
    p.add_argument("problem")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sample", parents=[common], help="tabulate a solution on the circle")
    p.add_argument("problem")
    p.add_argument("--resolvent", default=None, help="resolvent export to reuse")
    p.add_argument("--epsilon", default="zero", help='parameter file, "zero" or "random"')
    p.add_argument("--grid", type=int, default=256)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", parents=[common], help="certify a solution")
    p.add_argument("problem")
    p.add_argument("--solution-resolvent", default=None)
    p.add_argument("--epsilon", default="zero", help='parameter file, "zero" or "random"')
    p.add_argument("--kappa", type=int, default=None)
    p.add_argument("--grid", type=int, default=VERIFY_SUP_POINTS, help="circle points for the sup norm")
    p.add_argument("--coeffs", type=int, default=VERIFY_COEFFS, help="Fourier coefficients")
    p.add_argument("--fft-points", type=int, default=VERIFY_FFT_POINTS)
    p.add_argument("--tol-hankel", type=float, default=HANKEL_REL_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", parents=[common], help="Hankel singular values")
    p.add_argument("problem")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("selftest", help="closed-form scalar checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage errors exit 1
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NotSolvable as exc:
        print(f"not solvable: {exc}", file=sys.stderr)
        return EXIT_NO
    except (NehariError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
