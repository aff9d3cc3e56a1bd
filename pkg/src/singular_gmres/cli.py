"""Command-line front end: ``singular-gmres <subcommand> ...``.

Exit codes: 0 success, 2 usage or file error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import bench
from .analysis import classify
from .densela import PinvPolicy, SvdConvergenceError
from .fileio import read_matrix, read_vector, write_history_csv, write_manifest, write_matrix, write_vector
from .krylov import HessSolveStrategy, SolveConfig, StopMetric
from .precond import MethodKind, Precond, ba_gmres, solve
from .problems import A12_LAYOUT_NOTE, GpParams, RhsMode, gen_gp_matrix, gen_index2_matrix, gen_rhs

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_DEFAULT_GAMMA = {"gp": 12.0, "index2": 15.0}


class UsageError(Exception):
    """Bad flag combination or unreadable / unwritable file."""


def _cmd_gen(args) -> int:
    gamma = _DEFAULT_GAMMA[args.family] if args.gamma is None else args.gamma
    params = GpParams(args.rho, gamma)
    a = gen_gp_matrix(params) if args.family == "gp" else gen_index2_matrix(params)
    out = write_matrix(args.out, a, comment=f"{args.family} rho={args.rho} gamma={gamma}")
    write_manifest(
        out,
        config={"subcommand": "gen"},
        generator={"family": args.family, "rho": args.rho, "gamma": gamma, "a12_layout": A12_LAYOUT_NOTE},
        argv=args.argv,
    )
    print(f"wrote {out} ({a.shape[0]}x{a.shape[1]}, nnz={np.count_nonzero(a)})")
    return EXIT_OK


def _cmd_rhs(args) -> int:
    a = read_matrix(args.matrix)
    mode = RhsMode.consistent() if args.mode == "consistent" else RhsMode.inconsistent(args.noise, args.seed)
    b = gen_rhs(a, mode)
    out = write_vector(args.out, b)
    write_manifest(
        out,
        config={"subcommand": "rhs", "matrix": args.matrix},
        generator={"mode": args.mode, "noise": mode.noise_scale},
        seed=mode.seed,
        argv=args.argv,
    )
    print(f"wrote {out}")
    return EXIT_OK


def _solve_config(args) -> SolveConfig:
    if args.hsolve == "pinv":
        policy = PinvPolicy.default() if args.pinv_alpha is None else PinvPolicy.relative(args.pinv_alpha)
        strategy = HessSolveStrategy.pseudoinverse(policy)
    else:
        if args.pinv_alpha is not None:
            raise UsageError("--pinv-alpha requires --hsolve pinv")
        strategy = HessSolveStrategy.givens()
    return SolveConfig(
        strategy=strategy,
        reorthogonalize=args.reorth,
        max_iter=args.maxit,
        stop_metric=StopMetric(args.stop_metric),
        stop_tol=args.stop_tol,
        record_hessenberg_spectrum=True,
    )


def _cmd_solve(args) -> int:
    if args.b_kind is not None and args.method != "ab-gmres":
        raise UsageError("--b-kind is only valid with --method ab-gmres")
    a = read_matrix(args.matrix)
    b = read_vector(args.rhs)
    if a.shape[0] != a.shape[1] or b.size != a.shape[0]:
        raise UsageError(f"dimension mismatch: A is {a.shape}, b has length {b.size}")
    cfg = _solve_config(args)
    method = MethodKind(args.method)
    if method is MethodKind.AB_GMRES:
        pc = Precond.at() if args.b_kind == "at" else Precond.jacobi(a)
        hist = solve(a, b, method, pc, cfg)
    elif method is MethodKind.BA_GMRES:
        hist = ba_gmres(a, b, None, cfg)
    else:
        hist = solve(a, b, method, None, cfg)
    if args.history_out:
        out = write_history_csv(args.history_out, hist)
        write_manifest(
            out,
            config={
                "subcommand": "solve",
                "matrix": args.matrix,
                "rhs": args.rhs,
                "method": method.value,
                "b_kind": args.b_kind,
                "hsolve": str(cfg.strategy),
                "reorthogonalize": cfg.reorthogonalize,
                "max_iter": cfg.max_iter,
                "breakdown_tol": cfg.breakdown_tol,
                "stop_metric": cfg.stop_metric.value,
                "stop_tol": cfg.stop_tol,
            },
            argv=args.argv,
        )
    rec = hist.records[-1] if hist.records else None
    rel = rec.rel_res if rec else hist.initial_rel_res
    at = rec.at_rel_res if rec else hist.initial_at_rel_res
    print(f"rel_res={rel:.16e}")
    print(f"at_rel_res={at:.16e}")
    print(f"iterations={hist.iterations}")
    print(f"termination={hist.termination.value}")
    for note in hist.notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def _cmd_classify(args) -> int:
    print(classify(read_matrix(args.matrix), args.tol).report())
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    a = read_matrix(args.matrix)
    s = np.linalg.svd(a, compute_uv=False)
    out = Path(args.out)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "sigma"])
        for i, v in enumerate(s, 1):
            w.writerow([i, f"{v:.16e}"])
    write_manifest(out, config={"subcommand": "spectrum", "matrix": args.matrix}, argv=args.argv)
    print(f"wrote {out} ({s.size} singular values)")
    return EXIT_OK


def _cmd_bench(args) -> int:
    names = sorted(bench.SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in bench.SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from {sorted(bench.SUITES)}")
    for name in names:
        res = bench.run_suite(name, seed=args.seed, max_iter=args.maxit, jobs=args.jobs)
        bench.write_suite(res, args.outdir, seed=args.seed, max_iter=args.maxit, argv=args.argv)
        for row in res.summary_rows():
            print(f"{name:26s} {row['curve']:28s} min {row['metric']}={row['min_value']:.3e} at iter {row['min_iter']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="singular-gmres", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a GP or index-2 test matrix")
    g.add_argument("--family", choices=["gp", "index2"], required=True)
    g.add_argument("--rho", type=float, default=12.0)
    g.add_argument("--gamma", type=float, default=None, help="default 12 (gp) or 15 (index2)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    r = sub.add_parser("rhs", help="write a right-hand side for a matrix")
    r.add_argument("--matrix", required=True)
    r.add_argument("--mode", choices=["consistent", "inconsistent"], default="consistent")
    r.add_argument("--noise", type=float, default=0.01)
    r.add_argument("--seed", type=int, default=1)
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_rhs)

    s = sub.add_parser("solve", help="run a solver and optionally write its history")
    s.add_argument("--matrix", required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--method", choices=[m.value for m in MethodKind], default="ab-gmres")
    s.add_argument("--b-kind", choices=["at", "cat"], default=None)
    s.add_argument("--reorth", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--hsolve", choices=["givens", "pinv"], default="givens")
    s.add_argument("--pinv-alpha", type=float, default=None)
    s.add_argument("--maxit", type=int, default=None, help="default n")
    s.add_argument("--stop-metric", choices=[m.value for m in StopMetric], default="rel_res")
    s.add_argument("--stop-tol", type=float, default=1e-10)
    s.add_argument("--history-out", default=None)
    s.set_defaults(func=_cmd_solve)

    c = sub.add_parser("classify", help="index, EP test, rank and conditioning")
    c.add_argument("--matrix", required=True)
    c.add_argument("--tol", type=float, default=None)
    c.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("spectrum", help="singular values of a matrix as CSV")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_spectrum)

    b = sub.add_parser("bench", help="run a named experiment suite")
    b.add_argument("--suite", required=True, help=f"one of {sorted(bench.SUITES)} or 'all'")
    b.add_argument("--outdir", required=True)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--maxit", type=int, default=128)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    args.argv = ["singular-gmres", *argv]
    try:
        return args.func(args)
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FloatingPointError, SvdConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
