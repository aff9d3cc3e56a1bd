"""Named experiment suites on the GP and index-2 test problems.

Each suite fixes a problem (matrix family and right-hand side) and a list
of curves, one per method / preconditioner / Hessenberg-solver choice.
Curves are traced to `max_iter` steps (or breakdown) with the metric stop
test disabled, so the minimum of every curve is meaningful.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .densela import PinvPolicy
from .fileio import write_history_csv, write_manifest
from .krylov import ConvergenceHistory, HessSolveStrategy, SolveConfig, StopMetric
from .precond import MethodKind, Precond, PrecondKind, ab_gmres, ba_gmres, build_jacobi_spd, solve
from .problems import Family, GpParams, ProblemInstance, RhsMode, make_problem

__all__ = ["Curve", "Suite", "SUITES", "SuiteResult", "run_curve", "run_suite", "write_suite"]


@dataclass(frozen=True)
class Curve:
    name: str
    method: MethodKind
    precond: PrecondKind = PrecondKind.NONE
    pinv_alpha: Optional[float] = None
    reorthogonalize: bool = True

    @property
    def strategy(self) -> HessSolveStrategy:
        if self.pinv_alpha is None:
            return HessSolveStrategy.givens()
        return HessSolveStrategy.pseudoinverse(PinvPolicy.relative(self.pinv_alpha))


@dataclass(frozen=True)
class Suite:
    name: str
    family: Family
    params: GpParams
    consistent: bool
    curves: tuple[Curve, ...]

    @property
    def metric(self) -> StopMetric:
        return StopMetric.REL_RES if self.consistent else StopMetric.AT_REL_RES

    def problem(self, seed: int = 1, noise: float = 0.01) -> ProblemInstance:
        rhs = RhsMode.consistent() if self.consistent else RhsMode.inconsistent(noise, seed)
        return make_problem(self.family, self.params, rhs)


def _ab_family(tag: str, pinvs, reorth: bool) -> list[Curve]:
    out = []
    for pk, label in ((PrecondKind.AT, "at"), (PrecondKind.CAT, "cat")):
        for alpha in pinvs:
            suffix = "givens" if alpha is None else f"pinv{alpha:.0e}"
            out.append(Curve(f"ab-{label}-{suffix}{tag}", MethodKind.AB_GMRES, pk, alpha, reorth))
    return out


_GP = GpParams(12, 12)
_IDX2 = GpParams(12, 15)

SUITES: dict[str, Suite] = {
    s.name: s
    for s in (
        Suite(
            "gp-inconsistent",
            Family.GP,
            _GP,
            False,
            (Curve("gmres-reorth", MethodKind.GMRES),) + tuple(_ab_family("-reorth", (1e-11, 1e-8, None), True)),
        ),
        Suite(
            "gp-consistent",
            Family.GP,
            _GP,
            True,
            (Curve("gmres-reorth", MethodKind.GMRES),) + tuple(_ab_family("-reorth", (None,), True)),
        ),
        Suite(
            "index2-inconsistent",
            Family.INDEX2,
            _IDX2,
            False,
            (Curve("gmres", MethodKind.GMRES, reorthogonalize=False),)
            + tuple(_ab_family("", (1e-10, 1e-8, None), False)),
        ),
        Suite(
            "index2-consistent",
            Family.INDEX2,
            _IDX2,
            True,
            (Curve("gmres", MethodKind.GMRES, reorthogonalize=False),) + tuple(_ab_family("", (None,), False)),
        ),
        Suite(
            "ba-comparison",
            Family.GP,
            _GP,
            False,
            (
                Curve("ba-at-reorth", MethodKind.BA_GMRES),
                Curve("ba-cat-reorth", MethodKind.BA_GMRES, PrecondKind.CAT),
                Curve("ab-at-pinv1e-08-reorth", MethodKind.AB_GMRES, PrecondKind.AT, 1e-8),
                Curve("ab-cat-pinv1e-08-reorth", MethodKind.AB_GMRES, PrecondKind.CAT, 1e-8),
            ),
        ),
        Suite(
            "ba-comparison-consistent",
            Family.GP,
            _GP,
            True,
            (
                Curve("ba-at-reorth", MethodKind.BA_GMRES),
                Curve("ab-at-reorth", MethodKind.AB_GMRES, PrecondKind.AT),
                Curve("ab-cat-reorth", MethodKind.AB_GMRES, PrecondKind.CAT),
            ),
        ),
    )
}


def bench_config(curve: Curve, max_iter: int = 128) -> SolveConfig:
    return SolveConfig(
        strategy=curve.strategy,
        reorthogonalize=curve.reorthogonalize,
        max_iter=max_iter,
        stop_tol=0.0,
        record_hessenberg_spectrum=True,
    )


def run_curve(curve: Curve, problem: ProblemInstance, max_iter: int = 128, metric: StopMetric | None = None) -> ConvergenceHistory:
    """Solve `problem` the way `curve` prescribes."""
    cfg = bench_config(curve, max_iter)
    if metric is not None:
        cfg = replace(cfg, stop_metric=metric)
    a, b = problem.a, problem.b
    if curve.method is MethodKind.BA_GMRES:
        c = build_jacobi_spd(a) if curve.precond is PrecondKind.CAT else None
        return ba_gmres(a, b, None, cfg, c_diag=c)
    if curve.method is MethodKind.GMRES:
        return solve(a, b, MethodKind.GMRES, config=cfg)
    pc = Precond.jacobi(a) if curve.precond is PrecondKind.CAT else Precond.at()
    return ab_gmres(a, pc, b, None, cfg)


@dataclass
class SuiteResult:
    suite: Suite
    problem: ProblemInstance
    histories: dict[str, ConvergenceHistory]

    def minimum(self, curve: str) -> float:
        return self.histories[curve].min_metric(self.suite.metric)

    def summary_rows(self) -> list[dict]:
        rows = []
        metric = self.suite.metric
        for name, h in self.histories.items():
            vals = h.column(metric.value)
            it = int(vals.argmin()) + 1 if vals.size else 0
            rows.append(
                {
                    "curve": name,
                    "metric": metric.value,
                    "min_value": h.min_metric(metric),
                    "min_iter": it,
                    "iterations": h.iterations,
                    "termination": h.termination.value,
                }
            )
        return rows


def run_suite(name: str, seed: int = 1, max_iter: int = 128, jobs: int = 1) -> SuiteResult:
    """Run every curve of suite `name` and return the histories in curve order."""
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    problem = suite.problem(seed)

    def one(curve):
        return run_curve(curve, problem, max_iter, suite.metric)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            hists = list(pool.map(one, suite.curves))
    else:
        hists = [one(c) for c in suite.curves]
    return SuiteResult(suite, problem, {c.name: h for c, h in zip(suite.curves, hists)})


def write_suite(result: SuiteResult, outdir, seed: int = 1, max_iter: int = 128, argv=None) -> list[Path]:
    """One history CSV per curve plus ``summary.csv``, each with a manifest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    suite = result.suite
    gen = {
        "family": suite.family.value,
        "rho": suite.params.rho,
        "gamma": suite.params.gamma,
        "rhs": result.problem.rhs_mode.kind.value,
        "noise": result.problem.rhs_mode.noise_scale,
        **result.problem.metadata,
    }
    written = []
    for curve in suite.curves:
        path = write_history_csv(outdir / f"{suite.name}__{curve.name}.csv", result.histories[curve.name])
        cfg = bench_config(curve, max_iter)
        write_manifest(
            path,
            config={
                "suite": suite.name,
                "curve": curve.name,
                "method": curve.method.value,
                "precond": curve.precond.value,
                "hsolve": str(cfg.strategy),
                "reorthogonalize": cfg.reorthogonalize,
                "max_iter": max_iter,
                "breakdown_tol": cfg.breakdown_tol,
                "stop_tol": cfg.stop_tol,
            },
            generator=gen,
            seed=seed,
            argv=argv,
        )
        written.append(path)
    summary = outdir / f"{suite.name}__summary.csv"
    rows = result.summary_rows()
    with summary.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({**row, "min_value": f"{row['min_value']:.16e}"})
    write_manifest(summary, config={"suite": suite.name, "max_iter": max_iter}, generator=gen, seed=seed, outputs=written, argv=argv)
    written.append(summary)
    return written
