"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for the report alone, or
through pytest, where the lines are also repeated in the terminal summary.
"""

from __future__ import annotations

import functools
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import random_singular  # noqa: E402
from singular_gmres import bench  # noqa: E402
from singular_gmres.analysis import bound_inputs, classify, is_range_symmetric, matrix_index, min_norm_lsq, theorem_bound  # noqa: E402
from singular_gmres.densela import PinvPolicy, orthonormality_defect, pinv_truncated, svd  # noqa: E402
from singular_gmres.krylov import (  # noqa: E402
    ArnoldiState,
    HessSolveStrategy,
    SolveConfig,
    StopMetric,
    Termination,
    arnoldi_step,
    gmres,
    solve_hessenberg_givens,
    solve_hessenberg_pinv,
)
from singular_gmres.precond import Precond, ab_gmres, build_jacobi_spd  # noqa: E402
from singular_gmres.problems import RhsMode, gen_gp_matrix, gen_index2_matrix, make_problem  # noqa: E402

REPORT: dict[int, str] = {}

AT = StopMetric.AT_REL_RES
REL = StopMetric.REL_RES


class Check:
    """Collects named sub-clauses and renders a one-line verdict."""

    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.parts: list[tuple[str, bool, str]] = []

    def add(self, label: str, ok: bool, detail: str) -> None:
        self.parts.append((label, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.parts)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        body = "; ".join(f"{lbl} {'ok' if ok else 'FAIL'} ({d})" for lbl, ok, d in self.parts)
        return f"criterion {self.number} [{verdict}] {self.title}: {body}"

    def finish(self) -> "Check":
        REPORT[self.number] = self.line()
        print(self.line())
        return self


@functools.lru_cache(maxsize=None)
def suite(name: str) -> tuple[bench.SuiteResult, float]:
    start = time.perf_counter()
    res = bench.run_suite(name)
    return res, time.perf_counter() - start


# ----------------------------------------------------------------------------


def criterion_1() -> Check:
    chk = Check(1, "GP inconsistent")
    res, secs = suite("gp-inconsistent")
    gm = res.minimum("gmres-reorth")
    chk.add("(a) GMRES min at_rel_res >= 1e-2", gm >= 1e-2, f"min={gm:.2e}")
    at = res.minimum("ab-at-pinv1e-08-reorth")
    cat = res.minimum("ab-cat-pinv1e-08-reorth")
    chk.add("(b) CA^T vs A^T ratio >= 1e3", at / cat >= 1e3, f"A^T={at:.2e}, CA^T={cat:.2e}, ratio={at / cat:.1e}")
    chk.add("runtime < 30 s", secs < 30, f"{secs:.2f} s")
    return chk.finish()


def criterion_2() -> Check:
    chk = Check(2, "GP consistent")
    res, _ = suite("gp-consistent")
    g = res.histories["gmres-reorth"]
    last = g.records[-1]
    reached = g.first_iter_below(REL, 1e-2)
    chk.add(
        "GMRES breakdown in [40, 60] after rel_res <= 1e-2",
        g.termination is Termination.BREAKDOWN and 40 <= g.iterations <= 60 and reached is not None and reached <= g.iterations,
        f"termination={g.termination.value} at {g.iterations}, h={last.h_subdiag:.1e}, first<=1e-2 at {reached}",
    )
    cat_h = res.histories["ab-cat-givens-reorth"]
    at_h = res.histories["ab-at-givens-reorth"]
    cat_min, gm_min = cat_h.min_metric(REL), g.min_metric(REL)
    chk.add("CA^T reaches rel_res <= 1e-3", cat_min <= 1e-3, f"min={cat_min:.2e}")
    chk.add("CA^T min >= 1e2x below GMRES", gm_min / cat_min >= 1e2, f"GMRES={gm_min:.2e}, ratio={gm_min / cat_min:.1e}")
    it_cat, it_at = cat_h.first_iter_below(REL, 1e-3), at_h.first_iter_below(REL, 1e-3)
    chk.add(
        "CA^T reaches 1e-3 in fewer iterations than A^T",
        it_cat is not None and (it_at is None or it_cat < it_at),
        f"CA^T at {it_cat}, A^T at {it_at}",
    )
    return chk.finish()


def criterion_3() -> Check:
    chk = Check(3, "index-2 (rho=12, gamma=15)")
    inc, _ = suite("index2-inconsistent")
    con, _ = suite("index2-consistent")
    g_inc, g_con = inc.minimum("gmres"), con.minimum("gmres")
    chk.add("GMRES stagnates (inconsistent, at_rel_res > 1e-2)", g_inc > 1e-2, f"min={g_inc:.2e}")
    chk.add("GMRES stagnates (consistent, rel_res > 1e-2)", g_con > 1e-2, f"min={g_con:.2e}")
    ab_inc = {n: inc.minimum(n) for n in inc.histories if n.startswith("ab-") and "pinv" in n}
    ab_con = {n: con.minimum(n) for n in con.histories if n.startswith("ab-")}
    worst = max(list(ab_inc.values()) + list(ab_con.values()))
    chk.add("AB-GMRES converges (every AB curve <= 1e-6)", worst <= 1e-6, f"worst min={worst:.2e}")
    at, cat = inc.minimum("ab-at-pinv1e-08"), inc.minimum("ab-cat-pinv1e-08")
    chk.add("inconsistent CA^T >= 1e3x below A^T", at / cat >= 1e3, f"A^T={at:.2e}, CA^T={cat:.2e}, ratio={at / cat:.1e}")
    at, cat = con.minimum("ab-at-givens"), con.minimum("ab-cat-givens")
    chk.add("consistent CA^T >= 1e2x below A^T", at / cat >= 1e2, f"A^T={at:.2e}, CA^T={cat:.2e}, ratio={at / cat:.1e}")
    return chk.finish()


def criterion_4() -> Check:
    chk = Check(4, "BA-GMRES comparison")
    inc, _ = suite("ba-comparison")
    ba = inc.minimum("ba-at-reorth")
    ab_at = inc.minimum("ab-at-pinv1e-08-reorth")
    ab_cat = inc.minimum("ab-cat-pinv1e-08-reorth")
    chk.add("inconsistent BA >= 1e2x below AB(A^T, pinv)", ab_at / ba >= 1e2, f"BA={ba:.2e}, AB A^T={ab_at:.2e}, ratio={ab_at / ba:.1e}")
    ratio = max(ba, ab_cat) / min(ba, ab_cat)
    chk.add("inconsistent BA within 10x of AB(CA^T, pinv)", ratio <= 10, f"AB CA^T={ab_cat:.2e}, factor={ratio:.1f}")
    con, _ = suite("ba-comparison-consistent")
    ba = con.minimum("ba-at-reorth")
    for name, label in (("ab-at-reorth", "A^T"), ("ab-cat-reorth", "CA^T")):
        m = con.minimum(name)
        chk.add(f"consistent AB({label}) >= 1e2x below BA", ba / m >= 1e2, f"BA={ba:.2e}, AB={m:.2e}, ratio={ba / m:.1e}")
    return chk.finish()


def criterion_5(count: int = 200, seed: int = 20240) -> Check:
    chk = Check(5, "oracle equivalence on random singular systems")
    rng = np.random.default_rng(seed)
    cfg = SolveConfig(strategy=HessSolveStrategy.pseudoinverse(PinvPolicy.relative(1e-11)), stop_metric=AT, stop_tol=1e-12)
    worst, failures, kinds = 0.0, 0, {"consistent": 0, "inconsistent": 0}
    for i in range(count):
        n = int(rng.integers(4, 51))
        deficiency = max(1, round(rng.uniform(0.1, 0.5) * n))
        a = random_singular(rng, n, n - deficiency)
        consistent = i % 2 == 0
        b = a @ rng.standard_normal(n) if consistent else rng.standard_normal(n)
        kinds["consistent" if consistent else "inconsistent"] += 1
        x = ab_gmres(a, Precond.jacobi(a), b, config=cfg).final_x
        x_star = min_norm_lsq(a, b)
        r, r_star = np.linalg.norm(b - a @ x), np.linalg.norm(b - a @ x_star)
        # a consistent system has r_star ~ 0, so measure against ||b|| as well
        err = abs(r - r_star) / max(r_star, np.linalg.norm(b))
        worst = max(worst, err)
        failures += err > 1e-6
    chk.add(
        f"{count} systems within 1e-6",
        failures == 0,
        f"failures={failures}, worst={worst:.1e}, consistent={kinds['consistent']}, inconsistent={kinds['inconsistent']}",
    )
    return chk.finish()


def criterion_6() -> Check:
    chk = Check(6, "property suites")
    rng = np.random.default_rng(6)

    worst_mp = 0.0
    worst_svd = 0.0
    for _ in range(50):
        m, n = rng.integers(1, 12, 2)
        b = rng.standard_normal((m, n))
        p = pinv_truncated(b, PinvPolicy.none()).pinv
        worst_mp = max(
            worst_mp,
            np.linalg.norm(b @ p @ b - b),
            np.linalg.norm(p @ b @ p - p),
            np.linalg.norm((b @ p).T - b @ p),
            np.linalg.norm((p @ b).T - p @ b),
        )
        f = svd(b)
        worst_svd = max(worst_svd, np.linalg.norm(f.reconstruct() - b) / max(1.0, np.linalg.norm(b)))
    chk.add("Moore-Penrose", worst_mp <= 1e-9, f"worst={worst_mp:.1e}")
    chk.add("SVD reconstruction", worst_svd <= 1e-12, f"worst={worst_svd:.1e}")

    worst_arn = 0.0
    for reorth in (False, True):
        a = rng.standard_normal((30, 30))
        state = ArnoldiState.start(rng.standard_normal(30), 30)
        for _ in range(30):
            state, brk = arnoldi_step(a, state, reorth)
            k = state.k
            rel = np.linalg.norm(a @ state._v[:, :k] - state._v[:, : k + 1] @ state.hess) / (np.linalg.norm(a) * math.sqrt(k))
            worst_arn = max(worst_arn, rel)
            if brk:
                break
    chk.add("Arnoldi relation", worst_arn <= 1e-10, f"worst scaled={worst_arn:.1e}")

    gp = make_problem("gp", rhs=RhsMode.inconsistent())
    h = gmres(gp.a, gp.b, config=SolveConfig(max_iter=128, stop_tol=0.0))
    v = h.arnoldi._v
    defect = max(orthonormality_defect(v[:, :k]) for k in range(1, h.arnoldi.k + 1))
    chk.add("reorthogonalisation defect on GP", defect <= 1e-12, f"max={defect:.1e} over {h.arnoldi.k} steps")

    worst_gp = 0.0
    for _ in range(50):
        k = int(rng.integers(1, 15))
        hh = np.triu(rng.standard_normal((k + 1, k)), -1)
        s = np.linalg.svd(hh, compute_uv=False)
        if s[-1] < 1e-8 * s[0]:
            continue
        yg = solve_hessenberg_givens(hh, 1.0)
        yp = solve_hessenberg_pinv(hh, 1.0, PinvPolicy.none())[0]
        worst_gp = max(worst_gp, np.linalg.norm(yg - yp) / np.linalg.norm(yp))
    chk.add("Givens vs pinv", worst_gp <= 1e-8, f"worst={worst_gp:.1e}")

    c = build_jacobi_spd(gp.a)
    bi = bound_inputs(gp.a, c, gp.b)
    hb = ab_gmres(
        gp.a, Precond.cat(c), gp.b,
        config=SolveConfig(strategy=HessSolveStrategy.pseudoinverse(PinvPolicy.relative(1e-8)), max_iter=128, stop_tol=0.0),
    )
    atb = np.linalg.norm(gp.a.T @ gp.b)
    violations = sum(
        r.at_rel_res * atb > theorem_bound(bi, r.iter)[1] * (1 + 1e-6) for r in hb.records if r.at_rel_res >= 1e-12
    )
    chk.add("A^T r bound on GP suite", violations == 0, f"violations={violations}")

    gpc = classify(gen_gp_matrix())
    i2 = matrix_index(gen_index2_matrix())
    ab = gp.a @ np.diag(c) @ gp.a.T
    ok = gpc.index == 1 and not gpc.is_ep and i2 == 2 and is_range_symmetric(ab)
    chk.add("classifiers", ok, f"GP index={gpc.index} ep={gpc.is_ep}; index-2 index={i2}; A CA^T ep={is_range_symmetric(ab)}")
    return chk.finish()


def criterion_7() -> Check:
    chk = Check(7, "breakdown counterexample")
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    e1 = np.array([1.0, 0.0])
    g = gmres(a, e1)
    chk.add(
        "GMRES breaks down at 1 without reduction",
        g.termination is Termination.BREAKDOWN and g.iterations == 1 and g.records[0].rel_res == 1.0,
        f"termination={g.termination.value}, iters={g.iterations}, rel_res={g.records[0].rel_res}",
    )
    ab = ab_gmres(a, Precond.at(), e1)
    exact = ab.iterations == 1 and np.array_equal(a @ ab.final_x, e1)
    chk.add("AB-GMRES(A^T) exact at 1", exact, f"iters={ab.iterations}, x={ab.final_x.tolist()}")
    return chk.finish()


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 8)])
def test_acceptance(check):
    result = check()
    assert result.passed, result.line()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(r.passed for r in results) else 1)
