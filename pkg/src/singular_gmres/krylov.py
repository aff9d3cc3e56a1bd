"""Full-memory GMRES with pluggable Hessenberg least-squares solvers.

The Arnoldi basis is built with classical Gram-Schmidt, optionally followed
by exactly one more classical Gram-Schmidt pass.  The small least-squares
problem ``min ||beta e1 - H y||`` is solved either by incremental Givens QR
or by a truncated pseudoinverse of the Hessenberg matrix; the latter keeps
the iteration meaningful when the Hessenberg matrix becomes numerically
singular, as happens for inconsistent singular systems.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .densela import PinvPolicy, as_vector, pinv_truncated, svd

__all__ = [
    "RankDeficientHessenbergError",
    "ArnoldiState",
    "arnoldi_step",
    "gram_schmidt_pass",
    "GivensQR",
    "solve_hessenberg_givens",
    "solve_hessenberg_pinv",
    "HessSolveStrategy",
    "StopMetric",
    "Termination",
    "SolveConfig",
    "IterateRecord",
    "ConvergenceHistory",
    "as_operator",
    "gmres",
]


class RankDeficientHessenbergError(np.linalg.LinAlgError):
    """Givens QR hit an exactly zero pivot; use a pseudoinverse strategy."""


def as_operator(a, n: Optional[int] = None) -> LinearOperator:
    """Wrap a dense matrix, LinearOperator or callable ``v -> A v``."""
    if isinstance(a, LinearOperator) or hasattr(a, "shape"):
        return aslinearoperator(a)
    if callable(a):
        if n is None:
            raise ValueError("a callable operator needs an explicit size")
        return LinearOperator((n, n), matvec=a, dtype=np.float64)
    raise TypeError(f"cannot use {type(a).__name__} as a linear operator")


# --------------------------------------------------------------------------
# Arnoldi
# --------------------------------------------------------------------------


@dataclass
class ArnoldiState:
    """Krylov basis and Hessenberg matrix after `k` Arnoldi steps.

    Storage is preallocated for `capacity` steps.  ``v_basis`` is the
    n x (k+1) orthonormal basis (n x k after an exact breakdown) and
    ``hess`` the (k+1) x k upper Hessenberg matrix.
    """

    n: int
    capacity: int
    beta: float
    k: int = 0
    exhausted: bool = False
    _v: np.ndarray = field(default=None, repr=False)
    _h: np.ndarray = field(default=None, repr=False)

    @classmethod
    def start(cls, r0, capacity: int) -> "ArnoldiState":
        r0 = as_vector(r0, "r0")
        beta = float(np.linalg.norm(r0))
        if beta == 0.0:
            raise ValueError("cannot start Arnoldi from a zero vector")
        n = r0.size
        v = np.zeros((n, capacity + 1), order="F")
        v[:, 0] = r0 / beta
        h = np.zeros((capacity + 1, capacity), order="F")
        return cls(n=n, capacity=capacity, beta=beta, _v=v, _h=h)

    @property
    def v_basis(self) -> np.ndarray:
        return self._v[:, : self.k + (0 if self.exhausted else 1)]

    @property
    def hess(self) -> np.ndarray:
        return self._h[: self.k + 1, : self.k]


def gram_schmidt_pass(w: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One classical Gram-Schmidt sweep of `w` against the columns of `v`."""
    c = v.T @ w
    return w - v @ c, c


def arnoldi_step(a_op, state: ArnoldiState, reorthogonalize: bool = False) -> tuple[ArnoldiState, bool]:
    """Extend the Arnoldi decomposition by one column.

    The new subdiagonal entry is ``state.hess[k, k-1]`` after the call.
    Only an exactly zero subdiagonal counts as breakdown here; threshold
    tests belong to the caller.  The state is updated in place and returned.
    """
    if state.exhausted:
        raise RuntimeError("Arnoldi process already broke down")
    if state.k >= state.capacity:
        raise RuntimeError(f"Arnoldi storage exhausted at {state.capacity} steps")
    op = as_operator(a_op, state.n)
    if op.shape != (state.n, state.n):
        raise ValueError(f"operator shape {op.shape} does not match basis length {state.n}")
    j = state.k
    vj = state._v[:, : j + 1]
    w = np.asarray(op.matvec(state._v[:, j]), dtype=np.float64).reshape(-1)
    w, h = gram_schmidt_pass(w, vj)
    if reorthogonalize:
        w, c = gram_schmidt_pass(w, vj)
        h = h + c
    hnext = float(np.linalg.norm(w))
    state._h[: j + 1, j] = h
    state._h[j + 1, j] = hnext
    state.k = j + 1
    if hnext == 0.0:
        state.exhausted = True
        return state, True
    state._v[:, j + 1] = w / hnext
    return state, False


# --------------------------------------------------------------------------
# Hessenberg least squares
# --------------------------------------------------------------------------


class GivensQR:
    """Incremental QR of an upper Hessenberg matrix by Givens rotations.

    Columns are appended one at a time; ``residual`` is the least-squares
    residual norm ``|g_{k+1}|`` of the current system.
    """

    def __init__(self, beta: float, capacity: int):
        self.r = np.zeros((capacity + 1, capacity), order="F")
        self.g = np.zeros(capacity + 1)
        self.g[0] = beta
        self.cs = np.zeros(capacity)
        self.sn = np.zeros(capacity)
        self.k = 0

    def add_column(self, col) -> None:
        """Append Hessenberg column k (length k + 2)."""
        k = self.k
        h = np.array(col, dtype=np.float64)
        if h.size != k + 2:
            raise ValueError(f"column {k} must have {k + 2} entries, got {h.size}")
        for i in range(k):
            a, b = h[i], h[i + 1]
            h[i] = self.cs[i] * a + self.sn[i] * b
            h[i + 1] = -self.sn[i] * a + self.cs[i] * b
        rho = math.hypot(h[k], h[k + 1])
        if rho == 0.0:
            c, s = 1.0, 0.0
        else:
            c, s = h[k] / rho, h[k + 1] / rho
        self.cs[k], self.sn[k] = c, s
        h[k], h[k + 1] = rho, 0.0
        self.r[: k + 2, k] = h
        gk = self.g[k]
        self.g[k] = c * gk
        self.g[k + 1] = -s * gk
        self.k = k + 1

    @property
    def residual(self) -> float:
        return abs(float(self.g[self.k]))

    def solve(self) -> np.ndarray:
        k = self.k
        rk = self.r[:k, :k]
        if np.any(np.diag(rk) == 0.0):
            raise RankDeficientHessenbergError(
                "Hessenberg matrix is rank deficient; use a pseudoinverse strategy"
            )
        return scipy.linalg.solve_triangular(rk, self.g[:k], lower=False)


def _check_hessenberg(hess: np.ndarray) -> np.ndarray:
    hess = np.asarray(hess, dtype=np.float64)
    if hess.ndim != 2 or hess.shape[0] != hess.shape[1] + 1:
        raise ValueError(f"expected a (k+1) x k Hessenberg matrix, got {hess.shape}")
    return hess


def solve_hessenberg_givens(hess, beta: float) -> np.ndarray:
    """Least-squares solution of ``min ||beta e1 - H y||`` by Givens QR."""
    hess = _check_hessenberg(hess)
    k = hess.shape[1]
    qr = GivensQR(beta, k)
    for j in range(k):
        qr.add_column(hess[: j + 2, j])
    return qr.solve()


class HessSolution(NamedTuple):
    y: np.ndarray
    rank_used: int
    tol_used: float
    sigma_max: float
    sigma_min: float


def _pinv_solve(hess: np.ndarray, beta: float, policy: PinvPolicy) -> HessSolution:
    f = svd(hess)
    p, rank, tol = pinv_truncated(hess, policy, factors=f)
    y = p[:, 0] * beta
    smax = float(f.sigma[0]) if f.sigma.size else 0.0
    smin = float(f.sigma[-1]) if f.sigma.size else 0.0
    return HessSolution(y, rank, tol, smax, smin)


def solve_hessenberg_pinv(hess, beta: float, policy: PinvPolicy | None = None) -> tuple[np.ndarray, int, float]:
    """Minimum-norm solution of the truncated Hessenberg least-squares problem.

    Returns ``(y, rank_used, tol_used)`` where ``y = pinv(H) @ (beta e1)``.
    """
    hess = _check_hessenberg(hess)
    sol = _pinv_solve(hess, beta, policy or PinvPolicy.default())
    return sol.y, sol.rank_used, sol.tol_used


@dataclass(frozen=True)
class HessSolveStrategy:
    """Givens QR (``pinv is None``) or truncated pseudoinverse."""

    pinv: Optional[PinvPolicy] = None

    @classmethod
    def givens(cls) -> "HessSolveStrategy":
        return cls(None)

    @classmethod
    def pseudoinverse(cls, policy: PinvPolicy | None = None) -> "HessSolveStrategy":
        return cls(policy or PinvPolicy.default())

    @property
    def is_givens(self) -> bool:
        return self.pinv is None

    def __str__(self) -> str:
        return "givens" if self.pinv is None else f"pinv[{self.pinv}]"


# --------------------------------------------------------------------------
# Driver
# --------------------------------------------------------------------------


class StopMetric(enum.Enum):
    REL_RES = "rel_res"
    AT_REL_RES = "at_rel_res"


class Termination(enum.Enum):
    CONVERGED = "converged"
    BREAKDOWN = "breakdown"
    MAX_ITER = "max_iter"


@dataclass(frozen=True)
class SolveConfig:
    """Settings shared by every GMRES variant.

    A ``stop_tol`` of 0 disables the metric test so that a run only ends on
    breakdown or `max_iter`; this is how full convergence curves are traced.
    ``max_iter=None`` means the system size.
    """

    strategy: HessSolveStrategy = field(default_factory=HessSolveStrategy.givens)
    reorthogonalize: bool = True
    max_iter: Optional[int] = None
    breakdown_tol: float = 1e-15
    stop_metric: StopMetric = StopMetric.REL_RES
    stop_tol: float = 1e-10
    record_hessenberg_spectrum: bool = False

    def __post_init__(self):
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.breakdown_tol < 0 or self.stop_tol < 0:
            raise ValueError("tolerances must be nonnegative")


@dataclass(frozen=True)
class IterateRecord:
    iter: int
    rel_res: float
    at_rel_res: float
    h_subdiag: float
    sigma_max_h: float
    sigma_min_h: float
    rank_used: int
    tol_used: float


@dataclass
class ConvergenceHistory:
    records: list[IterateRecord]
    termination: Termination
    final_x: np.ndarray
    final_iterate: np.ndarray
    initial_rel_res: float
    initial_at_rel_res: float
    notes: list[str] = field(default_factory=list)
    arnoldi: Optional[ArnoldiState] = field(default=None, repr=False)

    @property
    def iterations(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)

    @property
    def rel_res(self) -> np.ndarray:
        return self.column("rel_res")

    @property
    def at_rel_res(self) -> np.ndarray:
        return self.column("at_rel_res")

    def min_metric(self, metric: StopMetric | str) -> float:
        """Smallest value of `metric` over the run, including iteration 0."""
        name = StopMetric(metric).value
        start = self.initial_rel_res if name == "rel_res" else self.initial_at_rel_res
        vals = self.column(name)
        return float(min(start, vals.min())) if vals.size else float(start)

    def first_iter_below(self, metric: StopMetric | str, level: float) -> Optional[int]:
        """First iteration whose `metric` is <= `level`, or None."""
        name = StopMetric(metric).value
        for r in self.records:
            if getattr(r, name) <= level:
                return r.iter
        return None


MetricFn = Callable[[np.ndarray], tuple[float, float]]


def _default_metrics(op: LinearOperator, b: np.ndarray, notes: list[str]) -> MetricFn:
    nb = float(np.linalg.norm(b))
    try:
        atb = float(np.linalg.norm(op.rmatvec(b)))
    except NotImplementedError:
        atb = None
        notes.append("operator has no transpose; at_rel_res reported as nan")
    if atb == 0.0:
        notes.append("||A^T b|| = 0; at_rel_res reported as 0")

    def metrics(x):
        r = b - op.matvec(x)
        rel = float(np.linalg.norm(r)) / nb if nb > 0 else 0.0
        if atb is None:
            return rel, math.nan
        at = float(np.linalg.norm(op.rmatvec(r))) / atb if atb > 0 else 0.0
        return rel, at

    return metrics


def gmres(
    a_op,
    b,
    x0=None,
    config: SolveConfig | None = None,
    *,
    to_solution: Callable[[np.ndarray], np.ndarray] | None = None,
    metrics: MetricFn | None = None,
    op_scale: float | None = None,
) -> ConvergenceHistory:
    """Full (unrestarted) GMRES on ``A u = b``.

    Parameters
    ----------
    a_op : ndarray, LinearOperator or callable
        The square operator the Krylov space is built from.
    b : array_like
    x0 : array_like, optional
        Initial iterate, zero by default.
    config : SolveConfig, optional
    to_solution : callable, optional
        Maps the Krylov iterate ``u_k = x0 + V_k y`` to the reported
        solution (e.g. ``z -> B z`` for right preconditioning).  Identity by
        default.
    metrics : callable, optional
        ``x -> (rel_res, at_rel_res)`` evaluated on the reported solution.
        Defaults to residual norms of ``a_op`` against `b`.
    op_scale : float, optional
        Norm used to scale the breakdown threshold; defaults to the
        Frobenius norm of a dense `a_op` and 1 otherwise.

    Returns
    -------
    ConvergenceHistory
        One record per Arnoldi step.  A run that stops on breakdown still
        forms the iterate from the last Hessenberg solve.
    """
    config = config or SolveConfig()
    b = as_vector(b, "b")
    n = b.size
    op = as_operator(a_op, n)
    if op.shape != (n, n):
        raise ValueError(f"operator shape {op.shape} incompatible with b of length {n}")
    x0 = np.zeros(n) if x0 is None else as_vector(x0, "x0")
    if x0.size != n:
        raise ValueError(f"x0 has length {x0.size}, expected {n}")
    to_solution = to_solution or (lambda u: u)
    notes: list[str] = []
    metrics = metrics or _default_metrics(op, b, notes)
    if op_scale is None:
        op_scale = float(np.linalg.norm(a_op)) if isinstance(a_op, np.ndarray) else 1.0
    h_floor = config.breakdown_tol * max(1.0, op_scale)
    max_iter = config.max_iter or n

    def stop(rel: float, at: float) -> bool:
        val = rel if config.stop_metric is StopMetric.REL_RES else at
        return val <= config.stop_tol

    x_start = to_solution(x0)
    rel0, at0 = metrics(x_start)
    r0 = b - op.matvec(x0)
    beta = float(np.linalg.norm(r0))
    if beta == 0.0 or stop(rel0, at0):
        return ConvergenceHistory([], Termination.CONVERGED, x_start, x0.copy(), rel0, at0, notes)

    state = ArnoldiState.start(r0, max_iter)
    givens = GivensQR(beta, max_iter) if config.strategy.is_givens else None
    records: list[IterateRecord] = []
    termination = Termination.MAX_ITER
    u = x0
    x = x_start
    for k in range(1, max_iter + 1):
        arnoldi_step(op, state, config.reorthogonalize)
        hsub = float(state._h[k, k - 1])
        hess = state.hess
        if not np.all(np.isfinite(hess[:, k - 1])):
            raise FloatingPointError(f"non-finite value in GMRES recurrence at iteration {k}")
        smax = smin = math.nan
        if givens is not None:
            givens.add_column(hess[: k + 1, k - 1])
            try:
                y = givens.solve()
                rank, tol = k, 0.0
            except RankDeficientHessenbergError:
                sol = _pinv_solve(hess, beta, PinvPolicy.default())
                y, rank, tol, smax, smin = sol
                notes.append(f"iteration {k}: Givens pivot vanished, used minimum-norm solve")
            if config.record_hessenberg_spectrum and math.isnan(smax):
                s = np.linalg.svd(hess, compute_uv=False)
                smax, smin = float(s[0]), float(s[-1])
        else:
            y, rank, tol, smax, smin = _pinv_solve(hess, beta, config.strategy.pinv)
        u = x0 + state._v[:, :k] @ y
        x = to_solution(u)
        rel, at = metrics(x)
        if not (np.all(np.isfinite(u)) and math.isfinite(rel) and math.isfinite(hsub)):
            raise FloatingPointError(f"non-finite value in GMRES recurrence at iteration {k}")
        records.append(IterateRecord(k, rel, at, hsub, smax, smin, int(rank), float(tol)))
        if stop(rel, at):
            termination = Termination.CONVERGED
            break
        if hsub <= h_floor:
            termination = Termination.BREAKDOWN
            notes.append(f"breakdown at iteration {k}: h = {hsub:.3e} <= {h_floor:.3e}")
            break
    return ConvergenceHistory(records, termination, x, u, rel0, at0, notes, state)
