"""Right (AB) and left (BA) preconditioned GMRES for singular systems.

With ``B = A.T`` or ``B = C A.T`` (C symmetric positive definite) the
product ``A B`` is range-symmetric and has the same range as ``A``, so
GMRES on ``min_z ||b - A B z||`` returns a least-squares solution
``x = B z`` of ``A x = b`` for any square ``A`` and any ``b``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .densela import as_matrix, as_vector
from .krylov import ConvergenceHistory, SolveConfig, gmres

__all__ = [
    "PrecondKind",
    "Precond",
    "MethodKind",
    "build_jacobi_spd",
    "right_preconditioner",
    "original_metrics",
    "ab_gmres",
    "ba_gmres",
    "solve",
]


class PrecondKind(enum.Enum):
    NONE = "none"
    AT = "at"
    CAT = "cat"


@dataclass(frozen=True)
class Precond:
    """Choice of B: none, ``A.T`` or ``diag(c) @ A.T``."""

    kind: PrecondKind
    c_diag: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind is PrecondKind.CAT:
            if self.c_diag is None:
                raise ValueError("B = C A^T needs the diagonal of C")
            c = as_vector(self.c_diag, "c_diag")
            if np.any(c <= 0):
                raise ValueError("C must be positive definite (all c_diag > 0)")
            object.__setattr__(self, "c_diag", c)

    @classmethod
    def none(cls) -> "Precond":
        return cls(PrecondKind.NONE)

    @classmethod
    def at(cls) -> "Precond":
        return cls(PrecondKind.AT)

    @classmethod
    def cat(cls, c_diag) -> "Precond":
        return cls(PrecondKind.CAT, c_diag)

    @classmethod
    def jacobi(cls, a) -> "Precond":
        """``B = C A.T`` with ``C = diag(A.T A)^-1``."""
        return cls(PrecondKind.CAT, build_jacobi_spd(a))


class MethodKind(enum.Enum):
    GMRES = "gmres"
    AB_GMRES = "ab-gmres"
    BA_GMRES = "ba-gmres"


def build_jacobi_spd(a) -> np.ndarray:
    """Diagonal of ``C = diag(A.T A)^-1``; zero columns get ``c_j = 1``."""
    a = as_matrix(a, "A")
    colsq = np.einsum("ij,ij->j", a, a)
    c = np.ones_like(colsq)
    nz = colsq > 0
    c[nz] = 1.0 / colsq[nz]
    return c


def right_preconditioner(a: np.ndarray, precond: Precond) -> LinearOperator:
    """The operator ``z -> B z``."""
    n = a.shape[1]
    if precond.kind is PrecondKind.AT:
        return LinearOperator((n, n), matvec=lambda z: a.T @ z, rmatvec=lambda x: a @ x, dtype=np.float64)
    if precond.kind is PrecondKind.CAT:
        c = precond.c_diag
        if c.size != n:
            raise ValueError(f"c_diag has length {c.size}, expected {n}")
        return LinearOperator(
            (n, n), matvec=lambda z: c * (a.T @ z), rmatvec=lambda x: a @ (c * x), dtype=np.float64
        )
    raise ValueError("right preconditioning needs B = A^T or B = C A^T")


def original_metrics(a: np.ndarray, b: np.ndarray, notes: list[str] | None = None):
    """``x -> (||b - A x|| / ||b||, ||A^T (b - A x)|| / ||A^T b||)``.

    A zero denominator makes the corresponding ratio 0; a note is appended
    to `notes` when that guard is active.
    """
    nb = float(np.linalg.norm(b))
    atb = float(np.linalg.norm(a.T @ b))
    if notes is not None and atb == 0.0:
        notes.append("||A^T b|| = 0; at_rel_res reported as 0")

    def metrics(x):
        r = b - a @ x
        rel = float(np.linalg.norm(r)) / nb if nb > 0 else 0.0
        at = float(np.linalg.norm(a.T @ r)) / atb if atb > 0 else 0.0
        return rel, at

    return metrics


def ab_gmres(a, precond: Precond, b, z0=None, config: SolveConfig | None = None) -> ConvergenceHistory:
    """GMRES on ``A B z = b`` returning ``x = B z``.

    B is applied as ``A.T`` followed by an optional diagonal scaling; the
    product ``A B`` is never formed.  Metrics refer to the original residual
    ``b - A x``.  `z0` defaults to zero, hence ``x0 = 0``.
    """
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"A must be square, got {a.shape}")
    b = as_vector(b, "b")
    if precond.kind is PrecondKind.NONE:
        raise ValueError("ab_gmres needs a preconditioner; use gmres for B = I")
    bop = right_preconditioner(a, precond)
    n = a.shape[0]
    ab = LinearOperator(
        (n, n),
        matvec=lambda z: a @ bop.matvec(z),
        rmatvec=lambda w: bop.rmatvec(a.T @ w),
        dtype=np.float64,
    )
    notes: list[str] = []
    hist = gmres(
        ab,
        b,
        z0,
        config,
        to_solution=bop.matvec,
        metrics=original_metrics(a, b, notes),
        op_scale=float(np.linalg.norm(a)),
    )
    hist.notes[:0] = notes
    return hist


def ba_gmres(a, b, x0=None, config: SolveConfig | None = None, c_diag=None) -> ConvergenceHistory:
    """GMRES on ``B A x = B b`` with ``B = A.T`` or ``B = diag(c_diag) A.T``.

    Metrics refer to the original residual ``b - A x``.
    """
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"A must be square, got {a.shape}")
    b = as_vector(b, "b")
    n = a.shape[0]
    if c_diag is None:
        c = np.ones(n)
    else:
        c = Precond.cat(c_diag).c_diag
        if c.size != n:
            raise ValueError(f"c_diag has length {c.size}, expected {n}")
    ba = LinearOperator(
        (n, n), matvec=lambda x: c * (a.T @ (a @ x)), rmatvec=lambda w: a.T @ (a @ (c * w)), dtype=np.float64
    )
    notes: list[str] = []
    hist = gmres(
        ba,
        c * (a.T @ b),
        x0,
        config,
        metrics=original_metrics(a, b, notes),
        op_scale=float(np.linalg.norm(a)),
    )
    hist.notes[:0] = notes
    return hist


def solve(
    a,
    b,
    method: MethodKind | str = MethodKind.AB_GMRES,
    precond: Precond | None = None,
    config: SolveConfig | None = None,
) -> ConvergenceHistory:
    """Dispatch to :func:`gmres`, :func:`ab_gmres` or :func:`ba_gmres`.

    For AB-GMRES the preconditioner defaults to the Jacobi choice
    ``B = diag(A.T A)^-1 A.T``.
    """
    method = MethodKind(method)
    a = as_matrix(a, "A")
    b = as_vector(b, "b")
    if method is MethodKind.GMRES:
        notes: list[str] = []
        hist = gmres(a, b, None, config, metrics=original_metrics(a, b, notes))
        hist.notes[:0] = notes
        return hist
    if method is MethodKind.BA_GMRES:
        return ba_gmres(a, b, None, config)
    return ab_gmres(a, precond or Precond.jacobi(a), b, None, config)
