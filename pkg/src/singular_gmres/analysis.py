"""Ground-truth oracles and matrix classifiers.

Tolerances default to ``n * ulp(sigma_1(A))``, the numerical-rank cutoff
used throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .densela import (
    PinvPolicy,
    as_matrix,
    as_vector,
    default_rank_tol,
    pinv_truncated,
    rank_with_tol,
    svd,
    ulp,
)

__all__ = [
    "MatrixClassification",
    "BoundInputs",
    "ResidualMetrics",
    "default_tol",
    "min_norm_lsq",
    "matrix_index",
    "range_projector",
    "range_symmetry_defect",
    "is_range_symmetric",
    "residual_metrics",
    "theorem_bound",
    "bound_inputs",
    "classify",
]


def default_tol(a) -> float:
    """``max(m, n) * ulp(sigma_1(A))``."""
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    s1 = float(np.linalg.norm(a, 2))
    return default_rank_tol(s1, *a.shape)


def min_norm_lsq(a, b, tol: Optional[float] = None) -> np.ndarray:
    """Minimum-norm least-squares solution ``x = pinv(A) b``.

    Singular values below `tol` (default :func:`default_tol`) are treated
    as zero.
    """
    a = as_matrix(a, "A")
    b = as_vector(b, "b")
    if b.size != a.shape[0]:
        raise ValueError("dimension mismatch between A and b")
    policy = PinvPolicy.default() if tol is None else PinvPolicy.absolute(tol)
    return pinv_truncated(a, policy).pinv @ b


def _index_by_powers(a: np.ndarray, tol: float) -> int:
    n = a.shape[0]
    prev, p = n, np.eye(n)
    for i in range(n + 1):
        p = p @ a
        cur = rank_with_tol(p, tol)
        if cur == prev:
            return i
        prev = cur
    return n


def matrix_index(a, tol: Optional[float] = None, method: str = "deflation") -> int:
    """Smallest ``i >= 0`` with ``rank(A**i) == rank(A**(i+1))``.

    method="deflation" (default)
        Uses ``rank(A**(k+1)) = rank(A_k)`` where ``A_0 = A`` and
        ``A_{k+1} = U1.T A_k U1 = Sigma1 (V1.T U1)`` from the rank-truncated
        SVD of ``A_k``.  Since ``Sigma1`` is nonsingular, each rank is read
        off the orthonormal-scale matrix ``V1.T U1`` (cutoff ``r * ulp(1)``)
        and never from a product of tiny singular values.  Only the first
        rank, that of ``A`` itself, uses `tol`.
    method="powers"
        Forms ``A**i`` explicitly and measures each rank with `tol`.  This
        is the textbook definition but loses all accuracy once ``kappa(A)**i``
        exceeds ``1/eps``.
    """
    a = as_matrix(a, "A")
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("A must be square")
    if n == 0:
        return 0
    tol = default_tol(a) if tol is None else tol
    if method == "powers":
        return _index_by_powers(a, tol)
    if method != "deflation":
        raise ValueError(f"unknown method {method!r}")

    m = a
    rank = rank_with_tol(a, tol)
    k = 0
    while True:
        size = m.shape[0]
        if rank == size:
            return k
        if rank == 0:
            return k + 1
        f = svd(m)
        w = f.v[:, :rank].T @ f.u[:, :rank]
        rank_next = rank_with_tol(w, rank * ulp(1.0))
        m = f.sigma[:rank, None] * w
        rank = rank_next
        k += 1


def range_projector(a, tol: Optional[float] = None) -> np.ndarray:
    """Orthogonal projector onto the numerical range of `a`."""
    a = as_matrix(a, "A")
    tol = default_tol(a) if tol is None else tol
    f = svd(a)
    r = int(np.count_nonzero(f.sigma > tol))
    u1 = f.u[:, :r]
    return u1 @ u1.T


class SymmetryDefect(NamedTuple):
    null_leak: float
    projector_gap: float
    threshold: float


def range_symmetry_defect(a, tol: Optional[float] = None) -> SymmetryDefect:
    """How far ``R(A)`` is from ``R(A.T)``.

    ``null_leak = ||A U2||_F`` where ``U2`` spans the numerical null space
    of ``A.T``; it vanishes exactly when ``N(A.T) = N(A)``.  It scales like
    the discarded singular values, so it is compared against
    ``threshold = sqrt(n) * tol``.  ``projector_gap = ||P1 - P2||_F`` with
    ``P1 = U1 U1.T`` and ``P2 = V1 V1.T`` is the same question in subspace
    terms, kept as a diagnostic because it is sensitive to clusters of
    singular values near `tol`.
    """
    a = as_matrix(a, "A")
    n = a.shape[0]
    tol = default_tol(a) if tol is None else tol
    f = svd(a)
    r = int(np.count_nonzero(f.sigma > tol))
    u1, u2, v1 = f.u[:, :r], f.u[:, r:], f.v[:, :r]
    leak = float(np.linalg.norm(a @ u2)) if u2.size else 0.0
    gap = float(np.linalg.norm(u1 @ u1.T - v1 @ v1.T))
    return SymmetryDefect(leak, gap, math.sqrt(n) * max(tol, ulp(0.0)))


def is_range_symmetric(a, tol: Optional[float] = None) -> bool:
    """True when ``R(A) = R(A.T)`` numerically (A is EP)."""
    d = range_symmetry_defect(a, tol)
    return d.null_leak <= d.threshold


class ResidualMetrics(NamedTuple):
    rel_res: float
    at_rel_res: float
    b_zero: bool
    atb_zero: bool


def residual_metrics(a, b, x) -> ResidualMetrics:
    """``(||b - A x|| / ||b||, ||A.T (b - A x)|| / ||A.T b||)``.

    A vanishing denominator gives a ratio of 0 and sets the matching flag.
    """
    a = as_matrix(a, "A")
    b = as_vector(b, "b")
    x = as_vector(x, "x")
    r = b - a @ x
    nb = float(np.linalg.norm(b))
    atb = float(np.linalg.norm(a.T @ b))
    rel = float(np.linalg.norm(r)) / nb if nb > 0 else 0.0
    at = float(np.linalg.norm(a.T @ r)) / atb if atb > 0 else 0.0
    return ResidualMetrics(rel, at, nb == 0.0, atb == 0.0)


@dataclass(frozen=True)
class BoundInputs:
    """Spectral data for the AB-GMRES convergence bounds.

    ``sigma1`` and ``sigma_r`` are the extreme nonzero singular values of
    ``A C**(1/2)``; ``kappa_a`` is ``sigma_1(A) / sigma_r(A)`` of A itself.
    """

    sigma1: float
    sigma_r: float
    kappa_a: float = 1.0
    at_r0_norm: float = 1.0
    r0_range_norm: float = 1.0

    def __post_init__(self):
        if not self.sigma_r > 0:
            raise ValueError("sigma_r must be positive")
        if self.sigma1 < self.sigma_r:
            raise ValueError("sigma1 must be >= sigma_r")

    @property
    def rate(self) -> float:
        return (self.sigma1 - self.sigma_r) / (self.sigma1 + self.sigma_r)


def theorem_bound(inputs: BoundInputs, k: int) -> tuple[float, float]:
    """Upper bounds after `k` AB-GMRES steps.

    Returns ``(res_bound, atr_bound)``::

        ||r_k restricted to R(A)|| <= 2 q**k ||r_0 restricted to R(A)||
        ||A.T r_k||              <= 2 kappa(A) q**k ||A.T r_0||

    with ``q = (sigma1 - sigma_r) / (sigma1 + sigma_r)``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    qk = inputs.rate**k
    return 2.0 * qk * inputs.r0_range_norm, 2.0 * inputs.kappa_a * qk * inputs.at_r0_norm


def bound_inputs(a, c_diag, b, x0=None, tol: Optional[float] = None) -> BoundInputs:
    """Compute :class:`BoundInputs` for ``B = diag(c) A.T`` from SVDs.

    The two spectra stay separate: the rate uses ``A C**(1/2)`` and the
    amplification factor uses ``A``.
    """
    a = as_matrix(a, "A")
    b = as_vector(b, "b")
    c = as_vector(c_diag, "c_diag")
    x0 = np.zeros(a.shape[1]) if x0 is None else as_vector(x0, "x0")
    s_ac = np.linalg.svd(a * np.sqrt(c), compute_uv=False)
    s_a = np.linalg.svd(a, compute_uv=False)
    n = a.shape[0]
    tol_ac = default_rank_tol(s_ac[0], n, n) if tol is None else tol
    tol_a = default_rank_tol(s_a[0], n, n) if tol is None else tol
    s_ac = s_ac[s_ac > tol_ac]
    s_a = s_a[s_a > tol_a]
    r0 = b - a @ x0
    p = range_projector(a, tol_a)
    return BoundInputs(
        sigma1=float(s_ac[0]),
        sigma_r=float(s_ac[-1]),
        kappa_a=float(s_a[0] / s_a[-1]),
        at_r0_norm=float(np.linalg.norm(a.T @ r0)),
        r0_range_norm=float(np.linalg.norm(p @ r0)),
    )


@dataclass(frozen=True)
class MatrixClassification:
    index: int
    is_ep: bool
    rank: int
    sigma_max: float
    sigma_min_pos: float
    kappa: float

    def report(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.__dict__.items())


def classify(a, tol: Optional[float] = None) -> MatrixClassification:
    """Index, range symmetry, numerical rank and conditioning of `a`."""
    a = as_matrix(a, "A")
    tol = default_tol(a) if tol is None else tol
    s = np.linalg.svd(a, compute_uv=False)
    kept = s[s > tol]
    rank = int(kept.size)
    smax = float(s[0]) if s.size else 0.0
    smin = float(kept[-1]) if rank else 0.0
    kappa = smax / smin if rank else 1.0
    return MatrixClassification(
        index=matrix_index(a, tol),
        is_ep=is_range_symmetric(a, tol),
        rank=rank,
        sigma_max=smax,
        sigma_min_pos=smin,
        kappa=kappa,
    )
