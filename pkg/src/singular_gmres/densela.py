"""Dense linear-algebra kernels.

Matrices and vectors are plain ``numpy.ndarray`` objects of dtype float64.
Matrices are stored column-major (Fortran order) so that fixtures written
from them are byte-comparable across runs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "SvdConvergenceError",
    "SvdResult",
    "PinvKind",
    "PinvPolicy",
    "PinvResult",
    "as_matrix",
    "as_vector",
    "svd",
    "pinv_truncated",
    "ulp",
    "rank_with_tol",
    "default_rank_tol",
    "orthonormality_defect",
]


class SvdConvergenceError(ArithmeticError):
    """The SVD kernel did not converge."""

    def __init__(self, rows: int, cols: int):
        super().__init__(f"SVD did not converge for a {rows}x{cols} matrix")
        self.rows = rows
        self.cols = cols


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return `a` as a finite, column-major float64 2-D array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return np.asfortranarray(arr)


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Return `v` as a finite float64 1-D array."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr.copy()


@dataclass(frozen=True)
class SvdResult:
    """Full singular value decomposition ``B = u @ diag(sigma) @ v.T``.

    ``u`` is m x m, ``v`` is n x n (note: ``v``, not ``v.T``), and ``sigma``
    holds the min(m, n) singular values in nonincreasing order.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        m, n = self.u.shape[0], self.v.shape[0]
        k = self.sigma.size
        return (self.u[:, :k] * self.sigma) @ self.v[:, :k].T if k else np.zeros((m, n))


def svd(b) -> SvdResult:
    """Full SVD of a dense matrix (LAPACK divide and conquer).

    Raises
    ------
    SvdConvergenceError
        If the LAPACK driver fails to converge.
    """
    b = as_matrix(b)
    m, n = b.shape
    if m == 0 or n == 0:
        return SvdResult(np.eye(m), np.zeros(0), np.eye(n))
    try:
        u, s, vt = np.linalg.svd(b, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(m, n) from exc
    # gesdd returns nonnegative, sorted values; clip guards against -0.0
    s = np.maximum(s, 0.0)
    return SvdResult(np.asfortranarray(u), s, np.asfortranarray(vt.T))


def ulp(x: float) -> float:
    """Distance from ``|x|`` to the next larger double.

    ``ulp(0.0)`` is the smallest positive subnormal.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"ulp is undefined for {x!r}")
    x = abs(x)
    return math.nextafter(x, math.inf) - x


def default_rank_tol(sigma1: float, m: int, n: int) -> float:
    """Numerical-rank tolerance ``max(m, n) * ulp(sigma1)``."""
    return max(m, n) * ulp(sigma1)


class PinvKind(enum.Enum):
    DEFAULT_NUMERICAL_RANK = "default"
    RELATIVE_TO_SIGMA1 = "relative"
    ABSOLUTE = "absolute"
    NO_TRUNCATION = "none"


@dataclass(frozen=True)
class PinvPolicy:
    """How small singular values are discarded by :func:`pinv_truncated`.

    Build with the class methods rather than the constructor::

        PinvPolicy.relative(1e-8)   # tol = 1e-8 * sigma_1
        PinvPolicy.absolute(1e-12)
        PinvPolicy.default()        # tol = max(m, n) * ulp(sigma_1)
        PinvPolicy.none()           # keep every sigma > 0
    """

    kind: PinvKind
    value: float = 0.0

    def __post_init__(self):
        if self.kind is PinvKind.RELATIVE_TO_SIGMA1 and not 0.0 < self.value < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.value}")
        if self.kind is PinvKind.ABSOLUTE and not self.value >= 0.0:
            raise ValueError(f"absolute tolerance must be >= 0, got {self.value}")

    @classmethod
    def default(cls) -> "PinvPolicy":
        return cls(PinvKind.DEFAULT_NUMERICAL_RANK)

    @classmethod
    def relative(cls, alpha: float) -> "PinvPolicy":
        return cls(PinvKind.RELATIVE_TO_SIGMA1, float(alpha))

    @classmethod
    def absolute(cls, tol: float) -> "PinvPolicy":
        return cls(PinvKind.ABSOLUTE, float(tol))

    @classmethod
    def none(cls) -> "PinvPolicy":
        return cls(PinvKind.NO_TRUNCATION)

    def resolve(self, sigma1: float, m: int, n: int) -> float:
        """Absolute tolerance this policy yields for a matrix with top value `sigma1`."""
        if self.kind is PinvKind.DEFAULT_NUMERICAL_RANK:
            return default_rank_tol(sigma1, m, n)
        if self.kind is PinvKind.RELATIVE_TO_SIGMA1:
            return self.value * sigma1
        if self.kind is PinvKind.ABSOLUTE:
            return self.value
        return 0.0

    def __str__(self) -> str:
        if self.kind in (PinvKind.RELATIVE_TO_SIGMA1, PinvKind.ABSOLUTE):
            return f"{self.kind.value}:{self.value:g}"
        return self.kind.value


class PinvResult(NamedTuple):
    pinv: np.ndarray
    rank_used: int
    tol_used: float


def _kept(sigma: np.ndarray, tol: float) -> int:
    # values equal to tol are kept; exact zeros never are
    return int(np.count_nonzero((sigma >= tol) & (sigma > 0.0)))


def pinv_truncated(b, policy: PinvPolicy | None = None, *, factors: SvdResult | None = None) -> PinvResult:
    """Pseudoinverse of `b` after zeroing singular values below a tolerance.

    Singular values strictly smaller than the resolved tolerance are
    replaced by zero; the result is ``V1 @ diag(1/sigma1) @ U1.T`` over the
    kept triplets.

    Parameters
    ----------
    b : array_like, shape (m, n)
    policy : PinvPolicy, optional
        Defaults to :meth:`PinvPolicy.default`.
    factors : SvdResult, optional
        Precomputed SVD of `b`, to avoid factoring twice.

    Returns
    -------
    PinvResult
        ``(pinv, rank_used, tol_used)`` with ``pinv`` of shape (n, m).
    """
    b = as_matrix(b)
    m, n = b.shape
    policy = policy or PinvPolicy.default()
    f = factors if factors is not None else svd(b)
    sigma1 = float(f.sigma[0]) if f.sigma.size else 0.0
    tol = policy.resolve(sigma1, m, n)
    r = _kept(f.sigma, tol)
    if r == 0:
        return PinvResult(np.zeros((n, m), order="F"), 0, tol)
    p = (f.v[:, :r] / f.sigma[:r]) @ f.u[:, :r].T
    return PinvResult(np.asfortranarray(p), r, tol)


def rank_with_tol(b, tol: float) -> int:
    """Number of singular values strictly greater than `tol`."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    b = as_matrix(b)
    if b.size == 0:
        return 0
    try:
        s = np.linalg.svd(b, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(*b.shape) from exc
    return int(np.count_nonzero(s > tol))


def orthonormality_defect(v) -> float:
    """Frobenius norm of ``V.T @ V - I``."""
    v = as_matrix(v)
    if v.shape[1] < 1:
        raise ValueError("need at least one column")
    g = v.T @ v
    g[np.diag_indices_from(g)] -= 1.0
    return float(np.linalg.norm(g))
