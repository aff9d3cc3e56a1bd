"""Test matrices and right-hand sides for singular systems.

Two 128 x 128 families are provided:

* the GP (index 1, not range-symmetric) matrix ``[[A11, A12], [0, 0]]``;
* the index-2 matrix ``[[A11, A12], [0, A22]]`` with a nilpotent ``A22``.

``A11 = blkdiag(W, D)`` where ``W`` stacks sixteen 2 x 2 Jordan blocks
``J2(alpha_j)`` and ``D = diag(beta_1, ..., beta_32)``.  ``A12`` holds the
Jordan blocks ``J2(beta_1), ..., J2(beta_16)`` (32 x 32 in total) in the
top-left corner of an otherwise zero 64 x 64 block.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .densela import as_matrix

__all__ = [
    "N",
    "GpParams",
    "RhsKind",
    "RhsMode",
    "Family",
    "ProblemInstance",
    "jordan_block",
    "alpha_sequence",
    "beta_sequence",
    "gen_gp_matrix",
    "gen_index2_matrix",
    "seeded_uniform",
    "gen_rhs",
    "make_problem",
    "A12_LAYOUT_NOTE",
]

N = 128

A12_LAYOUT_NOTE = (
    "A12 = blkdiag(J2(beta_1..beta_16)) placed in the top-left 32x32 corner "
    "of a 64x64 zero block"
)


@dataclass(frozen=True)
class GpParams:
    """Decay exponents: ``alpha_16 = 10**-rho`` and ``beta_32 = 10**-gamma``."""

    rho: float = 12.0
    gamma: float = 12.0

    def __post_init__(self):
        if not (self.rho > 0 and self.gamma > 0):
            raise ValueError("rho and gamma must be positive")


class RhsKind(enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class RhsMode:
    kind: RhsKind = RhsKind.CONSISTENT
    noise_scale: float = 0.0
    seed: int = 1

    def __post_init__(self):
        if self.kind is RhsKind.INCONSISTENT and not self.noise_scale > 0:
            raise ValueError("inconsistent mode needs noise_scale > 0")

    @classmethod
    def consistent(cls) -> "RhsMode":
        return cls(RhsKind.CONSISTENT)

    @classmethod
    def inconsistent(cls, noise_scale: float = 0.01, seed: int = 1) -> "RhsMode":
        return cls(RhsKind.INCONSISTENT, float(noise_scale), int(seed))


class Family(enum.Enum):
    GP = "gp"
    INDEX2 = "index2"
    CUSTOM = "custom"


@dataclass
class ProblemInstance:
    a: np.ndarray
    b: np.ndarray
    family: Family
    params: Optional[GpParams]
    rhs_mode: RhsMode
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.a.ndim != 2 or self.a.shape[0] != self.a.shape[1]:
            raise ValueError("A must be square")
        if self.b.shape != (self.a.shape[0],):
            raise ValueError("b length must match A")


def jordan_block(k: int, lam: float) -> np.ndarray:
    """k x k Jordan block with `lam` on the diagonal and ones above it."""
    if k < 1:
        raise ValueError("k must be >= 1")
    j = np.diag(np.full(k, float(lam))) + np.diag(np.ones(k - 1), 1)
    return np.asfortranarray(j)


def alpha_sequence(rho: float) -> np.ndarray:
    """``alpha_j = alpha_16 + (16-j)/15 (alpha_1 - alpha_16) 0.7**(j-1)``, j = 1..16."""
    a16 = 10.0 ** (-rho)
    j = np.arange(1, 17)
    return a16 + (16 - j) / 15 * (1.0 - a16) * 0.7 ** (j - 1)


def beta_sequence(gamma: float) -> np.ndarray:
    """``beta_i = beta_32 + (32-i)/31 (beta_1 - beta_32) 0.2**(i-1)``, i = 1..32."""
    b32 = 10.0 ** (-gamma)
    i = np.arange(1, 33)
    return b32 + (32 - i) / 31 * (1.0 - b32) * 0.2 ** (i - 1)


def _upper_blocks(params: GpParams) -> np.ndarray:
    al = alpha_sequence(params.rho)
    be = beta_sequence(params.gamma)
    a = np.zeros((N, N), order="F")
    for j in range(16):
        a[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = jordan_block(2, al[j])
    a[np.arange(32, 64), np.arange(32, 64)] = be
    for j in range(16):
        a[2 * j : 2 * j + 2, 64 + 2 * j : 64 + 2 * j + 2] = jordan_block(2, be[j])
    return a


def gen_gp_matrix(params: GpParams | None = None) -> np.ndarray:
    """The 128 x 128 GP test matrix ``[[A11, A12], [0, 0]]``."""
    return _upper_blocks(params or GpParams(12, 12))


def gen_index2_matrix(params: GpParams | None = None) -> np.ndarray:
    """The 128 x 128 index-2 test matrix ``[[A11, A12], [0, A22]]``.

    ``A22`` has ones at the 1-based global positions ``(2i+63, 2i+64)``,
    i = 1..16, so ``A22 @ A22 = 0``.
    """
    a = _upper_blocks(params or GpParams(12, 15))
    i = np.arange(1, 17)
    a[2 * i + 63 - 1, 2 * i + 64 - 1] = 1.0
    return a


def seeded_uniform(n: int, seed: int) -> np.ndarray:
    """`n` reproducible samples strictly inside (0, 1).

    Draws 53-bit integers ``k`` from numpy's PCG64 bit generator seeded
    with `seed` and returns ``(k + 0.5) / 2**53``.  The open interval is
    guaranteed and the stream is identical on every platform.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    k = rng.integers(0, 2**53, size=n, dtype=np.int64)
    return (k.astype(np.float64) + 0.5) / 2.0**53


def gen_rhs(a, mode: RhsMode | None = None) -> np.ndarray:
    """``b = A e / ||A e||`` plus, if inconsistent, ``noise * u / ||u||``.

    ``e`` is the all-ones vector and ``u`` comes from :func:`seeded_uniform`.
    """
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise ValueError("A must be square")
    mode = mode or RhsMode.consistent()
    ae = a @ np.ones(a.shape[1])
    nrm = np.linalg.norm(ae)
    if nrm == 0.0:
        raise ValueError("A e = 0; cannot normalise the right-hand side")
    b = ae / nrm
    if mode.kind is RhsKind.INCONSISTENT:
        u = seeded_uniform(a.shape[0], mode.seed)
        b = b + mode.noise_scale * (u / np.linalg.norm(u))
    return b


def make_problem(family: Family | str, params: GpParams | None = None, rhs: RhsMode | None = None) -> ProblemInstance:
    """Generate a full problem instance with the family's default parameters."""
    family = Family(family)
    if family is Family.GP:
        params = params or GpParams(12, 12)
        a = gen_gp_matrix(params)
    elif family is Family.INDEX2:
        params = params or GpParams(12, 15)
        a = gen_index2_matrix(params)
    else:
        raise ValueError("custom problems are built directly with ProblemInstance")
    rhs = rhs or RhsMode.consistent()
    return ProblemInstance(a, gen_rhs(a, rhs), family, params, rhs, {"a12_layout": A12_LAYOUT_NOTE})
