"""GMRES variants for square singular and inconsistent linear systems."""

from .analysis import (
    BoundInputs,
    MatrixClassification,
    bound_inputs,
    classify,
    is_range_symmetric,
    matrix_index,
    min_norm_lsq,
    residual_metrics,
    theorem_bound,
)
from .densela import PinvPolicy, SvdResult, pinv_truncated, rank_with_tol, svd, ulp
from .krylov import (
    ConvergenceHistory,
    HessSolveStrategy,
    SolveConfig,
    StopMetric,
    Termination,
    arnoldi_step,
    gmres,
    solve_hessenberg_givens,
    solve_hessenberg_pinv,
)
from .precond import MethodKind, Precond, PrecondKind, ab_gmres, ba_gmres, build_jacobi_spd, solve
from .problems import GpParams, RhsMode, gen_gp_matrix, gen_index2_matrix, gen_rhs, make_problem

__version__ = "0.1.0"
