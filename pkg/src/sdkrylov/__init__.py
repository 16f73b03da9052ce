"""Self-dual symmetrization solvers for non-symmetric sparse linear systems."""
from .errors import (DimensionMismatch, Diverged, InnerSolveFailed, InvalidParameter, NoConvergence,
                     NonSquare, NotPositiveDefinite, SdKrylovError, Singular)
from .krylov import (LinearOperator, Method, ResidualReference, SolveConfig, SolveReport, Status,
                     baseline_solve, cg, minres, stationary_iteration)
from .linalg import SparseMatrix, SymmetricSplit, dense_solve_oracle, factor_spd, split
from .selfdual import (PreconditionerSpec, build_selfdual_system, esd_cgn, functional, general_split_system,
                       isd_cgn, iterated_cg, iterated_system, sd_cgn, sd_minresn)

__version__ = "0.1.0"
__all__ = [
    "SparseMatrix", "SymmetricSplit", "split", "factor_spd", "dense_solve_oracle",
    "LinearOperator", "SolveConfig", "SolveReport", "Status", "ResidualReference", "Method",
    "cg", "minres", "baseline_solve", "stationary_iteration",
    "PreconditionerSpec", "build_selfdual_system", "esd_cgn", "isd_cgn", "sd_cgn", "sd_minresn",
    "iterated_system", "iterated_cg", "functional", "general_split_system",
    "SdKrylovError", "NonSquare", "DimensionMismatch", "InvalidParameter", "Singular",
    "NotPositiveDefinite", "NoConvergence", "InnerSolveFailed", "Diverged",
]
