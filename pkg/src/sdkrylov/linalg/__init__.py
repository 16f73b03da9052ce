"""Sparse/dense linear-algebra substrate."""
from .cholesky import SpdFactorization, factor_spd, solve_with_factor
from .dense import DenseLU, dense_solve_oracle
from .mmio import read_matrix_market, read_vector, write_matrix_market, write_vector
from .sparse import SparseMatrix, SymmetricSplit, matvec, split

__all__ = [
    "SparseMatrix", "SymmetricSplit", "split", "matvec",
    "SpdFactorization", "factor_spd", "solve_with_factor",
    "DenseLU", "dense_solve_oracle",
    "read_matrix_market", "write_matrix_market", "read_vector", "write_vector",
]
