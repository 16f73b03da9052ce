"""Sparse Cholesky factorization of symmetric positive definite matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DimensionMismatch, InvalidParameter, NotPositiveDefinite
from .ordering import minimum_degree, natural
from .sparse import SparseMatrix

PIVOT_FLOOR_RATIO = 1e-14
DENSE_CUTOFF = 64


@dataclass(frozen=True, eq=False)
class SpdFactorization:
    """``P M P^T = L L^T``.

    ``perm[k]`` is the original index eliminated at step ``k``.  Sparse
    factors are stored by column (``colptr``/``rowind``/``lvalues``, diagonal
    first); small systems keep a dense lower-triangular ``dense_l`` instead.
    """

    n: int
    perm: np.ndarray
    colptr: np.ndarray | None = None
    rowind: np.ndarray | None = None
    lvalues: np.ndarray | None = None
    dense_l: np.ndarray | None = None

    @property
    def nnz_l(self):
        if self.dense_l is not None:
            return self.n * (self.n + 1) // 2
        return int(self.colptr[-1])

    def _check(self, rhs):
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape != (self.n,):
            raise DimensionMismatch(f"expected vector of length {self.n}, got {rhs.shape}")
        return rhs

    def _lower(self, v):
        if self.dense_l is not None:
            return kernels.dense_lsolve(self.dense_l, v)
        return kernels.lsolve(self.colptr, self.rowind, self.lvalues, v)

    def _upper(self, v):
        if self.dense_l is not None:
            return kernels.dense_ltsolve(self.dense_l, v)
        return kernels.ltsolve(self.colptr, self.rowind, self.lvalues, v)

    def solve(self, rhs):
        rhs = self._check(rhs)
        z = self._upper(self._lower(rhs[self.perm]))
        out = np.empty(self.n)
        out[self.perm] = z
        return out

    def half_solve(self, v):
        """``L^{-1} P v`` (left half of a split preconditioner)."""
        return self._lower(self._check(v)[self.perm])

    def half_solve_transpose(self, v):
        """``P^T L^{-T} v``; ``half_solve_transpose(half_solve(b)) == solve(b)``."""
        z = self._upper(self._check(v))
        out = np.empty(self.n)
        out[self.perm] = z
        return out


def factor_spd(m: SparseMatrix, ordering="mindeg", dense_cutoff=DENSE_CUTOFF) -> SpdFactorization:
    """Cholesky-factor a symmetric matrix.

    Succeeds iff every pivot exceeds ``1e-14 * max(diag(m))``; otherwise raises
    :class:`NotPositiveDefinite` with the failing row in original numbering.
    ``ordering`` is ``"mindeg"`` (default) or ``"natural"``.
    """
    if not m.is_square:
        raise InvalidParameter("factor_spd needs a square matrix")
    if not m.is_symmetric():
        raise InvalidParameter("factor_spd needs an exactly symmetric matrix")
    n = m.n_rows
    diag = m.diagonal()
    floor = PIVOT_FLOOR_RATIO * max(float(diag.max()) if n else 0.0, 0.0)

    if n <= dense_cutoff:
        L, fail = kernels.dense_cholesky(m.to_dense(), floor)
        if fail >= 0:
            raise NotPositiveDefinite(fail)
        return SpdFactorization(n, np.arange(n, dtype=np.int64), dense_l=L)

    if ordering == "mindeg":
        perm = minimum_degree(m)
    elif ordering == "natural":
        perm = natural(m)
    else:
        raise InvalidParameter(f"unknown ordering {ordering!r}")
    pinv = np.empty(n, dtype=np.int64)
    pinv[perm] = np.arange(n)
    rows, cols, vals = m.to_coo()
    c = SparseMatrix.from_coo(pinv[rows], pinv[cols], vals, m.shape, drop_zeros=False)
    parent, colptr = kernels.chol_symbolic(c.row_offsets, c.col_indices, n)
    rowind, lvalues, fail = kernels.chol_numeric(
        c.row_offsets, c.col_indices, c.values, n, parent, colptr, floor)
    if fail >= 0:
        raise NotPositiveDefinite(int(perm[fail]))
    return SpdFactorization(n, perm, colptr, rowind, lvalues)


def solve_with_factor(f: SpdFactorization, rhs):
    return f.solve(rhs)
