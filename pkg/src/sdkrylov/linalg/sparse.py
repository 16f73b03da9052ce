"""Compressed sparse row storage and the symmetric / skew-symmetric split."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DimensionMismatch, InvalidParameter, NonSquare


def _frozen(arr, dtype):
    out = np.ascontiguousarray(arr, dtype=dtype)
    if out is arr or np.shares_memory(out, arr):
        out = out.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Immutable CSR matrix with sorted, duplicate-free column indices."""

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "n_rows", int(self.n_rows))
        object.__setattr__(self, "n_cols", int(self.n_cols))
        object.__setattr__(self, "row_offsets", _frozen(self.row_offsets, np.int64))
        object.__setattr__(self, "col_indices", _frozen(self.col_indices, np.int64))
        object.__setattr__(self, "values", _frozen(self.values, np.float64))
        if self.row_offsets.shape != (self.n_rows + 1,):
            raise InvalidParameter("row_offsets must have length n_rows + 1")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_coo(cls, rows, cols, vals, shape, drop_zeros=True):
        """Canonical CSR from triplets; duplicates are summed."""
        n_rows, n_cols = (int(s) for s in shape)
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=np.float64).ravel()
        if not (rows.shape == cols.shape == vals.shape):
            raise DimensionMismatch("rows, cols and vals must have equal length")
        if rows.size and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols):
            raise InvalidParameter("triplet index out of range")
        key = rows * n_cols + cols
        order = np.argsort(key, kind="stable")
        key, vals = key[order], vals[order]
        if key.size:
            first = np.ones(key.size, dtype=bool)
            first[1:] = key[1:] != key[:-1]
            starts = np.flatnonzero(first)
            vals = np.add.reduceat(vals, starts) if starts.size < key.size else vals
            key = key[starts]
        if drop_zeros:
            nz = vals != 0.0
            key, vals = key[nz], vals[nz]
        r = key // n_cols if n_cols else key
        c = key - r * n_cols
        offsets = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=n_rows), out=offsets[1:])
        return cls(n_rows, n_cols, offsets, c, vals)

    @classmethod
    def from_dense(cls, a):
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        r, c = np.nonzero(a)
        return cls.from_coo(r, c, a[r, c], a.shape)

    @classmethod
    def identity(cls, n):
        return cls.diagonal_matrix(np.ones(n))

    @classmethod
    def diagonal_matrix(cls, d):
        d = np.asarray(d, dtype=np.float64)
        idx = np.arange(d.size)
        return cls.from_coo(idx, idx, d, (d.size, d.size))

    # -- basic properties -------------------------------------------------

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self):
        return int(self.values.size)

    @property
    def is_square(self):
        return self.n_rows == self.n_cols

    def row_indices(self):
        return np.repeat(np.arange(self.n_rows), np.diff(self.row_offsets))

    def to_coo(self):
        return self.row_indices(), self.col_indices.copy(), self.values.copy()

    def to_dense(self):
        out = np.zeros(self.shape)
        out[self.row_indices(), self.col_indices] = self.values
        return out

    def diagonal(self):
        r = self.row_indices()
        on = r == self.col_indices
        d = np.zeros(min(self.shape))
        d[r[on]] = self.values[on]
        return d

    def check(self):
        """Raise ``InvalidParameter`` if any CSR invariant is violated."""
        ro, ci = self.row_offsets, self.col_indices
        if ro[0] != 0 or ro[-1] != ci.size or ci.size != self.values.size:
            raise InvalidParameter("row_offsets inconsistent with stored entries")
        if np.any(np.diff(ro) < 0):
            raise InvalidParameter("row_offsets must be non-decreasing")
        if ci.size and (ci.min() < 0 or ci.max() >= self.n_cols):
            raise InvalidParameter("column index out of range")
        r = self.row_indices()
        same_row = r[1:] == r[:-1]
        if np.any(ci[1:][same_row] <= ci[:-1][same_row]):
            raise InvalidParameter("column indices must be strictly increasing within a row")
        if not np.all(np.isfinite(self.values)):
            raise InvalidParameter("non-finite stored value")

    # -- arithmetic ---------------------------------------------------------

    def matvec(self, x, transposed=False):
        x = np.asarray(x, dtype=np.float64)
        if transposed:
            if x.shape != (self.n_rows,):
                raise DimensionMismatch(f"expected vector of length {self.n_rows}, got {x.shape}")
            return kernels.csr_rmatvec(self.row_offsets, self.col_indices, self.values, x, self.n_cols)
        if x.shape != (self.n_cols,):
            raise DimensionMismatch(f"expected vector of length {self.n_cols}, got {x.shape}")
        return kernels.csr_matvec(self.row_offsets, self.col_indices, self.values, x)

    def rmatvec(self, x):
        return self.matvec(x, transposed=True)

    def __matmul__(self, x):
        return self.matvec(x)

    def transpose(self):
        return SparseMatrix.from_coo(self.col_indices, self.row_indices(), self.values,
                                     (self.n_cols, self.n_rows), drop_zeros=False)

    @property
    def T(self):
        return self.transpose()

    def scaled(self, c):
        return SparseMatrix.from_coo(self.row_indices(), self.col_indices, c * self.values, self.shape)

    def add(self, other, alpha=1.0, beta=1.0):
        """Return ``alpha*self + beta*other``."""
        if other.shape != self.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")
        r = np.concatenate([self.row_indices(), other.row_indices()])
        c = np.concatenate([self.col_indices, other.col_indices])
        v = np.concatenate([alpha * self.values, beta * other.values])
        return SparseMatrix.from_coo(r, c, v, self.shape)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other, 1.0, -1.0)

    def shift_diagonal(self, sigma, scale=1.0):
        """``scale*self + sigma*I``."""
        if not self.is_square:
            raise NonSquare("diagonal shift needs a square matrix")
        n = self.n_rows
        idx = np.arange(n)
        r = np.concatenate([self.row_indices(), idx])
        c = np.concatenate([self.col_indices, idx])
        v = np.concatenate([scale * self.values, np.full(n, float(sigma))])
        return SparseMatrix.from_coo(r, c, v, self.shape)

    def is_symmetric(self):
        if not self.is_square:
            return False
        t = self.transpose()
        return (np.array_equal(t.row_offsets, self.row_offsets)
                and np.array_equal(t.col_indices, self.col_indices)
                and np.array_equal(t.values, self.values))

    def norm_inf(self):
        if self.nnz == 0:
            return 0.0
        return float(np.max(np.bincount(self.row_indices(), np.abs(self.values), self.n_rows)))

    def norm_fro(self):
        return float(np.sqrt(np.sum(self.values ** 2)))


@dataclass(frozen=True, eq=False)
class SymmetricSplit:
    """``A = s + k`` with ``s`` symmetric and ``k`` skew-symmetric."""

    s: SparseMatrix
    k: SparseMatrix

    @property
    def n(self):
        return self.s.n_rows

    def reconstruct(self):
        return self.s + self.k


def split(a: SparseMatrix) -> SymmetricSplit:
    """Split ``a`` into ``(A + A^T)/2`` and ``(A - A^T)/2``.

    Both halves of every unordered pair are formed from the same two
    operands, and IEEE addition is commutative while subtraction is exactly
    antisymmetric, so the results are bitwise (anti)symmetric.  Halving
    precedes the sum to stay clear of overflow.
    """
    if not a.is_square:
        raise NonSquare(f"cannot split a {a.n_rows}x{a.n_cols} matrix")
    n = a.n_rows
    r = a.row_indices()
    c = a.col_indices
    key = r * n + c
    tkey = c * n + r
    keys = np.union1d(key, tkey)
    vals = np.zeros(keys.size)
    tvals = np.zeros(keys.size)
    vals[np.searchsorted(keys, key)] = a.values
    tvals[np.searchsorted(keys, tkey)] = a.values
    half, thalf = 0.5 * vals, 0.5 * tvals
    sym = half + thalf
    skew = half - thalf
    rows, cols = keys // n, keys % n
    return SymmetricSplit(
        SparseMatrix.from_coo(rows, cols, sym, a.shape),
        SparseMatrix.from_coo(rows, cols, skew, a.shape),
    )


def matvec(a: SparseMatrix, x, transposed=False):
    return a.matvec(x, transposed=transposed)
