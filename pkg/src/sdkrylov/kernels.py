"""Hot numeric kernels.

Every kernel exists as a ``*_jit`` function (loop code compiled by numba) and
a ``*_np`` function (vectorised numpy, or plain loops where the algorithm is
inherently sequential).  The public names at the bottom of the module are
bound to one family according to :data:`sdkrylov._accel.USE_NUMBA`.

Summation order inside a CSR row is ascending column index in both families,
so matrix-vector products agree bitwise between the two paths.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# CSR products


@njit
def csr_matvec_jit(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        out[i] = acc
    return out


def csr_matvec_np(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    # bincount accumulates sequentially in input order, i.e. ascending column
    return np.bincount(rows, weights=data * x[indices], minlength=n)


@njit
def csr_rmatvec_jit(indptr, indices, data, x, n_cols):
    n = indptr.shape[0] - 1
    out = np.zeros(n_cols)
    for i in range(n):
        xi = x[i]
        for p in range(indptr[i], indptr[i + 1]):
            out[indices[p]] += data[p] * xi
    return out


def csr_rmatvec_np(indptr, indices, data, x, n_cols):
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    return np.bincount(indices, weights=data * x[rows], minlength=n_cols)


# ---------------------------------------------------------------------------
# Sparse Cholesky (up-looking, column-stored factor)


def _etree_py(indptr, indices, n):
    parent = np.full(n, -1, dtype=np.int64)
    ancestor = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        for p in range(indptr[k], indptr[k + 1]):
            i = indices[p]
            while i != -1 and i < k:
                inext = ancestor[i]
                ancestor[i] = k
                if inext == -1:
                    parent[i] = k
                i = inext
    return parent


def _ereach_py(indptr, indices, k, parent, stack, mark, n):
    """Nonzero pattern of row ``k`` of L in ``stack[top:n]``, descendants first."""
    top = n
    mark[k] = k
    for p in range(indptr[k], indptr[k + 1]):
        i = indices[p]
        if i > k:
            continue
        length = 0
        while mark[i] != k:
            stack[length] = i
            length += 1
            mark[i] = k
            i = parent[i]
        while length > 0:
            top -= 1
            length -= 1
            stack[top] = stack[length]
    return top


_etree_j = njit(_etree_py)
_ereach_j = njit(_ereach_py)


def _chol_symbolic_py(indptr, indices, n):
    parent = _etree_py(indptr, indices, n)
    counts = np.ones(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    mark = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        top = _ereach_py(indptr, indices, k, parent, stack, mark, n)
        for t in range(top, n):
            counts[stack[t]] += 1
    colptr = np.zeros(n + 1, dtype=np.int64)
    colptr[1:] = np.cumsum(counts)
    return parent, colptr


@njit
def chol_symbolic_jit(indptr, indices, n):
    parent = _etree_j(indptr, indices, n)
    counts = np.ones(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    mark = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        top = _ereach_j(indptr, indices, k, parent, stack, mark, n)
        for t in range(top, n):
            counts[stack[t]] += 1
    colptr = np.zeros(n + 1, dtype=np.int64)
    for j in range(n):
        colptr[j + 1] = colptr[j] + counts[j]
    return parent, colptr


@njit
def chol_numeric_jit(indptr, indices, data, n, parent, colptr, pivot_floor):
    nnz = colptr[n]
    rowind = np.empty(nnz, dtype=np.int64)
    values = np.empty(nnz)
    nxt = colptr[:n].copy()
    x = np.zeros(n)
    stack = np.empty(n, dtype=np.int64)
    mark = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        top = _ereach_j(indptr, indices, k, parent, stack, mark, n)
        for p in range(indptr[k], indptr[k + 1]):
            i = indices[p]
            if i <= k:
                x[i] = data[p]
        d = x[k]
        x[k] = 0.0
        for t in range(top, n):
            i = stack[t]
            lki = x[i] / values[colptr[i]]
            x[i] = 0.0
            for p in range(colptr[i] + 1, nxt[i]):
                x[rowind[p]] -= values[p] * lki
            d -= lki * lki
            p = nxt[i]
            nxt[i] += 1
            rowind[p] = k
            values[p] = lki
        if not d > pivot_floor:
            return rowind, values, k
        p = nxt[k]
        nxt[k] += 1
        rowind[p] = k
        values[p] = math.sqrt(d)
    return rowind, values, -1


def chol_numeric_np(indptr, indices, data, n, parent, colptr, pivot_floor):
    nnz = colptr[n]
    rowind = np.empty(nnz, dtype=np.int64)
    values = np.empty(nnz)
    nxt = colptr[:n].copy()
    x = np.zeros(n)
    stack = np.empty(n, dtype=np.int64)
    mark = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        top = _ereach_py(indptr, indices, k, parent, stack, mark, n)
        lo, hi = indptr[k], indptr[k + 1]
        cols = indices[lo:hi]
        keep = cols <= k
        x[cols[keep]] = data[lo:hi][keep]
        d = x[k]
        x[k] = 0.0
        for t in range(top, n):
            i = stack[t]
            lki = x[i] / values[colptr[i]]
            x[i] = 0.0
            a, b = colptr[i] + 1, nxt[i]
            x[rowind[a:b]] -= values[a:b] * lki
            d -= lki * lki
            p = nxt[i]
            nxt[i] += 1
            rowind[p] = k
            values[p] = lki
        if not d > pivot_floor:
            return rowind, values, k
        p = nxt[k]
        nxt[k] += 1
        rowind[p] = k
        values[p] = math.sqrt(d)
    return rowind, values, -1


def chol_symbolic_np(indptr, indices, n):
    return _chol_symbolic_py(indptr, indices, n)


@njit
def lsolve_jit(colptr, rowind, values, b):
    """Solve L y = b with L column-stored, diagonal first in each column."""
    x = b.copy()
    n = colptr.shape[0] - 1
    for j in range(n):
        x[j] /= values[colptr[j]]
        xj = x[j]
        for p in range(colptr[j] + 1, colptr[j + 1]):
            x[rowind[p]] -= values[p] * xj
    return x


@njit
def ltsolve_jit(colptr, rowind, values, b):
    """Solve L^T y = b."""
    x = b.copy()
    n = colptr.shape[0] - 1
    for j in range(n - 1, -1, -1):
        acc = x[j]
        for p in range(colptr[j] + 1, colptr[j + 1]):
            acc -= values[p] * x[rowind[p]]
        x[j] = acc / values[colptr[j]]
    return x


def lsolve_np(colptr, rowind, values, b):
    x = b.copy()
    n = colptr.shape[0] - 1
    for j in range(n):
        a, e = colptr[j], colptr[j + 1]
        x[j] /= values[a]
        x[rowind[a + 1:e]] -= values[a + 1:e] * x[j]
    return x


def ltsolve_np(colptr, rowind, values, b):
    x = b.copy()
    n = colptr.shape[0] - 1
    for j in range(n - 1, -1, -1):
        a, e = colptr[j], colptr[j + 1]
        x[j] = (x[j] - values[a + 1:e] @ x[rowind[a + 1:e]]) / values[a]
    return x


# ---------------------------------------------------------------------------
# Dense Cholesky for small systems


@njit
def dense_cholesky_jit(m, pivot_floor):
    n = m.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        d = m[j, j]
        for k in range(j):
            d -= L[j, k] * L[j, k]
        if not d > pivot_floor:
            return L, j
        ljj = math.sqrt(d)
        L[j, j] = ljj
        for i in range(j + 1, n):
            s = m[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            L[i, j] = s / ljj
    return L, -1


def dense_cholesky_np(m, pivot_floor):
    n = m.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        d = m[j, j] - L[j, :j] @ L[j, :j]
        if not d > pivot_floor:
            return L, j
        L[j, j] = math.sqrt(d)
        L[j + 1:, j] = (m[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L, -1


@njit
def dense_lsolve_jit(L, b):
    n = L.shape[0]
    x = b.copy()
    for i in range(n):
        s = x[i]
        for k in range(i):
            s -= L[i, k] * x[k]
        x[i] = s / L[i, i]
    return x


@njit
def dense_ltsolve_jit(L, b):
    n = L.shape[0]
    x = b.copy()
    for i in range(n - 1, -1, -1):
        s = x[i]
        for k in range(i + 1, n):
            s -= L[k, i] * x[k]
        x[i] = s / L[i, i]
    return x


def dense_lsolve_np(L, b):
    x = b.copy()
    for i in range(L.shape[0]):
        x[i] = (x[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def dense_ltsolve_np(L, b):
    x = b.copy()
    for i in range(L.shape[0] - 1, -1, -1):
        x[i] = (x[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


if USE_NUMBA:
    csr_matvec = csr_matvec_jit
    csr_rmatvec = csr_rmatvec_jit
    chol_symbolic = chol_symbolic_jit
    chol_numeric = chol_numeric_jit
    lsolve = lsolve_jit
    ltsolve = ltsolve_jit
    dense_cholesky = dense_cholesky_jit
    dense_lsolve = dense_lsolve_jit
    dense_ltsolve = dense_ltsolve_jit
else:
    csr_matvec = csr_matvec_np
    csr_rmatvec = csr_rmatvec_np
    chol_symbolic = chol_symbolic_np
    chol_numeric = chol_numeric_np
    lsolve = lsolve_np
    ltsolve = ltsolve_np
    dense_cholesky = dense_cholesky_np
    dense_lsolve = dense_lsolve_np
    dense_ltsolve = dense_ltsolve_np
