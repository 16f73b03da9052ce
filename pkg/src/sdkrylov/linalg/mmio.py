"""Matrix Market and plain vector files."""
import numpy as np
import scipy.io
import scipy.sparse

from .sparse import SparseMatrix


def read_matrix_market(path):
    m = scipy.io.mmread(str(path))
    coo = scipy.sparse.coo_matrix(m)
    return SparseMatrix.from_coo(coo.row, coo.col, coo.data, coo.shape)


def write_matrix_market(path, a: SparseMatrix, comment=""):
    r, c, v = a.to_coo()
    coo = scipy.sparse.coo_matrix((v, (r, c)), shape=a.shape)
    # 17 significant digits round-trip every double
    scipy.io.mmwrite(str(path), coo, comment=comment, field="real", precision=17, symmetry="general")


def read_vector(path):
    return np.atleast_1d(np.loadtxt(str(path), dtype=np.float64, ndmin=1))


def write_vector(path, x):
    np.savetxt(str(path), np.asarray(x, dtype=np.float64), fmt="%.17g")
