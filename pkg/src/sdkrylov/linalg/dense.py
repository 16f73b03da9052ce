"""Dense Gaussian elimination with partial pivoting; the test oracle."""
import numpy as np

from ..errors import DimensionMismatch, NonSquare, Singular

PIVOT_TINY = 1e-300


class DenseLU:
    """``P A = L U`` computed once, reusable for many right-hand sides."""

    def __init__(self, a):
        a = np.array(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NonSquare(f"dense oracle needs a square matrix, got {a.shape}")
        n = a.shape[0]
        piv = np.arange(n)
        start_max = np.abs(a).max() if n else 0.0
        growth = 0.0
        for k in range(n):
            p = k + int(np.argmax(np.abs(a[k:, k])))
            if abs(a[p, k]) < PIVOT_TINY:
                raise Singular(f"pivot {k} below {PIVOT_TINY:g}")
            if p != k:
                a[[k, p]] = a[[p, k]]
                piv[[k, p]] = piv[[p, k]]
            a[k + 1:, k] /= a[k, k]
            a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
            growth = max(growth, np.abs(a[k + 1:, k + 1:]).max() if k + 1 < n else 0.0)
        self.n = n
        self.lu = a
        self.piv = piv
        self.growth = growth / start_max if start_max else 0.0

    def solve(self, b):
        b = np.asarray(b, dtype=np.float64)
        if b.shape[0] != self.n:
            raise DimensionMismatch(f"expected {self.n} rows, got {b.shape[0]}")
        lu = self.lu
        x = b[self.piv].copy()
        for i in range(1, self.n):
            x[i] -= lu[i, :i] @ x[:i]
        for i in range(self.n - 1, -1, -1):
            x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
        return x

    def solve_transpose(self, b):
        """Solve ``A^T x = b``."""
        b = np.asarray(b, dtype=np.float64)
        if b.shape[0] != self.n:
            raise DimensionMismatch(f"expected {self.n} rows, got {b.shape[0]}")
        lu = self.lu
        y = b.copy()
        for i in range(self.n):
            y[i] = (y[i] - lu[:i, i] @ y[:i]) / lu[i, i]
        for i in range(self.n - 2, -1, -1):
            y[i] -= lu[i + 1:, i] @ y[i + 1:]
        x = np.empty_like(y)
        x[self.piv] = y
        return x


def dense_solve_oracle(a, b):
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting."""
    return DenseLU(a).solve(b)
