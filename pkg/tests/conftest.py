import numpy as np
import pytest

from sdkrylov import SparseMatrix


def random_pd(n, seed, skew_scale=1.0, floor=0.5):
    """Dense positive definite (non-symmetric) matrix: SPD part plus a skew part."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    s = g @ g.T / n + floor * np.eye(n)
    r = rng.standard_normal((n, n))
    k = skew_scale * 0.5 * (r - r.T)
    return s + k


def random_pd_sparse(n, seed, **kw):
    return SparseMatrix.from_dense(random_pd(n, seed, **kw))


def laplacian_1d(n, scaled=False):
    h = 1.0 / (n + 1)
    d = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return SparseMatrix.from_dense(d if scaled else d / h ** 2)


J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance outcomes, filled by test_acceptance and echoed in the terminal summary
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=int):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
