"""Compiled and numpy kernel families must agree; the numpy path must work end to end."""
import os
import subprocess
import sys

import numpy as np
import pytest

from sdkrylov import SparseMatrix, kernels, split
from sdkrylov.linalg.ordering import minimum_degree
from sdkrylov.problems import gen_pde_convection


@pytest.fixture(scope="module")
def lap():
    s = split(gen_pde_convection(0.0, 225).a).s
    perm = minimum_degree(s)
    pinv = np.empty_like(perm)
    pinv[perm] = np.arange(perm.size)
    r, c, v = s.to_coo()
    return SparseMatrix.from_coo(pinv[r], pinv[c], v, s.shape)


def test_matvec_bitwise(rng):
    a = gen_pde_convection(100.0, 225).a
    x = rng.standard_normal(225)
    args = (a.row_offsets, a.col_indices, a.values, x)
    assert kernels.csr_matvec_jit(*args).tobytes() == kernels.csr_matvec_np(*args).tobytes()


def test_rmatvec_close(rng):
    a = gen_pde_convection(100.0, 225).a
    x = rng.standard_normal(225)
    args = (a.row_offsets, a.col_indices, a.values, x, 225)
    np.testing.assert_allclose(kernels.csr_rmatvec_jit(*args), kernels.csr_rmatvec_np(*args), rtol=1e-14,
                               atol=1e-14)


def test_sparse_cholesky_agree(lap, rng):
    n = lap.n_rows
    pj = kernels.chol_symbolic_jit(lap.row_offsets, lap.col_indices, n)
    pn = kernels.chol_symbolic_np(lap.row_offsets, lap.col_indices, n)
    for u, v in zip(pj, pn):
        np.testing.assert_array_equal(u, v)
    parent, colptr = pj
    fj = kernels.chol_numeric_jit(lap.row_offsets, lap.col_indices, lap.values, n, parent, colptr, 0.0)
    fn = kernels.chol_numeric_np(lap.row_offsets, lap.col_indices, lap.values, n, parent, colptr, 0.0)
    np.testing.assert_array_equal(fj[0], fn[0])
    np.testing.assert_allclose(fj[1], fn[1], rtol=1e-13)
    assert fj[2] == fn[2] == -1
    b = rng.standard_normal(n)
    yj = kernels.ltsolve_jit(colptr, fj[0], fj[1], kernels.lsolve_jit(colptr, fj[0], fj[1], b))
    yn = kernels.ltsolve_np(colptr, fn[0], fn[1], kernels.lsolve_np(colptr, fn[0], fn[1], b))
    np.testing.assert_allclose(yj, yn, rtol=1e-12)
    np.testing.assert_allclose(lap @ yj, b, rtol=1e-10, atol=1e-10)


def test_dense_cholesky_agree(rng):
    g = rng.standard_normal((20, 20))
    m = g @ g.T + np.eye(20)
    lj, fj = kernels.dense_cholesky_jit(m, 0.0)
    ln, fn = kernels.dense_cholesky_np(m, 0.0)
    assert fj == fn == -1
    np.testing.assert_allclose(lj, ln, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(lj, np.linalg.cholesky(m), rtol=1e-12, atol=1e-14)
    b = rng.standard_normal(20)
    np.testing.assert_allclose(kernels.dense_ltsolve_jit(lj, kernels.dense_lsolve_jit(lj, b)),
                               kernels.dense_ltsolve_np(ln, kernels.dense_lsolve_np(ln, b)), rtol=1e-11)


def test_dense_cholesky_failure_index():
    m = np.diag([1.0, 2.0, -3.0, 4.0])
    assert kernels.dense_cholesky_jit(m, 1e-14)[1] == kernels.dense_cholesky_np(m, 1e-14)[1] == 2


def test_numpy_path_end_to_end():
    code = ("from sdkrylov import _accel, esd_cgn\n"
            "from sdkrylov.problems import gen_ode1d\n"
            "assert not _accel.USE_NUMBA\n"
            "s = gen_ode1d(1e-2, 64)\n"
            "print(esd_cgn(s.a, s.b).iterations)\n")
    env = dict(os.environ, SDKRYLOV_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "22"


def test_solutions_match_across_paths():
    code = ("import sys\nfrom sdkrylov import esd_cgn\nfrom sdkrylov.problems import gen_pde_convection\n"
            "s = gen_pde_convection(100.0, 225)\nsys.stdout.buffer.write(esd_cgn(s.a, s.b).solution.tobytes())\n")
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, SDKRYLOV_DISABLE_NUMBA=flag)
        outs.append(np.frombuffer(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                                 check=True).stdout))
    np.testing.assert_allclose(outs[0], outs[1], rtol=1e-9)


def test_benchmark_script_runs(capsys):
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "benchmarks"))
    try:
        import bench_kernels
    finally:
        sys.path.pop(0)
    bench_kernels.main(["--n", "49", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "csr_matvec" in out and "ESD-CGN solve" in out
