"""Compare the numba and numpy kernel families.

    python3 benchmarks/bench_kernels.py [--n 961] [--repeat 5]

Kernel timings call both families in-process.  The end-to-end rows run an
ESD-CGN solve in a subprocess per path, with ``SDKRYLOV_DISABLE_NUMBA`` set
accordingly.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from sdkrylov import SparseMatrix, kernels, split
from sdkrylov.linalg.ordering import minimum_degree
from sdkrylov.problems import gen_pde_convection

E2E = """
import time
from sdkrylov import esd_cgn
from sdkrylov.problems import gen_pde_convection
s = gen_pde_convection(100.0, {n})
esd_cgn(s.a, s.b)
t0 = time.perf_counter()
for _ in range({repeat}):
    rep = esd_cgn(s.a, s.b)
print((time.perf_counter() - t0) / {repeat}, rep.iterations)
"""


def best(fn, repeat):
    fn()  # compile / warm caches
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def permuted_symmetric_part(n):
    s = split(gen_pde_convection(100.0, n).a).s
    perm = minimum_degree(s)
    pinv = np.empty_like(perm)
    pinv[perm] = np.arange(n)
    r, c, v = s.to_coo()
    return SparseMatrix.from_coo(pinv[r], pinv[c], v, s.shape)


def kernel_rows(n, repeat):
    a = gen_pde_convection(100.0, n).a
    x = np.random.default_rng(0).standard_normal(n)
    c = permuted_symmetric_part(n)
    parent, colptr = kernels.chol_symbolic_jit(c.row_offsets, c.col_indices, n)
    rowind, lval, _ = kernels.chol_numeric_jit(c.row_offsets, c.col_indices, c.values, n, parent, colptr, 0.0)
    dense = c.to_dense()[:200, :200]
    rows = []
    for name, jit, npf in [
        ("csr_matvec", lambda: kernels.csr_matvec_jit(a.row_offsets, a.col_indices, a.values, x),
         lambda: kernels.csr_matvec_np(a.row_offsets, a.col_indices, a.values, x)),
        ("csr_rmatvec", lambda: kernels.csr_rmatvec_jit(a.row_offsets, a.col_indices, a.values, x, n),
         lambda: kernels.csr_rmatvec_np(a.row_offsets, a.col_indices, a.values, x, n)),
        ("chol_symbolic", lambda: kernels.chol_symbolic_jit(c.row_offsets, c.col_indices, n),
         lambda: kernels.chol_symbolic_np(c.row_offsets, c.col_indices, n)),
        ("chol_numeric", lambda: kernels.chol_numeric_jit(c.row_offsets, c.col_indices, c.values, n, parent,
                                                          colptr, 0.0),
         lambda: kernels.chol_numeric_np(c.row_offsets, c.col_indices, c.values, n, parent, colptr, 0.0)),
        ("lsolve+ltsolve", lambda: kernels.ltsolve_jit(colptr, rowind, lval, kernels.lsolve_jit(colptr, rowind,
                                                                                               lval, x)),
         lambda: kernels.ltsolve_np(colptr, rowind, lval, kernels.lsolve_np(colptr, rowind, lval, x))),
        ("dense_cholesky(200)", lambda: kernels.dense_cholesky_jit(dense, 0.0),
         lambda: kernels.dense_cholesky_np(dense, 0.0)),
    ]:
        rows.append((name, best(jit, repeat), best(npf, repeat)))
    return rows


def end_to_end(n, repeat):
    out = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, SDKRYLOV_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", E2E.format(n=n, repeat=repeat)], env=env, check=True,
                             capture_output=True, text=True).stdout.split()
        out[label] = (float(res[0]), res[1])
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=961, help="unknowns of the 2D test problem (perfect square)")
    p.add_argument("--repeat", type=int, default=5)
    ns = p.parse_args(argv)
    print(f"kernels on the 2D convection matrix, n={ns.n} (best of {ns.repeat})")
    print(f"{'kernel':<22}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, tj, tn in kernel_rows(ns.n, ns.repeat):
        print(f"{name:<22}{1e3 * tj:>12.3f}{1e3 * tn:>12.3f}{tn / tj:>10.1f}")
    e2e = end_to_end(ns.n, ns.repeat)
    (tj, it), (tn, _) = e2e["numba"], e2e["numpy"]
    print(f"{'ESD-CGN solve':<22}{1e3 * tj:>12.3f}{1e3 * tn:>12.3f}{tn / tj:>10.1f}   ({it} iterations)")


if __name__ == "__main__":
    main()
