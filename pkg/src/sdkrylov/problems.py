"""Finite-difference benchmark systems and small analytic example matrices.

Grids are uniform with homogeneous Dirichlet boundaries.  1D problems use
``h = 1/(n+1)``; 2D problems use an ``m x m`` interior grid with
``h = 1/(m+1)``, unknowns ordered lexicographically with ``x`` varying
fastest.  By default every equation is multiplied by ``h^2`` (``scaled``).

Right-hand sides are produced discretely as ``b = A x_exact`` so that
``x_exact`` is the exact solution of the linear system.  Random solutions are
uniform on ``[0, 1)`` drawn from numpy's PCG64 generator seeded with the
given integer.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InvalidParameter
from .linalg.sparse import SparseMatrix


class Scheme(str, enum.Enum):
    BACKWARD = "backward"
    CENTERED = "centered"


@dataclass(frozen=True)
class Manufactured:
    """Named exact solution: ``xsinpix``, ``x1mx_cos`` (1D) or ``sinsinexp`` (2D)."""

    formula: str


@dataclass(frozen=True)
class Random:
    seed: int = 0


SolutionChoice = Union[Manufactured, Random]

FORMULAS_1D = {
    "xsinpix": lambda x: x * np.sin(np.pi * x),
    "x1mx_cos": lambda x: x * (1.0 - x) / np.cos(x),
}
FORMULAS_2D = {
    "sinsinexp": lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y) * np.exp((x / 2.0 + y) ** 3),
}


@dataclass(frozen=True, eq=False)
class DiscretizedSystem:
    a: SparseMatrix
    b: np.ndarray
    x_exact: Optional[np.ndarray]
    h: float
    n: int
    scheme: Scheme
    description: str


def random_solution(n, seed):
    return np.random.default_rng(seed).random(n)


def _exact_1d(solution, x):
    if isinstance(solution, Random):
        return random_solution(x.size, solution.seed)
    if isinstance(solution, Manufactured) and solution.formula in FORMULAS_1D:
        return FORMULAS_1D[solution.formula](x)
    raise InvalidParameter(f"unsupported 1D solution {solution!r}")


def _exact_2d(solution, m, h):
    if isinstance(solution, Random):
        return random_solution(m * m, solution.seed)
    if isinstance(solution, Manufactured) and solution.formula in FORMULAS_2D:
        xs = h * np.arange(1, m + 1)
        gx, gy = np.meshgrid(xs, xs)  # row index is y, so ravel() runs x fastest
        return FORMULAS_2D[solution.formula](gx, gy).ravel()
    raise InvalidParameter(f"unsupported 2D solution {solution!r}")


def _grid_side(n):
    m = math.isqrt(int(n))
    if n < 1 or m * m != n:
        raise InvalidParameter(f"n = {n} is not a perfect square")
    return m


def gen_ode1d(eps, n, solution: SolutionChoice = Manufactured("xsinpix"), scaled=True) -> DiscretizedSystem:
    """``-eps y'' + y' = f`` on (0,1), backward difference for ``y'``."""
    if not eps > 0.0:
        raise InvalidParameter("eps must be positive")
    if n < 2:
        raise InvalidParameter("n must be at least 2")
    h = 1.0 / (n + 1)
    i = np.arange(n)
    rows = np.concatenate([i, i[1:], i[:-1]])
    cols = np.concatenate([i, i[1:] - 1, i[:-1] + 1])
    # h^2-scaled row: eps(-y_{i-1} + 2 y_i - y_{i+1}) + h (y_i - y_{i-1})
    diag, lower, upper = 2.0 * eps + h, -eps - h, -eps
    if not scaled:
        diag, lower, upper = diag / h ** 2, lower / h ** 2, upper / h ** 2
    vals = np.concatenate([np.full(n, diag), np.full(n - 1, lower), np.full(n - 1, upper)])
    a = SparseMatrix.from_coo(rows, cols, vals, (n, n))
    x_exact = _exact_1d(solution, h * np.arange(1, n + 1))
    return DiscretizedSystem(a, a @ x_exact, x_exact, h, n, Scheme.BACKWARD,
                             f"ode1d eps={eps:g} n={n} solution={_label(solution)}")


def _label(solution):
    return solution.formula if isinstance(solution, Manufactured) else f"random(seed={solution.seed})"


def _laplacian_triplets(m):
    """5-point stencil ``4u_c - u_w - u_e - u_s - u_n`` on the m x m grid."""
    j, i = np.divmod(np.arange(m * m), m)
    k = np.arange(m * m)
    rows, cols, vals = [k], [k], [np.full(m * m, 4.0)]
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        ok = (i + di >= 0) & (i + di < m) & (j + dj >= 0) & (j + dj < m)
        rows.append(k[ok])
        cols.append(k[ok] + di + dj * m)
        vals.append(np.full(int(ok.sum()), -1.0))
    return rows, cols, vals, i, j, k


def gen_pde_convection(a_coef, n, scheme=Scheme.BACKWARD, solution: SolutionChoice = Manufactured("sinsinexp"),
                       scaled=True) -> DiscretizedSystem:
    """``-Laplace(u) + a du/dx = f`` on the unit square, constant ``a``."""
    m = _grid_side(n)
    scheme = Scheme(scheme)
    h = 1.0 / (m + 1)
    rows, cols, vals, i, j, k = _laplacian_triplets(m)
    a_coef = float(a_coef)
    if scheme is Scheme.BACKWARD:
        # a h (u_c - u_w)
        rows.append(k)
        cols.append(k)
        vals.append(np.full(m * m, a_coef * h))
        w = i > 0
        rows.append(k[w])
        cols.append(k[w] - 1)
        vals.append(np.full(int(w.sum()), -a_coef * h))
    else:
        # a h/2 (u_e - u_w)
        e, w = i < m - 1, i > 0
        rows += [k[e], k[w]]
        cols += [k[e] + 1, k[w] - 1]
        vals += [np.full(int(e.sum()), a_coef * h / 2.0), np.full(int(w.sum()), -a_coef * h / 2.0)]
    vals = np.concatenate(vals)
    if not scaled:
        vals = vals / h ** 2
    a = SparseMatrix.from_coo(np.concatenate(rows), np.concatenate(cols), vals, (n, n))
    x_exact = _exact_2d(solution, m, h)
    return DiscretizedSystem(a, a @ x_exact, x_exact, h, n, scheme,
                             f"pde-conv a={a_coef:g} n={n} scheme={scheme.value} solution={_label(solution)}")


def gen_pde_varcoef(n, reaction=0.0, solution: SolutionChoice = Manufactured("sinsinexp"),
                    advection_coef=1.0, divergence_coef=10.0, scaled=True) -> DiscretizedSystem:
    """``-Laplace(u) + c1 d(g u)/dx + c2 g du/dx + reaction u = f``, ``g = exp(3.5(x^2+y^2))``.

    Both first-order terms use backward differences; the divergence term
    differences the nodal product ``g u``.  ``c1 = divergence_coef`` and
    ``c2 = advection_coef``.
    """
    m = _grid_side(n)
    h = 1.0 / (m + 1)
    rows, cols, vals, i, j, k = _laplacian_triplets(m)
    x, y = h * (i + 1), h * (j + 1)
    g_c = np.exp(3.5 * (x * x + y * y))
    g_w = np.exp(3.5 * ((x - h) ** 2 + y * y))
    c1, c2 = float(divergence_coef), float(advection_coef)
    rows.append(k)
    cols.append(k)
    vals.append(h * (c1 + c2) * g_c + float(reaction) * h * h)
    w = i > 0
    rows.append(k[w])
    cols.append(k[w] - 1)
    vals.append(-h * (c1 * g_w[w] + c2 * g_c[w]))
    vals = np.concatenate(vals)
    if not scaled:
        vals = vals / h ** 2
    a = SparseMatrix.from_coo(np.concatenate(rows), np.concatenate(cols), vals, (n, n))
    x_exact = _exact_2d(solution, m, h)
    return DiscretizedSystem(a, a @ x_exact, x_exact, h, n, Scheme.BACKWARD,
                             f"pde-varcoef n={n} reaction={reaction:g} c1={c1:g} c2={c2:g} "
                             f"solution={_label(solution)}")


# ---------------------------------------------------------------------------
# Analytic example matrices


@dataclass(frozen=True)
class Example22Lower:
    eps: float


@dataclass(frozen=True)
class Example22Upper:
    eps: float


@dataclass(frozen=True)
class SymplecticFamily:
    """``A_s + (1/eps) J``; ``A_s = I`` when ``identity_s`` is set."""

    n: int
    eps: float
    seed: int = 0
    identity_s: bool = False


def symplectic_j(n):
    """Block-diagonal copies of ``[[0, -1], [1, 0]]``."""
    if n % 2:
        raise InvalidParameter("symplectic matrix needs even n")
    even = np.arange(0, n, 2)
    return SparseMatrix.from_coo(np.concatenate([even, even + 1]), np.concatenate([even + 1, even]),
                                 np.concatenate([-np.ones(even.size), np.ones(even.size)]), (n, n))


def random_spd(n, seed, lambda_floor=0.1):
    """Seeded symmetric Gaussian matrix shifted so ``lambda_min >= lambda_floor``."""
    r = np.random.default_rng(seed).standard_normal((n, n))
    s = 0.5 * (r + r.T)
    lo = np.linalg.eigvalsh(s)[0]
    if lo < lambda_floor:
        s = s + (lambda_floor - lo) * np.eye(n)
    return 0.5 * (s + s.T)


def gen_example_matrices(which) -> SparseMatrix:
    if isinstance(which, (Example22Lower, Example22Upper)):
        eps = which.eps
        if not 0.0 < eps < 1.0:
            raise InvalidParameter("eps must lie in (0, 1)")
        if isinstance(which, Example22Lower):
            return SparseMatrix.from_dense([[1.0, -1.0], [1.0, -1.0 + eps]])
        return SparseMatrix.from_dense([[1.0, -1.0 + eps], [1.0, -1.0]])
    if isinstance(which, SymplecticFamily):
        if not which.eps > 0.0:
            raise InvalidParameter("eps must be positive")
        j = symplectic_j(which.n)
        s = SparseMatrix.identity(which.n) if which.identity_s else SparseMatrix.from_dense(
            random_spd(which.n, which.seed))
        return s.add(j, 1.0, 1.0 / which.eps)
    raise InvalidParameter(f"unknown example matrix {which!r}")
