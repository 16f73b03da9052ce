"""Spectral estimates and condition-number bounds for the split ``A = A_s + A_a``."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidParameter, NoConvergence, Singular
from .linalg.cholesky import factor_spd
from .linalg.sparse import SparseMatrix, SymmetricSplit

DENSE_LIMIT = 2048


class SpectrumMethod(str, enum.Enum):
    DENSE_EXACT = "DenseExact"
    LANCZOS = "Lanczos"


@dataclass(frozen=True)
class SpectrumEstimate:
    lambda_min: float
    lambda_max: float
    method: SpectrumMethod
    rel_tol: float


@dataclass(frozen=True)
class ConditionReport:
    """Spectral-norm condition data for ``A`` and its self-dual operator.

    ``kappa`` is ``sigma_max/sigma_min`` of ``A``; ``kappa_tilde`` the
    eigenvalue ratio of ``A_tilde = A_s - A_a A_s^{-1} A_a``.
    """

    kappa: float
    kappa_tilde: float
    kappa1_bound: float
    kappa2_bound: float
    kappa_s: float = float("nan")
    lambda_min_s: float = float("nan")
    lambda_max_s: float = float("nan")
    lambda_min_tilde: float = float("nan")
    lambda_max_tilde: float = float("nan")


def _lanczos_extremes(s: SparseMatrix, rel_tol, seed=0):
    n = s.n_rows
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    basis = [q]
    alphas, betas = [], []
    beta = 0.0
    q_prev = np.zeros(n)
    for j in range(10 * n):
        w = s @ basis[-1] - beta * q_prev
        alpha = float(basis[-1] @ w)
        w -= alpha * basis[-1]
        qs = np.array(basis)
        w -= qs.T @ (qs @ w)  # full reorthogonalization
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))
        if j >= 1 and (j % 10 == 0 or beta == 0.0):
            theta, vecs = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
            scale = max(abs(theta[0]), abs(theta[-1]))
            resid = beta * np.abs(vecs[-1, [0, -1]])
            if beta == 0.0 or np.all(resid <= rel_tol * scale):
                return float(theta[0]), float(theta[-1])
        if beta == 0.0 or len(basis) >= n:
            theta = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas), eigvals_only=True)
            return float(theta[0]), float(theta[-1])
        betas.append(beta)
        q_prev = basis[-1]
        basis.append(w / beta)
    raise NoConvergence("Lanczos did not resolve the extreme eigenvalues")


def extreme_eigs(s: SparseMatrix, rel_tol=1e-8, seed=0) -> SpectrumEstimate:
    """Smallest and largest eigenvalue of a symmetric matrix."""
    if not s.is_symmetric():
        raise InvalidParameter("extreme_eigs needs a symmetric matrix")
    if s.n_rows <= DENSE_LIMIT:
        ev = np.linalg.eigvalsh(s.to_dense())
        return SpectrumEstimate(float(ev[0]), float(ev[-1]), SpectrumMethod.DENSE_EXACT, rel_tol)
    lo, hi = _lanczos_extremes(s, rel_tol, seed)
    return SpectrumEstimate(lo, hi, SpectrumMethod.LANCZOS, rel_tol)


def _dense(a):
    return a.to_dense() if isinstance(a, SparseMatrix) else np.asarray(a, dtype=np.float64)


def condition_number(a) -> float:
    """``sigma_max / sigma_min`` from a dense SVD."""
    d = _dense(a)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidParameter("condition_number needs a square matrix")
    if d.shape[0] > DENSE_LIMIT:
        raise InvalidParameter(f"dense condition number limited to n <= {DENSE_LIMIT}")
    sv = np.linalg.svd(d, compute_uv=False)
    if sv[-1] <= np.finfo(float).eps * sv[0] * d.shape[0] or sv[-1] == 0.0:
        raise Singular("matrix is numerically singular")
    return float(sv[0] / sv[-1])


def selfdual_dense(sp: SymmetricSplit):
    """Dense ``A_s - A_a A_s^{-1} A_a`` (symmetrised against round-off)."""
    s = sp.s.to_dense()
    k = sp.k.to_dense()
    t = s - k @ np.linalg.solve(s, k)
    return 0.5 * (t + t.T)


def selfdual_condition(sp: SymmetricSplit) -> float:
    """Spectral condition number of ``A_tilde``; ``A_s`` need only be invertible."""
    return condition_number(selfdual_dense(sp))


def _require_spd(m: SparseMatrix):
    factor_spd(m)  # raises NotPositiveDefinite


def kappa_bounds(sp: SymmetricSplit) -> ConditionReport:
    """kappa_1 / kappa_2 upper bounds alongside the exact dense ``kappa(A_tilde)``.

    kappa_2 is +inf whenever ``A_a`` is singular, which includes every odd
    dimension.
    """
    _require_spd(sp.s)
    s_ev = np.linalg.eigvalsh(sp.s.to_dense())
    ls_min, ls_max = float(s_ev[0]), float(s_ev[-1])
    k = sp.k.to_dense()
    kk = np.linalg.eigvalsh(k.T @ k)  # = eig(-A_a^2)
    kk_min, kk_max = max(float(kk[0]), 0.0), float(kk[-1])
    kappa_s = ls_max / ls_min
    kappa1 = kappa_s + kk_max / ls_min ** 2
    if kk_max == 0.0 or kk_min <= kk.size * np.finfo(float).eps * kk_max:
        kappa2 = float("inf")
    else:
        kappa2 = kappa_s * (kk_max / kk_min) + ls_max ** 2 / kk_min
    t_ev = np.linalg.eigvalsh(selfdual_dense(sp))
    a = sp.s.to_dense() + k
    return ConditionReport(
        kappa=condition_number(a), kappa_tilde=float(np.abs(t_ev).max() / np.abs(t_ev).min()),
        kappa1_bound=kappa1, kappa2_bound=kappa2, kappa_s=kappa_s,
        lambda_min_s=ls_min, lambda_max_s=ls_max,
        lambda_min_tilde=float(t_ev[0]), lambda_max_tilde=float(t_ev[-1]))


def spectral_radius_skew(sp: SymmetricSplit, rel_tol=1e-10, power=1, max_iterations=None, seed=0) -> float:
    """``rho(A_s^{-1} A_a)`` (``power=1``) or ``rho((A_s^{-1} A_a)^2)`` (``power=2``).

    Power iteration on ``T = -A_s^{-1} A_a A_s^{-1} A_a``, which is
    self-adjoint and positive semidefinite in the ``A_s`` inner product; its
    largest eigenvalue equals ``rho(A_s^{-1} A_a)^2``.
    """
    if power not in (1, 2):
        raise InvalidParameter("power must be 1 or 2")
    f = factor_spd(sp.s)
    n = sp.n
    if sp.k.nnz == 0:
        return 0.0

    def t_apply(v):
        return -f.solve(sp.k @ f.solve(sp.k @ v))

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    cap = max_iterations or max(1000, 50 * n)
    mu_old = 0.0
    for _ in range(cap):
        y = t_apply(x)
        sx = sp.s @ x
        mu = float(y @ sx) / float(x @ sx)  # A_s-Rayleigh quotient
        nrm = np.sqrt(max(float(y @ (sp.s @ y)), 0.0))
        if nrm == 0.0:
            return 0.0
        x = y / nrm
        if abs(mu - mu_old) <= rel_tol * abs(mu):
            return mu if power == 2 else float(np.sqrt(mu))
        mu_old = mu
    raise NoConvergence("power iteration for the skew spectral radius did not converge")


def spectral_radius_skew_dense(sp: SymmetricSplit, power=1) -> float:
    """Dense generalized-eigenproblem value of the same quantity (n <= 2048)."""
    s = sp.s.to_dense()
    k = sp.k.to_dense()
    top = scipy.linalg.eigh(k.T @ np.linalg.solve(s, k), s, eigvals_only=True)[-1]
    top = max(float(top), 0.0)
    return top if power == 2 else float(np.sqrt(top))
