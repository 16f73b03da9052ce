"""Self-dual symmetrization ``A^T M A x = A^T M b`` and its solvers.

The operator is always evaluated as a chain (apply ``A``, apply ``M``, apply
``A^T``); ``A^T M A`` is never formed.  ``M`` is chosen by a
:class:`PreconditionerSpec`.  Inner solves with the SPD matrix inside ``M`` use
either one cached sparse Cholesky factorization (:class:`Exact`) or nested CG
(:class:`Inexact`).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import analysis
from .errors import DimensionMismatch, InnerSolveFailed, InvalidParameter, NonSquare, NotPositiveDefinite
from .krylov import (LinearOperator, ResidualReference, SolveConfig, SolveReport, Status, cg, minres,
                     original_residual)
from .linalg.cholesky import factor_spd
from .linalg.dense import DenseLU
from .linalg.sparse import SparseMatrix, SymmetricSplit, split

DENSE_FALLBACK_LIMIT = 2000


class Variant(str, enum.Enum):
    SELF_DUAL = "SelfDual"
    RESOLVENT_ALPHA = "ResolventAlpha"
    RESOLVENT_BETA = "ResolventBeta"
    COMBINED = "Combined"
    SHIFTED_INVERSE = "ShiftedInverse"
    SHIFTED_INVERSE_MINUS = "ShiftedInverseMinus"
    NORMAL_EQUATIONS = "NormalEquations"
    GENERAL_SPLIT = "GeneralSplit"


@dataclass(frozen=True, eq=False)
class PreconditionerSpec:
    """Choice of ``M``.

    ================  ==============================================
    SelfDual          ``A_s^{-1}``
    ResolventAlpha    ``(alpha A_s + (1-alpha) I)^{-1}``
    ResolventBeta     ``beta A_s^{-1} + (1-beta) I``
    Combined          ``(alpha A_s + (1-alpha) I)^{-1} + beta I``
    ShiftedInverse    ``(A_s - alpha lambda_min I)^{-1}``
    ShiftedInverseMinus ``(A_s - alpha lambda_min I)^{-1} + beta I``
    NormalEquations   ``I``
    GeneralSplit      ``(B - C B^{-1} C) x = b - C B^{-1} b``
    ================  ==============================================

    ``beta_per_lmax`` means the stored ``beta`` is divided by
    ``lambda_max(A_s)`` at build time.  ``lmax_offset`` parameterizes
    ResolventBeta by ``c = lambda_max (1-beta')/beta'``; up to a positive
    scale that is ``M = A_s^{-1} + (c/lambda_max) I``.
    """

    variant: Variant
    alpha: float = float("nan")
    beta: float = 0.0
    beta_per_lmax: bool = False
    lmax_offset: Optional[float] = None
    b_mat: Optional[SparseMatrix] = None
    c_mat: Optional[SparseMatrix] = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def self_dual(cls):
        return cls(Variant.SELF_DUAL)

    @classmethod
    def normal_equations(cls):
        return cls(Variant.NORMAL_EQUATIONS)

    @classmethod
    def resolvent_alpha(cls, alpha):
        return cls(Variant.RESOLVENT_ALPHA, alpha=float(alpha))

    @classmethod
    def resolvent_beta(cls, beta):
        return cls(Variant.RESOLVENT_BETA, beta=float(beta))

    @classmethod
    def resolvent_offset(cls, c):
        return cls(Variant.RESOLVENT_BETA, lmax_offset=float(c))

    @classmethod
    def combined(cls, alpha, beta, beta_per_lmax=False):
        return cls(Variant.COMBINED, alpha=float(alpha), beta=float(beta), beta_per_lmax=beta_per_lmax)

    @classmethod
    def shifted_inverse(cls, alpha):
        return cls(Variant.SHIFTED_INVERSE, alpha=float(alpha))

    @classmethod
    def shifted_inverse_minus(cls, alpha, beta, beta_per_lmax=False):
        return cls(Variant.SHIFTED_INVERSE_MINUS, alpha=float(alpha), beta=float(beta),
                   beta_per_lmax=beta_per_lmax)

    @classmethod
    def general_split(cls, b_mat, c_mat):
        return cls(Variant.GENERAL_SPLIT, b_mat=b_mat, c_mat=c_mat)

    @classmethod
    def parse(cls, text: str) -> "PreconditionerSpec":
        """Parse ``selfdual | normal | alpha=v | beta=v | offset=c |
        combined=a,b | shifted=a[,b]``; a ``b`` of the form ``v/lmax`` is
        divided by ``lambda_max(A_s)``."""
        text = text.strip()
        if text == "selfdual":
            return cls.self_dual()
        if text == "normal":
            return cls.normal_equations()
        key, sep, val = text.partition("=")
        if not sep or not val:
            raise InvalidParameter(f"cannot parse preconditioner {text!r}")
        parts = val.split(",")
        try:
            if key == "alpha" and len(parts) == 1:
                return cls.resolvent_alpha(_num(parts[0]))
            if key == "beta" and len(parts) == 1:
                return cls.resolvent_beta(_num(parts[0]))
            if key == "offset" and len(parts) == 1:
                return cls.resolvent_offset(_num(parts[0]))
            if key == "combined" and len(parts) == 2:
                beta, per = _parse_beta(parts[1])
                return cls.combined(_num(parts[0]), beta, per)
            if key == "shifted" and len(parts) == 1:
                return cls.shifted_inverse(_num(parts[0]))
            if key == "shifted" and len(parts) == 2:
                beta, per = _parse_beta(parts[1])
                return cls.shifted_inverse_minus(_num(parts[0]), beta, per)
        except ValueError as exc:
            raise InvalidParameter(f"cannot parse preconditioner {text!r}: {exc}") from None
        raise InvalidParameter(f"cannot parse preconditioner {text!r}")

    # -- helpers ------------------------------------------------------------

    @property
    def needs_spectrum(self):
        return (self.variant in (Variant.SHIFTED_INVERSE, Variant.SHIFTED_INVERSE_MINUS)
                or self.beta_per_lmax or self.lmax_offset is not None)

    def resolved(self, lambda_min, lambda_max) -> "PreconditionerSpec":
        """Numeric ``beta`` with ``/lmax`` and offset forms folded in."""
        if self.lmax_offset is not None:
            return replace(self, beta=lambda_max / (lambda_max + self.lmax_offset), lmax_offset=None)
        if self.beta_per_lmax:
            return replace(self, beta=self.beta / lambda_max, beta_per_lmax=False)
        return self

    def describe(self) -> str:
        v = self.variant
        beta = f"{self.beta:g}/lmax" if self.beta_per_lmax else f"{self.beta:.17g}"
        if v is Variant.SELF_DUAL:
            return "selfdual"
        if v is Variant.NORMAL_EQUATIONS:
            return "normal"
        if v is Variant.RESOLVENT_ALPHA:
            return f"alpha={self.alpha:g}"
        if v is Variant.RESOLVENT_BETA:
            return f"offset={self.lmax_offset:g}" if self.lmax_offset is not None else f"beta={beta}"
        if v is Variant.COMBINED:
            return f"combined={self.alpha:g},{beta}"
        if v is Variant.SHIFTED_INVERSE:
            return f"shifted={self.alpha:g}"
        if v is Variant.SHIFTED_INVERSE_MINUS:
            return f"shifted={self.alpha:g},{beta}"
        return "general-split"


def _num(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {text!r}")
    return v


def _parse_beta(text):
    text = text.strip()
    if text.endswith("/lmax"):
        return _num(text[: -len("/lmax")]), True
    return _num(text), False


SELF_DUAL = PreconditionerSpec.self_dual()


@dataclass(frozen=True)
class Exact:
    """Inner systems solved with one cached sparse Cholesky factorization."""


@dataclass(frozen=True)
class Inexact:
    """Inner systems solved by CG from a zero start to ``inner_tol``."""

    inner_tol: float = 1e-7
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.inner_tol < 1.0:
            raise InvalidParameter("inner_tol must lie in (0, 1)")


class _InnerSolver:
    """``v -> K^{-1} v`` for the SPD (or, if allowed, invertible) matrix ``K``."""

    def __init__(self, k: SparseMatrix, mode, allow_indefinite=False):
        self.matrix = k
        self.mode = mode
        self.calls = 0
        self.inner_iterations = 0
        self.definite = True
        if isinstance(mode, Inexact):
            self._cfg = SolveConfig(tol=mode.inner_tol,
                                    max_iterations=mode.max_iterations or max(1000, 10 * k.n_rows),
                                    residual_reference=ResidualReference.TRANSFORMED)
            self._solve = self._cg
            return
        try:
            self._solve = factor_spd(k).solve
        except NotPositiveDefinite:
            if not allow_indefinite or k.n_rows > DENSE_FALLBACK_LIMIT:
                raise
            self.definite = False
            self._solve = DenseLU(k.to_dense()).solve

    def _cg(self, v):
        rep = cg(self.matrix, v, cfg=self._cfg)
        self.inner_iterations += int(rep.iterations)
        if rep.status is not Status.CONVERGED:
            raise InnerSolveFailed(f"inner CG ended with status {rep.status} after {rep.iterations} iterations")
        return rep.solution

    def __call__(self, v):
        self.calls += 1
        return self._solve(v)


@dataclass(frozen=True, eq=False)
class SelfdualSystem:
    """``operator = A^T M A`` and ``rhs = A^T M b``; immutable after build.

    ``inner`` carries call counters for the inner solves (statistics only).
    """

    operator: LinearOperator
    rhs: np.ndarray
    inner_mode: object
    spec: PreconditionerSpec
    original: SparseMatrix
    split: SymmetricSplit
    b: np.ndarray
    apply_m: object
    inner: Optional[_InnerSolver] = None
    lambda_min_s: float = float("nan")
    lambda_max_s: float = float("nan")

    @property
    def inner_solve_count(self):
        return self.inner.calls if self.inner is not None else 0


def _check_system(a: SparseMatrix, b):
    if not a.is_square:
        raise NonSquare(f"expected a square matrix, got {a.shape}")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (a.n_rows,):
        raise DimensionMismatch(f"rhs of shape {b.shape} for a {a.shape} matrix")
    return b


def build_selfdual_system(a: SparseMatrix, b, spec: PreconditionerSpec = SELF_DUAL, inner=None, *,
                          allow_indefinite=False, spectrum: analysis.SpectrumEstimate | None = None
                          ) -> SelfdualSystem:
    """Assemble the symmetrized system for ``spec``.

    Raises :class:`NotPositiveDefinite` when the matrix inside ``M`` does not
    factor; with ``allow_indefinite`` a dense LU (n <= 2000) is used instead,
    which is what MINRES-based solves need.
    """
    b = _check_system(a, b)
    inner = inner or Exact()
    sp = split(a)
    if spec.variant is Variant.GENERAL_SPLIT:
        op, rhs = general_split_system(spec.b_mat, spec.c_mat, b)
        return SelfdualSystem(op, rhs, inner, spec, a, sp, b, None)

    lmin = lmax = float("nan")
    if spec.needs_spectrum:
        est = spectrum or analysis.extreme_eigs(sp.s, rel_tol=1e-8)
        lmin, lmax = est.lambda_min, est.lambda_max
        spec = spec.resolved(lmin, lmax)

    v = spec.variant
    if v in (Variant.SELF_DUAL, Variant.RESOLVENT_BETA):
        k = sp.s
    elif v in (Variant.RESOLVENT_ALPHA, Variant.COMBINED):
        k = sp.s.shift_diagonal(1.0 - spec.alpha, scale=spec.alpha)
    elif v in (Variant.SHIFTED_INVERSE, Variant.SHIFTED_INVERSE_MINUS):
        k = sp.s.shift_diagonal(-spec.alpha * lmin)
    else:
        k = None
    solver = _InnerSolver(k, inner, allow_indefinite) if k is not None else None

    if v is Variant.NORMAL_EQUATIONS:
        def apply_m(y):
            return y
    elif v is Variant.RESOLVENT_BETA:
        beta = spec.beta

        def apply_m(y):
            return beta * solver(y) + (1.0 - beta) * y
    elif v in (Variant.COMBINED, Variant.SHIFTED_INVERSE_MINUS):
        beta = spec.beta

        def apply_m(y):
            return solver(y) + beta * y
    else:
        apply_m = solver

    def apply(x):
        return a.rmatvec(apply_m(a @ x))

    pd = solver is None or (solver.definite and v in (
        Variant.SELF_DUAL, Variant.RESOLVENT_ALPHA, Variant.SHIFTED_INVERSE))
    op = LinearOperator(a.n_rows, apply, apply, symmetric=True, positive_definite=pd)
    rhs = a.rmatvec(apply_m(b))
    return SelfdualSystem(op, rhs, inner, spec, a, sp, b, apply_m, solver, lmin, lmax)


def _finish(rep: SolveReport, method, inner_calls, inner_iterations=0) -> SolveReport:
    rep.method = method
    rep.inner_solve_count = inner_calls
    rep.inner_iterations = inner_iterations
    return rep


def sd_cgn(system: SelfdualSystem, cfg: SolveConfig | None = None, x0=None, method="SD-CGN") -> SolveReport:
    """CG on a prebuilt symmetrized system; stops on the configured reference."""
    before = system.inner_solve_count
    orig = original_residual(system.original, system.b)
    rep = cg(system.operator, system.rhs, x0, cfg, original=orig)
    it = system.inner.inner_iterations if system.inner is not None else 0
    return _finish(rep, method, system.inner_solve_count - before, it)


def _table1(a: SparseMatrix, b, x0, cfg, solve_s, method):
    sp = split(a)
    a_s, a_a = sp.s, sp.k
    y = solve_s(b)
    bbar = b - a_a @ y
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    y0 = solve_s(a_a @ x)
    r0 = bbar - a_s @ x + a_a @ y0

    def w_of(p):
        z = solve_s(a_a @ p)
        return a_s @ p - a_a @ z

    op = LinearOperator(a.n_rows, w_of, w_of, symmetric=True, positive_definite=True)
    rep = cg(op, bbar, x, cfg, original=original_residual(a, b), r0=r0, method=method)
    return rep


def esd_cgn(a: SparseMatrix, b, x0=None, cfg: SolveConfig | None = None) -> SolveReport:
    """Exact self-dual CG: coupled recurrence with a factored ``A_s``.

    ``b_bar = b - A_a A_s^{-1} b``; every step solves ``A_s z = A_a p`` and
    uses ``w = A_s p - A_a z``.  ``inner_solve_count = iterations + 2``.
    """
    b = _check_system(a, b)
    f = factor_spd(split(a).s)
    calls = [0]

    def solve_s(v):
        calls[0] += 1
        return f.solve(v)

    rep = _table1(a, b, x0, cfg, solve_s, "ESD-CGN")
    return _finish(rep, "ESD-CGN", calls[0])


def isd_cgn(a: SparseMatrix, b, x0=None, inner_tol=1e-7, cfg: SolveConfig | None = None) -> SolveReport:
    """Inexact self-dual CG: as :func:`esd_cgn` with nested CG on ``A_s``.

    Raises :class:`InnerSolveFailed` if a nested solve stalls.
    """
    b = _check_system(a, b)
    s = split(a).s
    factor_spd(s)  # positive definiteness gate, as in the exact variant
    solver = _InnerSolver(s, Inexact(inner_tol))
    rep = _table1(a, b, x0, cfg, solver, f"ISD-CGN({inner_tol:g})")
    return _finish(rep, rep.method, solver.calls, solver.inner_iterations)


def sd_minresn(a: SparseMatrix, b, spec: PreconditionerSpec = SELF_DUAL, cfg: SolveConfig | None = None,
               x0=None, inner=None) -> SolveReport:
    """MINRES on ``A^T M A``; ``M`` may be indefinite."""
    system = build_selfdual_system(a, b, spec, inner, allow_indefinite=True)
    before = system.inner_solve_count
    rep = minres(system.operator, system.rhs, x0, cfg, original=original_residual(a, system.b))
    it = system.inner.inner_iterations if system.inner is not None else 0
    return _finish(rep, "SD-MINRESN", system.inner_solve_count - before, it)


def iterated_system(sp: SymmetricSplit, b, factor=None):
    """``x -> A_s^{-1} A^T A_s^{-1} A x`` and its right-hand side.

    Self-adjoint in the ``A_s`` inner product only; see :func:`iterated_cg`.
    """
    f = factor or factor_spd(sp.s)
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (sp.n,):
        raise DimensionMismatch("rhs length does not match the splitting")
    a_s, a_a = sp.s, sp.k

    def a_mul(v):
        return a_s @ v + a_a @ v

    def at_mul(v):
        return a_s @ v - a_a @ v

    def apply(x):
        return f.solve(at_mul(f.solve(a_mul(x))))

    op = LinearOperator(sp.n, apply, None, symmetric=False, positive_definite=True)
    return op, f.solve(at_mul(f.solve(b)))


def iterated_cg(a: SparseMatrix, b, cfg: SolveConfig | None = None, x0=None) -> SolveReport:
    """CG in the ``A_s`` inner product on the iterated system; two inner solves per step."""
    b = _check_system(a, b)
    sp = split(a)
    f = factor_spd(sp.s)
    op, rhs = iterated_system(sp, b, f)
    rep = cg(op, rhs, x0, cfg, original=original_residual(a, b), inner=sp.s.matvec, method="iterated-CG")
    return _finish(rep, "iterated-CG", 2 * rep.matvec_count + 2)


@dataclass(frozen=True)
class FunctionalEvaluation:
    value: float
    gradient: np.ndarray = field(repr=False)


def functional(a: SparseMatrix, b, x, factor=None) -> FunctionalEvaluation:
    """``I(x) = <Ax,x>/2 + <A_s^{-1}(b - A_a x), b - A_a x>/2 - <b,x>``.

    Gradient ``A_tilde x + A_a A_s^{-1} b - b``.
    """
    b = _check_system(a, b)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != b.shape:
        raise DimensionMismatch("x and b differ in shape")
    sp = split(a)
    f = factor or factor_spd(sp.s)
    u = b - sp.k @ x
    value = 0.5 * float((a @ x) @ x) + 0.5 * float(f.solve(u) @ u) - float(b @ x)
    grad = sp.s @ x - sp.k @ f.solve(sp.k @ x) + sp.k @ f.solve(b) - b
    return FunctionalEvaluation(value, grad)


def functional_quadratic(a: SparseMatrix, b, x, factor=None) -> float:
    """The same functional written as a quadratic form in ``A_tilde``."""
    b = _check_system(a, b)
    x = np.asarray(x, dtype=np.float64)
    sp = split(a)
    f = factor or factor_spd(sp.s)
    tx = sp.s @ x - sp.k @ f.solve(sp.k @ x)
    sb = f.solve(b)
    return 0.5 * float(tx @ x) + float((sp.k @ sb - b) @ x) + 0.5 * float(sb @ b)


def general_split_system(b_mat: SparseMatrix, c_mat: SparseMatrix, rhs):
    """``(B - C B^{-1} C) x = rhs - C B^{-1} rhs``, equivalent to ``(B + C) x = rhs``.

    ``B^{-1}`` uses sparse Cholesky when ``B`` is SPD and a dense LU for
    other ``B`` up to n = 2000.
    """
    if not b_mat.is_square or b_mat.shape != c_mat.shape:
        raise DimensionMismatch("B and C must be square and of equal shape")
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape != (b_mat.n_rows,):
        raise DimensionMismatch("rhs length does not match B")
    solve_b = None
    if b_mat.is_symmetric():
        try:
            solve_b = factor_spd(b_mat).solve
        except NotPositiveDefinite:
            solve_b = None
    if solve_b is None:
        if b_mat.n_rows > DENSE_FALLBACK_LIMIT:
            raise InvalidParameter("non-SPD B is supported only up to n = 2000")
        solve_b = DenseLU(b_mat.to_dense()).solve  # raises Singular

    def apply(x):
        return b_mat @ x - c_mat @ solve_b(c_mat @ x)

    sym = b_mat.is_symmetric() and (c_mat.is_symmetric() or c_mat.add(c_mat.T).nnz == 0)
    op = LinearOperator(b_mat.n_rows, apply, None, symmetric=sym)
    return op, rhs - c_mat @ solve_b(rhs)
