"""Krylov and stationary iterative solvers.

All solvers share :class:`SolveConfig` / :class:`SolveReport`.  Convergence is
judged on a relative residual that is either the residual of the system being
iterated (``"transformed_system"``) or ``||b - A x|| / ||b||`` of an original
system supplied through the ``original`` callback (``"original_system"``).
When no callback is given the two coincide.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, Diverged, InvalidParameter, NotPositiveDefinite
from .linalg.cholesky import SpdFactorization, factor_spd
from .linalg.sparse import SparseMatrix, SymmetricSplit

EPS = np.finfo(float).eps
STAGNATION_STEPS = 10


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    BREAKDOWN = "Breakdown"
    STAGNATED = "Stagnated"

    def __str__(self):
        return self.value


class ResidualReference(str, enum.Enum):
    TRANSFORMED = "transformed_system"
    ORIGINAL = "original_system"


@dataclass
class LinearOperator:
    """Matrix-free operator ``x -> Op x`` of a given dimension."""

    dimension: int
    apply: Callable[[np.ndarray], np.ndarray]
    apply_transpose: Optional[Callable[[np.ndarray], np.ndarray]] = None
    symmetric: bool = False
    positive_definite: bool = False

    def __call__(self, x):
        return self.apply(x)

    def __matmul__(self, x):
        return self.apply(x)

    def rmatvec(self, x):
        if self.apply_transpose is not None:
            return self.apply_transpose(x)
        if self.symmetric:
            return self.apply(x)
        raise InvalidParameter("operator has no transpose action")

    def to_dense(self):
        """Materialise column by column (testing aid; O(n) applications)."""
        eye = np.eye(self.dimension)
        return np.column_stack([self.apply(eye[:, j]) for j in range(self.dimension)])


def aslinearoperator(a, symmetric=None) -> LinearOperator:
    if isinstance(a, LinearOperator):
        return a
    if isinstance(a, SparseMatrix):
        sym = a.is_symmetric() if symmetric is None else symmetric
        return LinearOperator(a.n_rows, a.matvec, a.rmatvec, symmetric=sym)
    if isinstance(a, np.ndarray) and a.ndim == 2:
        sym = bool(np.array_equal(a, a.T)) if symmetric is None else symmetric
        return LinearOperator(a.shape[0], lambda x: a @ x, lambda x: a.T @ x, symmetric=sym)
    raise InvalidParameter(f"cannot interpret {type(a).__name__} as a linear operator")


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-6
    max_iterations: int = 1000
    residual_reference: ResidualReference = ResidualReference.ORIGINAL
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.tol < 1.0:
            raise InvalidParameter(f"tol must lie in (0, 1), got {self.tol}")
        if self.max_iterations < 1:
            raise InvalidParameter("max_iterations must be >= 1")
        object.__setattr__(self, "residual_reference", ResidualReference(self.residual_reference))


@dataclass
class SolveReport:
    """Outcome of one solve.

    ``residual_history`` holds the relative residual used for the stopping
    test, starting with the initial guess.  ``iterations`` may be a half
    integer for BiCGSTAB.
    """

    solution: np.ndarray
    iterations: float
    residual_history: np.ndarray
    status: Status
    matvec_count: int = 0
    inner_solve_count: int = 0
    inner_iterations: int = 0
    final_relative_residual: float = float("nan")
    original_residual: float = float("nan")
    method: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.status is Status.CONVERGED


def original_residual(a, b):
    """Callback computing ``||b - a x|| / ||b||`` for an original system."""
    bnorm = float(np.linalg.norm(b)) or 1.0
    return lambda x: float(np.linalg.norm(b - a @ x)) / bnorm


class _Monitor:
    """Stopping bookkeeping shared by every solver."""

    def __init__(self, cfg, rhs_norm, original):
        self.cfg = cfg
        self.rhs_norm = rhs_norm if rhs_norm > 0 else 1.0
        self.original = original if cfg.residual_reference is ResidualReference.ORIGINAL else None
        self.history = []
        self.last_transformed = float("nan")
        self._still = 0

    def record(self, x, r_norm):
        self.last_transformed = r_norm / self.rhs_norm
        rel = self.original(x) if self.original is not None else self.last_transformed
        self.history.append(rel)
        return rel <= self.cfg.tol

    def peek(self, x, r_norm):
        """Stopping test without recording (BiCGSTAB half steps)."""
        rel = self.original(x) if self.original is not None else r_norm / self.rhs_norm
        return rel <= self.cfg.tol, rel

    def stalled(self, step_norm, x_norm):
        if step_norm <= EPS * x_norm:
            self._still += 1
        else:
            self._still = 0
        return self._still >= STAGNATION_STEPS

    def report(self, x, iterations, status, method, matvecs, original_fn=None, **kw):
        orig = original_fn(x) if original_fn is not None else float("nan")
        return SolveReport(
            solution=x, iterations=iterations, residual_history=np.asarray(self.history),
            status=status, matvec_count=matvecs,
            final_relative_residual=self.last_transformed, original_residual=orig,
            method=method, **kw)


def _setup(op, b, x0):
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1 or b.shape[0] != op.dimension:
        raise DimensionMismatch(f"rhs of shape {b.shape} for operator of dimension {op.dimension}")
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    if x.shape != b.shape:
        raise DimensionMismatch("x0 and b differ in shape")
    return b, x


# ---------------------------------------------------------------------------
# Symmetric solvers


def cg(op, b, x0=None, cfg: SolveConfig | None = None, *, original=None, inner=None,
       callback=None, r0=None, method="CG") -> SolveReport:
    """Conjugate gradients.

    ``inner`` optionally supplies ``v -> H v`` so that CG runs in the
    ``<u, H v>`` inner product (for operators self-adjoint only in that inner
    product).  ``r0`` lets a caller supply the initial residual when it is
    assembled by a different formula than ``b - Op x0``.  A non-positive
    curvature ``<p, Op p>`` ends the run with status ``Breakdown``.
    """
    op = aslinearoperator(op)
    cfg = cfg or SolveConfig()
    b, x = _setup(op, b, x0)
    mon = _Monitor(cfg, float(np.linalg.norm(b)), original)
    dot = (lambda u, v: float(u @ inner(v))) if inner is not None else (lambda u, v: float(u @ v))
    matvecs = 0
    if r0 is not None:
        r = np.array(r0, dtype=np.float64)
    elif np.any(x):
        r = b - op(x)
        matvecs += 1
    else:
        r = b.copy()
    if mon.record(x, float(np.linalg.norm(r))):
        return mon.report(x, 0, Status.CONVERGED, method, matvecs, original)
    p = r.copy()
    rho = dot(r, r)
    status = Status.MAX_ITERATIONS
    k = 0
    while k < cfg.max_iterations:
        q = op(p)
        matvecs += 1
        curv = dot(p, q)
        if not curv > 0.0:
            status = Status.BREAKDOWN
            break
        alpha = rho / curv
        x += alpha * p
        r -= alpha * q
        k += 1
        if callback is not None:
            callback(k, x)
        if mon.record(x, float(np.linalg.norm(r))):
            status = Status.CONVERGED
            break
        if mon.stalled(abs(alpha) * np.linalg.norm(p), np.linalg.norm(x)):
            status = Status.STAGNATED
            break
        rho_new = dot(r, r)
        if rho_new == 0.0:
            status = Status.CONVERGED
            break
        p = r + (rho_new / rho) * p
        rho = rho_new
    return mon.report(x, k, status, method, matvecs, original)


def minres(op, b, x0=None, cfg: SolveConfig | None = None, *, original=None, callback=None,
           method="MINRES") -> SolveReport:
    """MINRES (Paige-Saunders recurrences, unpreconditioned).

    With the transformed reference the history is the recurrence residual
    estimate, which is non-increasing by construction.
    """
    op = aslinearoperator(op)
    cfg = cfg or SolveConfig()
    b, x = _setup(op, b, x0)
    mon = _Monitor(cfg, float(np.linalg.norm(b)), original)
    matvecs = 0
    if np.any(x):
        r1 = b - op(x)
        matvecs += 1
    else:
        r1 = b.copy()
    beta1 = float(np.linalg.norm(r1))
    if mon.record(x, beta1):
        return mon.report(x, 0, Status.CONVERGED, method, matvecs, original)

    y = r1.copy()
    r2 = r1.copy()
    oldb, beta, dbar, epsln, phibar = 0.0, beta1, 0.0, 0.0, beta1
    cs, sn = -1.0, 0.0
    w = np.zeros_like(b)
    w2 = np.zeros_like(b)
    status = Status.MAX_ITERATIONS
    k = 0
    while k < cfg.max_iterations:
        v = y / beta
        y = op(v)
        matvecs += 1
        if k >= 1:
            y = y - (beta / oldb) * r1
        alfa = float(v @ y)
        y = y - (alfa / beta) * r2
        r1, r2 = r2, y
        oldb, beta = beta, float(np.linalg.norm(y))
        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(np.hypot(gbar, beta), EPS)
        cs, sn = gbar / gamma, beta / gamma
        phi = cs * phibar
        phibar = sn * phibar
        w1, w2 = w2, w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w
        k += 1
        if callback is not None:
            callback(k, x)
        if mon.record(x, abs(phibar)):
            status = Status.CONVERGED
            break
        if beta == 0.0:
            # invariant Krylov space reached without a small residual
            status = Status.BREAKDOWN
            break
        if mon.stalled(abs(phi) * np.linalg.norm(w), np.linalg.norm(x)):
            status = Status.STAGNATED
            break
    return mon.report(x, k, status, method, matvecs, original)


# ---------------------------------------------------------------------------
# Non-symmetric baselines


class Method(str, enum.Enum):
    CGNE = "CGNE"
    CGNR = "CGNR"
    BICG = "BiCG"
    CGS = "CGS"
    BICGSTAB = "BiCGSTAB"
    QMR = "QMR"


def _true_residual_fn(a, b):
    bnorm = float(np.linalg.norm(b)) or 1.0
    return lambda x: float(np.linalg.norm(b - a @ x)) / bnorm


def cgne(a, b, x0=None, cfg=None):
    """CG on ``A A^T y = b``, ``x = A^T y`` (Craig's method)."""
    op = aslinearoperator(a)
    cfg = cfg or SolveConfig()
    b, x = _setup(op, b, x0)
    mon = _Monitor(cfg, float(np.linalg.norm(b)), None)
    r = b - op(x)
    matvecs = 1
    if mon.record(x, float(np.linalg.norm(r))):
        return mon.report(x, 0, Status.CONVERGED, "CGNE", matvecs)
    p = op.rmatvec(r)
    rr = float(r @ r)
    status, k = Status.MAX_ITERATIONS, 0
    while k < cfg.max_iterations:
        pp = float(p @ p)
        if pp == 0.0:
            status = Status.BREAKDOWN
            break
        alpha = rr / pp
        x += alpha * p
        r -= alpha * op(p)
        k += 1
        if mon.record(x, float(np.linalg.norm(r))):
            status = Status.CONVERGED
            break
        rr_new = float(r @ r)
        p = op.rmatvec(r) + (rr_new / rr) * p
        matvecs += 2
        rr = rr_new
    return mon.report(x, k, status, "CGNE", matvecs, _true_residual_fn(op, b))


def cgnr(a, b, x0=None, cfg=None):
    """CG on ``A^T A x = A^T b``; the original residual is ``b - A x``."""
    op = aslinearoperator(a)
    cfg = cfg or SolveConfig()
    b, x = _setup(op, b, x0)
    orig = _true_residual_fn(op, b)
    atb = op.rmatvec(b)
    mon = _Monitor(cfg, float(np.linalg.norm(atb)), orig)
    r = b - op(x)
    z = op.rmatvec(r)
    matvecs = 2
    if mon.record(x, float(np.linalg.norm(z))):
        return mon.report(x, 0, Status.CONVERGED, "CGNR", matvecs, orig)
    p = z.copy()
    zz = float(z @ z)
    status, k = Status.MAX_ITERATIONS, 0
    while k < cfg.max_iterations:
        w = op(p)
        ww = float(w @ w)
        if ww == 0.0:
            status = Status.BREAKDOWN
            break
        alpha = zz / ww
        x += alpha * p
        r -= alpha * w
        z = op.rmatvec(r)
        matvecs += 2
        k += 1
        if mon.record(x, float(np.linalg.norm(z))):
            status = Status.CONVERGED
            break
        zz_new = float(z @ z)
        p = z + (zz_new / zz) * p
        zz = zz_new
    return mon.report(x, k, status, "CGNR", matvecs, orig)


def _identity(v):
    return v


def bicg(a, b, precond: SpdFactorization | None = None, x0=None, cfg=None):
    op = aslinearoperator(a)
    cfg = cfg or SolveConfig()
    b, x = _setup(op, b, x0)
    orig = _true_residual_fn(op, b)
    psolve = precond.solve if precond is not None else _identity
    ptsolve = getattr(precond, "solve_transpose", psolve) if precond is not None else _identity
    name = "PBiCG" if precond is not None else "BiCG"
    mon = _Monitor(cfg, float(np.linalg.norm(b)), orig)
    r = b - op(x)
    matvecs = 1
    if mon.record(x, float(np.linalg.norm(r))):
        return mon.report(x, 0, Status.CONVERGED, name, matvecs, orig)
    rt = r.copy()
    p = pt = None
    rho_old = 1.0
    status, k = Status.MAX_ITERATIONS, 0
    while k < cfg.max_iterations:
        z = psolve(r)
        zt = ptsolve(rt)
        rho = float(z @ rt)
        if rho == 0.0 or not np.isfinite(rho):
            status = Status.BREAKDOWN
            break
        if p is None:
            p, pt = z.copy(), zt.copy()
        else:
            beta = rho / rho_old
            p = z + beta * p
            pt = zt + beta * pt
        q = op(p)
        qt = op.rmatvec(pt)
        matvecs += 2
        denom = float(pt @ q)
        if denom == 0.0:
            status = Status.BREAKDOWN
            break
        alpha = rho / denom
        x += alpha * p
        r -= alpha * q
        rt -= alpha * qt
        rho_old = rho
        k += 1
        if mon.record(x, float(np.linalg.norm(r))):
            status = Status.CONVERGED
            break
    return mon.report(x, k, status, name, matvecs, orig)


def cgs(a, b, precond: SpdFactorization | None = None, x0=None, cfg=None):
    op = aslinearoperator(a)
    cfg = cfg or SolveConfig()
    b, x = _setup(op, b, x0)
    orig = _true_residual_fn(op, b)
    psolve = precond.solve if precond is not None else _identity
    name = "PCGS" if precond is not None else "CGS"
    mon = _Monitor(cfg, float(np.linalg.norm(b)), orig)
    r = b - op(x)
    matvecs = 1
    if mon.record(x, float(np.linalg.norm(r))):
        return mon.report(x, 0, Status.CONVERGED, name, matvecs, orig)
    rt = r.copy()
    u = p = q = None
    rho_old = 1.0
    status, k = Status.MAX_ITERATIONS, 0
    while k < cfg.max_iterations:
        rho = float(rt @ r)
        if rho == 0.0 or not np.isfinite(rho):
            status = Status.BREAKDOWN
            break
        if p is None:
            u = r.copy()
            p = u.copy()
        else:
            beta = rho / rho_old
            u = r + beta * q
            p = u + beta * (q + beta * p)
        ph = psolve(p)
        vh = op(ph)
        denom = float(rt @ vh)
        if denom == 0.0:
            status = Status.BREAKDOWN
            break
        alpha = rho / denom
        q = u - alpha * vh
        uh = psolve(u + q)
        x += alpha * uh
        r -= alpha * op(uh)
        matvecs += 2
        rho_old = rho
        k += 1
        if mon.record(x, float(np.linalg.norm(r))):
            status = Status.CONVERGED
            break
    return mon.report(x, k, status, name, matvecs, orig)


def bicgstab(a, b, precond: SpdFactorization | None = None, x0=None, cfg=None):
    """BiCGSTAB with a convergence check after each half step.

    Converging on the intermediate ``s`` vector reports ``k - 0.5``
    iterations.
    """
    op = aslinearoperator(a)
    cfg = cfg or SolveConfig()
    b, x = _setup(op, b, x0)
    orig = _true_residual_fn(op, b)
    psolve = precond.solve if precond is not None else _identity
    name = "PBiCGSTAB" if precond is not None else "BiCGSTAB"
    mon = _Monitor(cfg, float(np.linalg.norm(b)), orig)
    r = b - op(x)
    matvecs = 1
    if mon.record(x, float(np.linalg.norm(r))):
        return mon.report(x, 0, Status.CONVERGED, name, matvecs, orig)
    rt = r.copy()
    p = v = None
    rho_old = alpha = omega = 1.0
    status, iters = Status.MAX_ITERATIONS, 0.0
    for k in range(1, cfg.max_iterations + 1):
        rho = float(rt @ r)
        if rho == 0.0 or not np.isfinite(rho):
            status = Status.BREAKDOWN
            break
        if p is None:
            p = r.copy()
        else:
            beta = (rho / rho_old) * (alpha / omega)
            p = r + beta * (p - omega * v)
        ph = psolve(p)
        v = op(ph)
        matvecs += 1
        denom = float(rt @ v)
        if denom == 0.0 or not np.isfinite(denom):
            status = Status.BREAKDOWN
            break
        alpha = rho / denom
        s = r - alpha * v
        x_half = x + alpha * ph
        done, rel = mon.peek(x_half, float(np.linalg.norm(s)))
        if done:
            x = x_half
            mon.history.append(rel)
            mon.last_transformed = float(np.linalg.norm(s)) / mon.rhs_norm
            iters = k - 0.5
            status = Status.CONVERGED
            break
        sh = psolve(s)
        t = op(sh)
        matvecs += 1
        tt = float(t @ t)
        omega = float(t @ s) / tt if tt > 0.0 else 0.0
        if omega == 0.0 or not np.isfinite(omega):
            status = Status.BREAKDOWN
            iters = k - 0.5
            break
        x = x_half + omega * sh
        r = s - omega * t
        rho_old = rho
        iters = float(k)
        if mon.record(x, float(np.linalg.norm(r))):
            status = Status.CONVERGED
            break
    return mon.report(x, iters, status, name, matvecs, orig)


def qmr(a, b, precond: SpdFactorization | None = None, x0=None, cfg=None):
    """Two-sided QMR without look-ahead.

    A preconditioner ``A_s = P^T L L^T P`` is applied in split form,
    ``M1 = P^T L`` and ``M2 = L^T P``.
    """
    op = aslinearoperator(a)
    cfg = cfg or SolveConfig()
    b, x = _setup(op, b, x0)
    orig = _true_residual_fn(op, b)
    if precond is not None and hasattr(precond, "half_solve"):
        m1_solve = precond.half_solve             # M1^{-1}
        m1t_solve = precond.half_solve_transpose  # M1^{-T}
        m2_solve = precond.half_solve_transpose   # M2^{-1}
        m2t_solve = precond.half_solve            # M2^{-T}
        name = "PQMR"
    elif precond is not None:
        # no symmetric factor available: M1 = M, M2 = I
        m1_solve, m1t_solve = precond.solve, precond.solve_transpose
        m2_solve = m2t_solve = _identity
        name = "PQMR"
    else:
        m1_solve = m1t_solve = m2_solve = m2t_solve = _identity
        name = "QMR"
    mon = _Monitor(cfg, float(np.linalg.norm(b)), orig)
    r = b - op(x)
    matvecs = 1
    if mon.record(x, float(np.linalg.norm(r))):
        return mon.report(x, 0, Status.CONVERGED, name, matvecs, orig)
    vt = r.copy()
    y = m1_solve(vt)
    rho = float(np.linalg.norm(y))
    wt = r.copy()
    z = m2t_solve(wt)
    xi = float(np.linalg.norm(z))
    gamma, eta, theta = 1.0, -1.0, 0.0
    eps_old = 1.0
    p = q = d = s = None
    status, k = Status.MAX_ITERATIONS, 0
    while k < cfg.max_iterations:
        if rho == 0.0 or xi == 0.0:
            status = Status.BREAKDOWN
            break
        v = vt / rho
        y = y / rho
        w = wt / xi
        z = z / xi
        delta = float(z @ y)
        if delta == 0.0:
            status = Status.BREAKDOWN
            break
        yt = m2_solve(y)
        zt = m1t_solve(z)
        if p is None:
            p, q = yt, zt
        else:
            p = yt - (xi * delta / eps_old) * p
            q = zt - (rho * delta / eps_old) * q
        pt = op(p)
        eps_new = float(q @ pt)
        if eps_new == 0.0 or not np.isfinite(eps_new):
            status = Status.BREAKDOWN
            break
        beta = eps_new / delta
        if beta == 0.0:
            status = Status.BREAKDOWN
            break
        vt = pt - beta * v
        y = m1_solve(vt)
        rho_old, rho = rho, float(np.linalg.norm(y))
        wt = op.rmatvec(q) - beta * w
        z = m2t_solve(wt)
        xi = float(np.linalg.norm(z))
        matvecs += 2
        theta_old = theta
        theta = rho / (gamma * abs(beta))
        gamma_old = gamma
        gamma = 1.0 / np.sqrt(1.0 + theta * theta)
        if gamma == 0.0:
            status = Status.BREAKDOWN
            break
        eta = -eta * rho_old * gamma * gamma / (beta * gamma_old * gamma_old)
        if d is None:
            d = eta * p
            s = eta * pt
        else:
            c = (theta_old * gamma) ** 2
            d = eta * p + c * d
            s = eta * pt + c * s
        x += d
        r -= s
        eps_old = eps_new
        k += 1
        if mon.record(x, float(np.linalg.norm(r))):
            status = Status.CONVERGED
            break
    return mon.report(x, k, status, name, matvecs, orig)


def baseline_solve(method, a: SparseMatrix, b, precond: SpdFactorization | None = None,
                   cfg: SolveConfig | None = None, x0=None) -> SolveReport:
    """Dispatch to one of the classical non-symmetric solvers.

    ``precond`` is accepted by BiCG, CGS, BiCGSTAB and QMR.  It is normally
    the :class:`SpdFactorization` of ``A_s``; any object with ``solve`` and
    ``solve_transpose`` (see :class:`IndefinitePreconditioner`) also works,
    in which case QMR applies it entirely on the left.
    """
    method = Method(method)
    if method in (Method.CGNE, Method.CGNR):
        if precond is not None:
            raise InvalidParameter(f"{method.value} takes no preconditioner")
        fn = cgne if method is Method.CGNE else cgnr
        return fn(a, b, x0=x0, cfg=cfg)
    fn = {Method.BICG: bicg, Method.CGS: cgs, Method.BICGSTAB: bicgstab, Method.QMR: qmr}[method]
    return fn(a, b, precond=precond, x0=x0, cfg=cfg)


class IndefinitePreconditioner:
    """LU-based ``M^{-1}`` for a symmetric part that is not positive definite."""

    def __init__(self, m: SparseMatrix):
        self.n = m.n_rows
        self._lu = scipy.linalg.lu_factor(m.to_dense(), check_finite=True)

    def solve(self, v):
        return scipy.linalg.lu_solve(self._lu, v)

    def solve_transpose(self, v):
        return scipy.linalg.lu_solve(self._lu, v, trans=1)


def symmetric_part_preconditioner(s: SparseMatrix):
    """Cholesky of ``s`` when it is SPD, otherwise a dense LU fallback."""
    try:
        return factor_spd(s)
    except NotPositiveDefinite:
        return IndefinitePreconditioner(s)


# ---------------------------------------------------------------------------
# Stationary iteration

DIVERGENCE_FACTOR = 1e6


def stationary_iteration(sp: SymmetricSplit, b, variant="first_order", cfg: SolveConfig | None = None,
                         factor: SpdFactorization | None = None, callback=None) -> SolveReport:
    """Fixed-point iteration on the splitting ``A = A_s + A_a``.

    ``first_order``: ``A_s x_k = -A_a x_{k-1} + b``.
    ``squared``:     ``A_s x_k = A_a A_s^{-1} A_a x_{k-1} + b - A_a A_s^{-1} b``.

    Raises :class:`Diverged` once the residual exceeds 1e6 times its start.
    """
    cfg = cfg or SolveConfig()
    if variant not in ("first_order", "squared"):
        raise InvalidParameter(f"unknown variant {variant!r}")
    f = factor or factor_spd(sp.s)
    a_s, a_a = sp.s, sp.k
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (sp.n,):
        raise DimensionMismatch("rhs length does not match the splitting")

    def a_mul(v):
        return a_s @ v + a_a @ v

    orig = _true_residual_fn(LinearOperator(sp.n, a_mul), b)
    mon = _Monitor(cfg, float(np.linalg.norm(b)), orig)
    x = np.zeros_like(b)
    solves = 0
    if variant == "squared":
        shifted_rhs = b - a_a @ f.solve(b)
        solves += 1
    mon.record(x, float(np.linalg.norm(b)))
    start = max(mon.history[0], np.finfo(float).tiny)
    status, k = Status.MAX_ITERATIONS, 0
    while k < cfg.max_iterations:
        if variant == "first_order":
            x = f.solve(b - a_a @ x)
            solves += 1
        else:
            x = f.solve(a_a @ f.solve(a_a @ x) + shifted_rhs)
            solves += 2
        k += 1
        if callback is not None:
            callback(k, x)
        if mon.record(x, float(np.linalg.norm(b - a_mul(x)))):
            status = Status.CONVERGED
            break
        if not np.isfinite(mon.history[-1]) or mon.history[-1] > DIVERGENCE_FACTOR * start:
            rep = mon.report(x, k, Status.MAX_ITERATIONS, f"stationary-{variant}", k, orig,
                             inner_solve_count=solves)
            raise Diverged(rep)
    return mon.report(x, k, status, f"stationary-{variant}", k, orig, inner_solve_count=solves)
