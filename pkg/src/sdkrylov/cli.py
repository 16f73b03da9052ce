"""``sdkrylov`` command line: gen, solve, cond, table.

Exit codes: 0 converged / success, 2 invalid flags, 3 I/O failure,
4 max iterations (also stagnation or divergence), 5 breakdown,
6 matrix not positive definite where that is required.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time

import numpy as np

from . import analysis, problems
from .bench import runner
from .errors import (Diverged, InnerSolveFailed, InvalidParameter, NonSquare, NotPositiveDefinite, SdKrylovError,
                     Singular)
from .krylov import SolveConfig, Status
from .linalg import mmio
from .linalg.sparse import split

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_MAXIT, EXIT_BREAKDOWN, EXIT_NOT_SPD = 0, 2, 3, 4, 5, 6
STATUS_EXIT = {Status.CONVERGED: EXIT_OK, Status.MAX_ITERATIONS: EXIT_MAXIT, Status.STAGNATED: EXIT_MAXIT,
               Status.BREAKDOWN: EXIT_BREAKDOWN}
NOT_SPD_HINT = ("hint: the symmetric part (or the matrix inside M) is not positive definite; "
                "try --method sd-minresn, a shifted preconditioner such as --pc shifted=1.01, "
                "or a smaller alpha")


class UsageError(Exception):
    pass


def _err(msg):
    print(f"sdkrylov: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# gen


def _build_problem(ns):
    p = ns.problem
    scaled = not ns.unscaled
    if p == "ode1d":
        _need(ns, "eps", "n")
        sol = runner.solution_choice(ns.solution or "xsinpix")
        return problems.gen_ode1d(ns.eps, ns.n, sol, scaled=scaled)
    if p == "pde-conv":
        _need(ns, "a", "n")
        sol = _solution_2d(ns.solution)
        return problems.gen_pde_convection(ns.a, ns.n, ns.scheme, sol, scaled=scaled)
    if p in ("pde-varcoef", "pde-indef"):
        _need(ns, "n")
        reaction = ns.reaction if ns.reaction is not None else (-200.0 if p == "pde-indef" else 0.0)
        return problems.gen_pde_varcoef(ns.n, reaction, _solution_2d(ns.solution),
                                        advection_coef=ns.advection_coef, scaled=scaled)
    if p == "example22":
        _need(ns, "eps")
        which = problems.Example22Lower(ns.eps) if ns.variant == "lower" else problems.Example22Upper(ns.eps)
        return _with_ones(problems.gen_example_matrices(which), f"example22 {ns.variant} eps={ns.eps:g}")
    if p == "symplectic":
        _need(ns, "eps", "n")
        fam = problems.SymplecticFamily(ns.n, ns.eps, ns.seed, identity_s=ns.identity_s)
        return _with_ones(problems.gen_example_matrices(fam), f"symplectic n={ns.n} eps={ns.eps:g}")
    raise UsageError(f"unknown problem {p!r}")


def _solution_2d(text):
    if text in (None, "manufactured"):
        return problems.Manufactured("sinsinexp")
    return runner.solution_choice(text)


def _with_ones(a, description):
    x = np.ones(a.n_rows)
    return problems.DiscretizedSystem(a, a @ x, x, float("nan"), a.n_rows, problems.Scheme.BACKWARD, description)


def _need(ns, *names):
    missing = [f"--{n}" for n in names if getattr(ns, n) is None]
    if missing:
        raise UsageError(f"--problem {ns.problem} requires {', '.join(missing)}")


def cmd_gen(ns):
    system = _build_problem(ns)
    try:
        mmio.write_matrix_market(ns.out + ".mtx", system.a, comment=system.description)
        mmio.write_vector(ns.out + ".rhs", system.b)
        if system.x_exact is not None:
            mmio.write_vector(ns.out + ".sol", system.x_exact)
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_IO
    print(f"{system.description}: {system.a.n_rows}x{system.a.n_cols}, nnz={system.a.nnz} -> {ns.out}.mtx")
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


def _load(path_mtx, path_rhs=None):
    try:
        a = mmio.read_matrix_market(path_mtx)
        b = mmio.read_vector(path_rhs) if path_rhs else None
    except (OSError, ValueError) as exc:
        raise _IOFailure(str(exc)) from None
    return a, b


class _IOFailure(Exception):
    pass


def _row_to_csv(row: runner.ReportRow, fh, header):
    fields = ("problem", "method", "preconditioner", "parameters", "iterations", "final_relative_residual",
              "original_system_residual", "wall_time_ms", "status")
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(fields)
    d = runner.row_dict(row)
    d["iterations"] = runner.format_iterations(row.iterations)
    for k in ("final_relative_residual", "original_system_residual"):
        d[k] = f"{d[k]:.6e}"
    d["wall_time_ms"] = f"{d['wall_time_ms']:.3f}"
    w.writerow([d[f] for f in fields])


def cmd_solve(ns):
    a, b = _load(ns.matrix, ns.rhs)
    if b.shape != (a.n_rows,):
        raise UsageError(f"rhs has {b.size} entries, matrix has {a.n_rows} rows")
    cfg = SolveConfig(tol=ns.tol, max_iterations=ns.maxit)
    t0 = time.perf_counter()
    try:
        rep = runner.solve_system(a, b, ns.method, ns.pc, cfg, ns.inner_tol)
        code = STATUS_EXIT[rep.status]
    except Diverged as exc:
        rep = exc.report
        code = EXIT_MAXIT
        _err("stationary iteration diverged")
    except InnerSolveFailed as exc:
        _err(str(exc))
        return EXIT_MAXIT
    wall = 1e3 * (time.perf_counter() - t0)
    params = f"tol={ns.tol:g};maxit={ns.maxit}" + (f";inner_tol={ns.inner_tol:g}" if ns.inner_tol else "")
    row = runner.ReportRow(ns.matrix, rep.method or ns.method, ns.pc or "", params, float(rep.iterations),
                           rep.final_relative_residual, rep.original_residual, wall, rep.status.value)
    _row_to_csv(row, sys.stdout, header=True)
    try:
        if ns.csv:
            new = not os.path.exists(ns.csv) or os.path.getsize(ns.csv) == 0
            with open(ns.csv, "a", newline="") as fh:
                _row_to_csv(row, fh, header=new)
        if ns.sol_out:
            mmio.write_vector(ns.sol_out, rep.solution)
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_IO
    return code


# ---------------------------------------------------------------------------
# cond


def cmd_cond(ns):
    a, _ = _load(ns.matrix)
    if not a.is_square:
        raise UsageError("matrix must be square")
    sp = split(a)
    out = {"kappa_A": analysis.condition_number(a)}
    code = EXIT_OK
    try:
        rep = analysis.kappa_bounds(sp)
        out.update(kappa_As=rep.kappa_s, kappa_tilde=rep.kappa_tilde, kappa1=rep.kappa1_bound,
                   kappa2=rep.kappa2_bound, lambda_min_As=rep.lambda_min_s, lambda_max_As=rep.lambda_max_s,
                   lambda_min_tilde=rep.lambda_min_tilde, lambda_max_tilde=rep.lambda_max_tilde)
    except NotPositiveDefinite:
        est = analysis.extreme_eigs(sp.s)
        out.update(lambda_min_As=est.lambda_min, lambda_max_As=est.lambda_max)
        try:
            out["kappa_tilde"] = analysis.selfdual_condition(sp)
        except (Singular, np.linalg.LinAlgError):
            pass
        out.update(kappa1=float("nan"), kappa2=float("nan"))
        _err("symmetric part is not positive definite; kappa1/kappa2 undefined")
        code = EXIT_NOT_SPD
    for k, v in out.items():
        print(f"{k}={v:.12g}")
    if ns.csv:
        try:
            with open(ns.csv, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["matrix"] + list(out))
                w.writerow([ns.matrix] + [f"{v:.12g}" for v in out.values()])
        except OSError as exc:
            _err(f"cannot write output: {exc}")
            return EXIT_IO
    return code


# ---------------------------------------------------------------------------
# table


def cmd_table(ns):
    plan = runner.get_plan(ns.id)
    seeds = [int(s) for s in ns.seeds.split(",")] if ns.seeds else None
    threads = ns.threads or runner.threads_from_env()
    started = time.time()
    rows = runner.run_plan(plan, {"tol": ns.tol, "max_iterations": ns.maxit, "seeds": seeds}, threads)
    prefix = ns.out or plan.table_id
    try:
        runner.write_outputs(plan, rows, prefix, started, threads)
    except OSError as exc:
        _err(f"cannot write output: {exc}")
        return EXIT_IO
    sys.stdout.write(runner.rows_to_markdown(plan, rows))
    checked = [r for r in rows if r.check]
    print(f"\n{sum(r.check == 'pass' for r in checked)}/{len(checked)} cells within tolerance; "
          f"wrote {prefix}.csv, {prefix}.md, {prefix}.meta.json")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _finite_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="sdkrylov", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a benchmark system")
    g.add_argument("--problem", required=True,
                   choices=["ode1d", "pde-conv", "pde-varcoef", "pde-indef", "example22", "symplectic"])
    g.add_argument("--eps", type=_finite_float)
    g.add_argument("--n", type=int)
    g.add_argument("--a", type=_finite_float, help="convection coefficient")
    g.add_argument("--scheme", choices=["backward", "centered"], default="backward")
    g.add_argument("--reaction", type=_finite_float)
    g.add_argument("--advection-coef", type=_finite_float, default=1.0)
    g.add_argument("--variant", choices=["lower", "upper"], default="lower")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--identity-s", action="store_true", help="symplectic family with A_s = I")
    g.add_argument("--solution", help="xsinpix | x1mx_cos | sinsinexp | manufactured | random[:seed]")
    g.add_argument("--unscaled", action="store_true", help="do not multiply equations by h^2")
    g.add_argument("--out", required=True, help="output prefix")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve a stored system")
    s.add_argument("--matrix", required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--method", required=True, choices=list(runner.METHODS))
    s.add_argument("--pc", help="selfdual | alpha=v | beta=v | offset=c | combined=a,b | shifted=a[,b] | normal")
    s.add_argument("--tol", type=_finite_float, default=1e-6)
    s.add_argument("--maxit", type=int, default=1000)
    s.add_argument("--inner-tol", type=_finite_float)
    s.add_argument("--csv", help="append the report row to this CSV file")
    s.add_argument("--sol-out", help="write the computed solution here")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("cond", help="condition numbers and bounds")
    c.add_argument("--matrix", required=True)
    c.add_argument("--csv")
    c.set_defaults(func=cmd_cond)

    t = sub.add_parser("table", help="reproduce a results table")
    t.add_argument("--id", required=True, help="T2 ... T9")
    t.add_argument("--out", help="output prefix (default: the table id)")
    t.add_argument("--tol", type=_finite_float)
    t.add_argument("--maxit", type=int)
    t.add_argument("--seeds", help="comma-separated seeds for random-solution rows")
    t.add_argument("--threads", type=int, help="case-level parallelism (default SDKRYLOV_THREADS or 1)")
    t.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with 2 on malformed flags
    try:
        return ns.func(ns)
    except (UsageError, InvalidParameter, NonSquare) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except _IOFailure as exc:
        _err(f"cannot read input: {exc}")
        return EXIT_IO
    except NotPositiveDefinite as exc:
        _err(str(exc))
        _err(NOT_SPD_HINT)
        return EXIT_NOT_SPD
    except SdKrylovError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_BREAKDOWN
