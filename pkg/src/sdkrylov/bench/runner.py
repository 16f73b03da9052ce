"""Run experiment cases and write CSV, markdown and metadata outputs."""
from __future__ import annotations

import csv
import io
import json
import os
import platform
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from functools import lru_cache

import numpy as np

from .. import __version__, problems
from .._accel import USE_NUMBA
from ..errors import InvalidParameter, NotPositiveDefinite, SdKrylovError
from ..krylov import SolveConfig, Status, baseline_solve, cg, minres, stationary_iteration, \
    symmetric_part_preconditioner
from ..linalg.sparse import split
from ..selfdual import PreconditionerSpec, build_selfdual_system, esd_cgn, isd_cgn, iterated_cg, sd_cgn, \
    sd_minresn
from .plans import DEFAULT_TOL_REL, PLANS, Case, TablePlan

CSV_FIELDS = ("table", "case_id", "problem", "method", "preconditioner", "parameters", "row", "column",
              "iterations", "status", "final_relative_residual", "original_system_residual", "published", "diff",
              "tolerance", "check")

BASELINES = {"cgne": "CGNE", "cgnr": "CGNR", "bicg": "BiCG", "cgs": "CGS", "bicgstab": "BiCGSTAB", "qmr": "QMR"}
METHODS = ("esd-cgn", "isd-cgn", "sd-minresn", "cg", "minres", "iterated-cg", "stationary") + tuple(BASELINES)


def solution_choice(text):
    """``random:<seed>`` / ``random`` or a manufactured formula id."""
    if text == "random":
        return problems.Random(0)
    if text.startswith("random:"):
        return problems.Random(int(text.split(":", 1)[1]))
    return problems.Manufactured(text)


@lru_cache(maxsize=32)
def make_problem(ref: tuple) -> problems.DiscretizedSystem:
    kind = ref[0]
    if kind == "ode1d":
        _, eps, n, sol = ref
        return problems.gen_ode1d(eps, n, solution_choice(sol))
    if kind == "pde-conv":
        _, a, n, scheme, sol = ref
        return problems.gen_pde_convection(a, n, scheme, solution_choice(sol))
    if kind == "pde-varcoef":
        _, n, reaction = ref[:3]
        sol = ref[3] if len(ref) > 3 else "sinsinexp"
        return problems.gen_pde_varcoef(n, reaction, solution_choice(sol))
    raise InvalidParameter(f"unknown problem kind {kind!r}")


def with_seed(ref: tuple, seed) -> tuple:
    """Replace a ``random`` solution in a problem reference by ``random:<seed>``."""
    return tuple(f"random:{seed}" if v == "random" else v for v in ref)


def problem_label(ref: tuple) -> str:
    return ":".join(f"{v:g}" if isinstance(v, float) else str(v) for v in ref)


def solve_system(a, b, method, pc=None, cfg=None, inner_tol=None):
    """Dispatch one solve by CLI method name; returns a SolveReport."""
    cfg = cfg or SolveConfig()
    if method == "esd-cgn":
        return esd_cgn(a, b, cfg=cfg)
    if method == "isd-cgn":
        return isd_cgn(a, b, inner_tol=inner_tol or 1e-7, cfg=cfg)
    if method == "sd-minresn":
        return sd_minresn(a, b, PreconditionerSpec.parse(pc or "selfdual"), cfg)
    if method == "cg":
        if pc is None:
            return cg(a, b, cfg=cfg)
        return sd_cgn(build_selfdual_system(a, b, PreconditionerSpec.parse(pc)), cfg,
                      method=f"SD-CGN[{pc}]")
    if method == "minres":
        if pc is None:
            return minres(a, b, cfg=cfg)
        return sd_minresn(a, b, PreconditionerSpec.parse(pc), cfg)
    if method == "iterated-cg":
        return iterated_cg(a, b, cfg)
    if method == "stationary":
        variant = pc if pc in ("first_order", "squared") else "first_order"
        return stationary_iteration(split(a), b, variant, cfg)
    if method in BASELINES:
        precond = None
        if pc is not None:
            if pc != "selfdual":
                raise InvalidParameter("baseline methods accept only --pc selfdual (symmetric part)")
            precond = symmetric_part_preconditioner(split(a).s)
        return baseline_solve(BASELINES[method], a, b, precond=precond, cfg=cfg)
    raise InvalidParameter(f"unknown method {method!r}")


@dataclass
class ReportRow:
    problem: str
    method: str
    preconditioner: str
    parameters: str
    iterations: float
    final_relative_residual: float
    original_system_residual: float
    wall_time_ms: float
    status: str
    table: str = ""
    case_id: str = ""
    row: str = ""
    column: str = ""
    published: str = ""
    diff: str = ""
    tolerance: str = ""
    check: str = ""


def format_iterations(it) -> str:
    it = float(it)
    return f"{it:.1f}" if it != int(it) else str(int(it))


def _fmt_float(v) -> str:
    return f"{v:.6e}" if np.isfinite(v) else str(v)


def evaluate(case: Case, iterations: float, status: str):
    """Return ``(diff, tolerance, check)`` strings for a published comparison."""
    p = case.published
    if p is None:
        return "", "", ""
    if p.startswith(">"):
        bound = float(p[1:])
        failed = status != Status.CONVERGED.value or iterations > bound
        return "", p, "pass" if failed else "fail"
    if p == "Breaks down":
        return "", p, "pass" if status == Status.BREAKDOWN.value else "fail"
    ref = float(p)
    if case.tol_abs is not None:
        tol, tol_txt = case.tol_abs, f"+-{case.tol_abs:g}"
    else:
        rel = case.tol_rel if case.tol_rel is not None else DEFAULT_TOL_REL
        tol, tol_txt = rel * ref, f"+-{rel * 100:g}%"
    if not np.isfinite(iterations):
        return "", tol_txt, "fail"
    diff = iterations - ref
    ok = status == Status.CONVERGED.value and abs(diff) <= tol + 1e-9
    return format_iterations(diff) if diff == int(diff) else f"{diff:.1f}", tol_txt, "pass" if ok else "fail"


def _run_once(case: Case, ref: tuple):
    sysm = make_problem(ref)
    cfg = SolveConfig(tol=case.tol, max_iterations=case.max_iterations)
    try:
        rep = solve_system(sysm.a, sysm.b, case.method, case.pc, cfg, case.inner_tol)
        return (float(rep.iterations), rep.status.value, rep.final_relative_residual, rep.original_residual)
    except NotPositiveDefinite:
        return (float("nan"), "NotPositiveDefinite", float("nan"), float("nan"))
    except SdKrylovError as exc:
        return (float("nan"), type(exc).__name__, float("nan"), float("nan"))


def run_case(case: Case, table_id: str = "") -> ReportRow:
    t0 = time.perf_counter()
    if case.seeds:
        outs = [_run_once(case, with_seed(case.problem, s)) for s in case.seeds]
        its = statistics.median(o[0] for o in outs)
        statuses = {o[1] for o in outs}
        status = statuses.pop() if len(statuses) == 1 else "Mixed"
        # residuals of the median-iteration run
        pick = sorted(outs, key=lambda o: o[0])[len(outs) // 2]
        res_t, res_o = pick[2], pick[3]
    else:
        its, status, res_t, res_o = _run_once(case, case.problem)
    wall = 1e3 * (time.perf_counter() - t0)
    diff, tol, check = evaluate(case, its, status)
    return ReportRow(problem_label(case.problem), case.method, case.pc or "", case.parameters, its, res_t, res_o,
                     wall, status, table_id, case.case_id, case.row, case.column, case.published or "", diff, tol, check)


def _run_indexed(args):
    case, table_id = args
    return run_case(case, table_id)


def _apply_overrides(case: Case, overrides: dict) -> Case:
    kw = {}
    if overrides.get("tol") is not None:
        kw["tol"] = float(overrides["tol"])
    if overrides.get("max_iterations") is not None:
        kw["max_iterations"] = int(overrides["max_iterations"])
    if overrides.get("seeds") is not None and case.seeds:
        kw["seeds"] = tuple(overrides["seeds"])
    return replace(case, **kw)


def threads_from_env() -> int:
    raw = os.environ.get("SDKRYLOV_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidParameter(f"SDKRYLOV_THREADS must be an integer, got {raw!r}") from None


def run_plan(plan: TablePlan, overrides: dict | None = None, threads: int | None = None) -> list[ReportRow]:
    """Run every case; per-case failures become rows, never exceptions."""
    cases = [_apply_overrides(c, overrides or {}) for c in plan.cases]
    threads = threads or threads_from_env()
    jobs = [(c, plan.table_id) for c in cases]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_indexed, jobs))
    return [_run_indexed(j) for j in jobs]


def rows_to_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([r.table, r.case_id, r.problem, r.method, r.preconditioner, r.parameters, r.row, r.column,
                    format_iterations(r.iterations) if np.isfinite(r.iterations) else "nan", r.status,
                    _fmt_float(r.final_relative_residual), _fmt_float(r.original_system_residual), r.published,
                    r.diff, r.tolerance, r.check])
    return buf.getvalue()


def _cell(r: ReportRow) -> str:
    if r.status == Status.CONVERGED.value:
        ours = format_iterations(r.iterations)
    elif r.status == Status.MAX_ITERATIONS.value:
        ours = f">{int(r.iterations)}" if np.isfinite(r.iterations) else "max-it"
    elif r.status == Status.BREAKDOWN.value:
        ours = "Breaks down"
    else:
        ours = r.status
    if r.published:
        mark = {"pass": "ok", "fail": "MISS"}.get(r.check, "")
        return f"{ours} [{r.published}] {mark}".rstrip()
    return ours


def rows_to_markdown(plan: TablePlan, rows: list[ReportRow]) -> str:
    by_key = {(r.row, r.column): r for r in rows}
    out = [f"### {plan.table_id}: {plan.caption}", "", "Cells: ours [published] ok/MISS", ""]
    out.append("| " + " | ".join((plan.row_header,) + plan.columns) + " |")
    out.append("|" + "---|" * (len(plan.columns) + 1))
    for row in plan.rows:
        cells = [_cell(by_key[(row, col)]) if (row, col) in by_key else "" for col in plan.columns]
        out.append("| " + " | ".join([row] + cells) + " |")
    return "\n".join(out) + "\n"


def metadata(plan: TablePlan, rows: list[ReportRow], started: float, threads: int) -> dict:
    return {
        "table": plan.table_id,
        "started_unix": started,
        "elapsed_s": time.time() - started,
        "threads": threads,
        "numba": USE_NUMBA,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "wall_time_ms": {r.case_id: round(r.wall_time_ms, 3) for r in rows},
    }


def write_outputs(plan: TablePlan, rows: list[ReportRow], prefix: str, started: float, threads: int):
    """``<prefix>.csv``, ``<prefix>.md`` and ``<prefix>.meta.json``."""
    with open(prefix + ".csv", "w", newline="") as fh:
        fh.write(rows_to_csv(rows))
    with open(prefix + ".md", "w") as fh:
        fh.write(rows_to_markdown(plan, rows))
    with open(prefix + ".meta.json", "w") as fh:
        json.dump(metadata(plan, rows, started, threads), fh, indent=2, sort_keys=True)
        fh.write("\n")


def get_plan(table_id: str) -> TablePlan:
    try:
        return PLANS[table_id.upper()]
    except KeyError:
        raise InvalidParameter(f"unknown table id {table_id!r}; choose from {', '.join(PLANS)}") from None


def row_dict(r: ReportRow) -> dict:
    return asdict(r)
