import math

import numpy as np
import pytest

from sdkrylov import InvalidParameter
from sdkrylov.bench.plans import PLANS, Case
from sdkrylov.bench.runner import (CSV_FIELDS, ReportRow, evaluate, format_iterations, get_plan, problem_label,
                                   rows_to_csv, rows_to_markdown, run_case, run_plan, solve_system, with_seed)
from sdkrylov.problems import gen_ode1d


def case(published, **kw):
    return Case("x", "r", "c", ("ode1d", 1e-2, 64, "xsinpix"), "esd-cgn", published=published, **kw)


@pytest.mark.parametrize("value,text", [(63.5, "63.5"), (22.0, "22"), (0, "0")])
def test_format_iterations(value, text):
    assert format_iterations(value) == text


class TestEvaluate:
    def test_absolute(self):
        assert evaluate(case("22", tol_abs=3), 24, "Converged")[2] == "pass"
        assert evaluate(case("22", tol_abs=3), 26, "Converged")[2] == "fail"

    def test_relative_default(self):
        assert evaluate(case("100"), 125, "Converged")[2] == "pass"
        assert evaluate(case("100"), 126, "Converged")[2] == "fail"

    def test_not_converged_fails_numeric(self):
        assert evaluate(case("100"), 100, "MaxIterations")[2] == "fail"

    def test_lower_bound(self):
        assert evaluate(case(">1000"), 5000, "MaxIterations")[2] == "pass"
        assert evaluate(case(">1000"), 400, "Converged")[2] == "fail"
        assert evaluate(case(">1000"), 1500, "Converged")[2] == "pass"

    def test_breakdown(self):
        assert evaluate(case("Breaks down"), 3, "Breakdown")[2] == "pass"
        assert evaluate(case("Breaks down"), 30, "Converged")[2] == "fail"

    def test_nan(self):
        assert evaluate(case("10"), math.nan, "NotPositiveDefinite")[2] == "fail"

    def test_no_reference(self):
        assert evaluate(case(None), 5, "Converged") == ("", "", "")


def test_plan_shapes():
    assert set(PLANS) == {f"T{i}" for i in range(2, 10)}
    t2 = PLANS["T2"]
    assert len(t2.rows) == 11 and len(t2.columns) == 6 and len(t2.cases) == 66
    for plan in PLANS.values():
        keys = [(c.row, c.column) for c in plan.cases]
        assert len(keys) == len(set(keys))
        assert all(c.row in plan.rows and c.column in plan.columns for c in plan.cases)


def test_get_plan():
    assert get_plan("t7").table_id == "T7"
    with pytest.raises(InvalidParameter):
        get_plan("T1")


def test_seed_substitution():
    assert with_seed(("pde-conv", 1.0, 49, "backward", "random"), 3)[-1] == "random:3"
    assert problem_label(("ode1d", 0.01, 64, "xsinpix")) == "ode1d:0.01:64:xsinpix"


def test_failed_case_becomes_row():
    bad = Case("T/x", "r", "c", ("pde-varcoef", 100, -2000.0), "esd-cgn", published="10")
    row = run_case(bad, "T")
    assert row.status == "NotPositiveDefinite" and row.check == "fail"


def test_random_rows_take_median():
    c = Case("T/x", "r", "c", ("pde-conv", 100.0, 49, "backward", "random"), "esd-cgn", seeds=(0, 1, 2))
    row = run_case(c)
    singles = [run_case(Case("s", "r", "c", with_seed(c.problem, s), "esd-cgn")).iterations for s in (0, 1, 2)]
    assert row.iterations == float(np.median(singles))


def test_csv_and_markdown():
    plan = PLANS["T3"]
    rows = run_plan(plan, {"tol": None, "max_iterations": None, "seeds": None}, threads=1)
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0].split(",") == list(CSV_FIELDS)
    assert len(lines) == 1 + len(plan.cases)
    md = rows_to_markdown(plan, rows)
    assert "| ESD-CGN | 37 [37] ok |" in md


def test_overrides_applied():
    plan = PLANS["T2"]
    rows = run_plan(plan, {"max_iterations": 3}, threads=1)
    assert all(r.iterations <= 3 or r.status != "Converged" for r in rows)


def test_solve_system_rejects_unknown():
    s = gen_ode1d(1e-2, 16)
    with pytest.raises(InvalidParameter):
        solve_system(s.a, s.b, "gmres")
    with pytest.raises(InvalidParameter):
        solve_system(s.a, s.b, "bicg", pc="alpha=0.5")


def test_report_row_fields():
    row = ReportRow("p", "m", "", "", 1.0, 0.0, 0.0, 1.0, "Converged")
    assert row.iterations >= 0
