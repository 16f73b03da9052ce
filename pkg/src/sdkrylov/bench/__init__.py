"""Experiment registry and table runner."""
from .plans import PLANS, Case, TablePlan
from .runner import ReportRow, run_case, run_plan, solve_system

__all__ = ["PLANS", "Case", "TablePlan", "ReportRow", "run_case", "run_plan", "solve_system"]
