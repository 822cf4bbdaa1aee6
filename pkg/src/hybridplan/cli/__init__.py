"""Command-line front end and the planning commands behind it."""

from .commands import (BaselineReport, PlanInfeasible, PlanOptions, SweepReport, SweepRow,
                       apply_parameter, baseline_breakdown, baseline_cost, cmd_baseline,
                       cmd_plan, cmd_sweep, cmd_verify, plan, sweep, verify)
from .main import main

__all__ = ["BaselineReport", "PlanInfeasible", "PlanOptions", "SweepReport", "SweepRow",
           "apply_parameter", "baseline_breakdown", "baseline_cost", "cmd_baseline",
           "cmd_plan", "cmd_sweep", "cmd_verify", "main", "plan", "sweep", "verify"]
