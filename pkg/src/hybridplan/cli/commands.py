"""Planning commands behind the command-line interface.

Each ``cmd_*`` function takes a scenario path and returns a result object;
the ``plan``/``sweep``/``verify`` functions underneath work on in-memory
scenarios and are what the demos and tests call.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .. import oracle, scenario_io
from ..domain import DISPATCHABLE, Scenario
from ..formulation import (PlanResult, ScenarioInvalid, assemble, converter_coefficients,
                           decode)
from ..milp import SolveOptions, get_backend
from ..milp.solver import FEASIBLE_GAP, LIMIT, OPTIMAL

PARAMETERS = ("dc_ratio", "critical_ratio", "price_scale")


class PlanInfeasible(RuntimeError):
    def __init__(self, status: str):
        super().__init__(f"no feasible plan (solver status {status!r})")
        self.status = status


@dataclass(frozen=True)
class PlanOptions:
    gap: float = 1e-6
    time_limit: float | None = None
    node_limit: int | None = None
    seed: int = 0
    backend: str = "native"

    def solve_options(self) -> SolveOptions:
        return SolveOptions(relative_gap=self.gap, node_limit=self.node_limit,
                            time_limit=self.time_limit, deterministic_seed=self.seed)


def plan(scenario: Scenario, options: PlanOptions | None = None) -> PlanResult:
    """Assemble, solve and decode one scenario."""
    options = options or PlanOptions()
    pm = assemble(scenario)
    sol = get_backend(options.backend).solve(pm.model, options.solve_options())
    if sol.status not in (OPTIMAL, FEASIBLE_GAP, LIMIT) or sol.values is None:
        raise PlanInfeasible(sol.status)
    return decode(pm, sol)


def baseline_breakdown(scenario: Scenario) -> tuple[float, float]:
    """(energy, fixed) cost of serving the load without a microgrid.

    ``energy`` buys every hour's demand from the grid and sheds it when
    islanded. ``fixed`` is what the planning model charges even when nothing
    is built: rectifiers for the dc load on the existing ac feeders and the
    grid-interface charge. Their sum is the model cost of the null plan.
    """
    islanded = set(scenario.islanding.islanded_hours)
    energy = 0.0
    for t in range(scenario.num_hours):
        demand = scenario.load.demand_profile[t]
        rate = scenario.load.voll if t in islanded else scenario.market.price_profile[t]
        energy += scenario.horizon.hour_weights[t] * rate * demand
    years = scenario.horizon.years
    fixed = sum(converter_coefficients(scenario)["to_ac"].values())
    fixed += scenario.converters.grid_interface_unit_cost * scenario.market.exchange_limit
    return years * energy, years * fixed


def baseline_cost(scenario: Scenario) -> float:
    """Cost of serving the load from the grid alone, shedding it when islanded."""
    energy, fixed = baseline_breakdown(scenario)
    return energy + fixed


@dataclass(frozen=True)
class BaselineReport:
    baseline: float
    plan_total: float | None
    energy: float = math.nan
    fixed: float = 0.0

    @property
    def economical(self) -> bool:
        return self.plan_total is not None and self.plan_total < self.baseline

    @property
    def verdict(self) -> str:
        if self.plan_total is None:
            return "no feasible microgrid plan"
        return "microgrid economical" if self.economical else "microgrid not economical"


# -- sweeps ---------------------------------------------------------------------

def apply_parameter(scenario: Scenario, parameter: str, value: float) -> Scenario:
    if parameter == "dc_ratio":
        return dataclasses.replace(scenario,
                                   load=dataclasses.replace(scenario.load, dc_ratio=value))
    if parameter == "critical_ratio":
        return dataclasses.replace(scenario,
                                   load=dataclasses.replace(scenario.load, critical_ratio=value))
    if parameter == "price_scale":
        prices = tuple(p * value for p in scenario.market.price_profile)
        return dataclasses.replace(scenario,
                                   market=dataclasses.replace(scenario.market, price_profile=prices))
    raise ValueError(f"unknown sweep parameter {parameter!r}; choose from {PARAMETERS}")


def check_values(parameter: str, values) -> tuple[float, ...]:
    if parameter not in PARAMETERS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; choose from {PARAMETERS}")
    values = tuple(float(v) for v in values)
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{parameter} value {v!r} is not finite")
        if parameter in ("dc_ratio", "critical_ratio") and not 0.0 <= v <= 1.0:
            raise ValueError(f"{parameter} value {v!r} outside [0, 1]")
        if parameter == "price_scale" and v < 0.0:
            raise ValueError(f"price_scale value {v!r} is negative")
    for a, b in zip(values, values[1:]):
        if not b > a:
            raise ValueError(f"{parameter} values must be strictly increasing ({a!r}, {b!r})")
    return values


def parse_values(text: str) -> tuple[float, ...]:
    """``"a,b,c"`` -> (a, b, c)."""
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"bad value list {text!r}") from None


def parse_range(text: str) -> tuple[float, ...]:
    """``"lo:hi:step"`` -> lo, lo+step, ... up to and including hi."""
    try:
        lo, hi, step = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise ValueError(f"bad range {text!r}; expected lo:hi:step") from None
    if not step > 0 or hi < lo:
        raise ValueError(f"bad range {text!r}; need step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 12) for i in range(count))


@dataclass(frozen=True)
class SweepRow:
    value: float
    status: str
    plan: PlanResult | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.plan is not None


@dataclass(frozen=True)
class SweepReport:
    parameter: str
    rows: tuple

    def column(self, name: str) -> list:
        out = []
        for r in self.rows:
            if r.plan is None:
                out.append(None)
            elif name == "dc_feeder_count":
                out.append(r.plan.dc_feeder_count)
            elif name == "dispatchable_capacity":
                out.append(r.plan.capacity(DISPATCHABLE))
            else:
                out.append(getattr(r.plan.cost_breakdown, name))
        return out

    def summary(self) -> list[str]:
        checks = {
            "dc_ratio": [("dc_feeder_count", 1)],
            "critical_ratio": [("dispatchable_capacity", 1)],
            "price_scale": [("investment", 1), ("operation", -1)],
        }[self.parameter]
        lines = []
        for name, sign in checks:
            col = [v for v in self.column(name) if v is not None]
            ok = all(sign * (b - a) >= -1e-6 * max(1.0, abs(a)) for a, b in zip(col, col[1:]))
            word = "nondecreasing" if sign > 0 else "nonincreasing"
            lines.append(f"{name} {word} over {self.parameter}: {'yes' if ok else 'no'}")
        flagged = sum(1 for r in self.rows if r.plan is None)
        if flagged:
            lines.append(f"{flagged} point(s) without a plan")
        return lines


def _sweep_point(args) -> SweepRow:
    scenario, parameter, value, options = args
    try:
        result = plan(apply_parameter(scenario, parameter, value), options)
    except PlanInfeasible as exc:
        return SweepRow(value, exc.status, None, str(exc))
    except ScenarioInvalid as exc:
        return SweepRow(value, "invalid", None, str(exc))
    return SweepRow(value, result.solver_stats.status, result)


def sweep(scenario: Scenario, parameter: str, values, options: PlanOptions | None = None,
          workers: int = 1) -> SweepReport:
    """One full plan per value; failed points are flagged in their row."""
    values = check_values(parameter, values)
    options = options or PlanOptions()
    jobs = [(scenario, parameter, v, options) for v in values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(job) for job in jobs]
    return SweepReport(parameter, tuple(rows))


def verify(scenario: Scenario, options: PlanOptions | None = None) -> oracle.OracleReport:
    """Solve with the branch-and-bound and check it against exhaustive enumeration."""
    options = options or PlanOptions()
    count = oracle.enumerable_binaries(scenario)
    if count > oracle.MAX_BINARIES:
        raise oracle.OracleSizeError(count)
    pm = assemble(scenario)
    sol = get_backend(options.backend).solve(pm.model, options.solve_options())
    return oracle.compare(scenario, sol)


# -- path-based commands ----------------------------------------------------------

def cmd_plan(scenario_path, options: PlanOptions | None = None, out=None,
             format: str = "machine") -> PlanResult:
    result = plan(scenario_io.load_scenario(scenario_path), options)
    if out is not None:
        scenario_io.write_result(result, out, format)
    return result


def cmd_baseline(scenario_path, options: PlanOptions | None = None) -> BaselineReport:
    scenario = scenario_io.load_scenario(scenario_path)
    try:
        total = plan(scenario, options).cost_breakdown.total
    except PlanInfeasible:
        total = None
    energy, fixed = baseline_breakdown(scenario)
    return BaselineReport(energy + fixed, total, energy, fixed)


def cmd_sweep(scenario_path, parameter: str, values, options: PlanOptions | None = None,
              out=None, format: str = "machine", workers: int = 1) -> SweepReport:
    values = check_values(parameter, values)
    report = sweep(scenario_io.load_scenario(scenario_path), parameter, values, options, workers)
    if out is not None:
        scenario_io.write_result(report, out, format)
    return report


def cmd_verify(scenario_path, options: PlanOptions | None = None) -> oracle.OracleReport:
    return verify(scenario_io.load_scenario(scenario_path), options)
