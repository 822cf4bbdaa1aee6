"""Scenario -> MILP translation and solution decoding.

Variable families (``u`` ranges over DERs then storages, ``k`` over feeders,
``t`` over representative hours):

    x[u,k]   binary   unit u connected to feeder k
    z[k]     binary   feeder k is dc
    y[u,k]   binary   x[u,k] * z[k]
    cap[u]   MW       installed rating
    seg[i,s,t]        dispatchable output in cost segment s
    won[i,t], woff[i,t]   DER output routed through a dc / ac feeder
    dison, disoff, chon, choff [j,t]   storage flows through a dc / ac feeder
    soc[j,t] MWh      end-of-hour state of charge
    gin[t], gout[t]   grid import / export
    shed[t]           curtailed non-critical load

A unit is on a dc feeder iff ``sum_k y[u,k] = 1`` and on an ac feeder iff
``sum_k (x[u,k] - y[u,k]) = 1``; these two sums gate the routed flows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import domain
from .domain import DISPATCHABLE, RENEWABLE, Scenario
from .milp.model import MilpModel, ModelBuilder
from .milp.solver import FEASIBLE_GAP, LIMIT, OPTIMAL, Solution

DECODE_TOL = 1e-6


class ScenarioInvalid(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid scenario: " + "; ".join(map(str, self.violations)))


class DecodeError(RuntimeError):
    pass


# -- linear expressions --------------------------------------------------------
# An expression is a dict {var index: coef}; the key ``None`` holds a constant.

def _add(expr, j, coef):
    expr[j] = expr.get(j, 0.0) + coef


def _emit(b: ModelBuilder, expr: dict, sense: str, rhs: float = 0.0) -> int:
    """Add ``expr (sense) rhs`` with the constant moved to the right."""
    const = expr.get(None, 0.0)
    terms = {j: c for j, c in expr.items() if j is not None}
    return b.add_row(terms, sense, rhs - const)


def linearize_binary_product(b: ModelBuilder, x: int, z: int, name: str) -> int:
    """New binary ``y`` with ``y = x*z`` at every integral point."""
    y = b.add_var(name, binary=True)
    b.add_row({y: 1.0, x: -1.0}, "<=", 0.0)
    b.add_row({y: 1.0, z: -1.0}, "<=", 0.0)
    b.add_row({y: 1.0, x: -1.0, z: -1.0}, ">=", -1.0)
    return y


def linearize_continuous_switch(b: ModelBuilder, p: dict, gate_on: dict, bound: float,
                                name: str, gate_off: dict | None = None) -> tuple[int, int]:
    """Split ``p`` into ``(w_on, w_off)`` routed by a 0/1 gate.

    ``w_on + w_off = p``, ``w_on <= bound*gate_on`` and
    ``w_off <= bound*gate_off`` where ``gate_off`` defaults to
    ``1 - gate_on``. With a binary gate this gives ``w_on = p*gate`` and
    ``w_off = p*(1-gate)``.
    """
    if not (isinstance(bound, (int, float)) and math.isfinite(bound) and bound > 0):
        raise ValueError(f"switch {name!r} needs a finite positive bound, got {bound!r}")
    if gate_off is None:
        gate_off = {j: -c for j, c in gate_on.items()}
        gate_off[None] = gate_off.get(None, 0.0) + 1.0
    w_on = b.add_var(f"won[{name}]", 0.0, bound)
    w_off = b.add_var(f"woff[{name}]", 0.0, bound)
    link = {j: -c for j, c in p.items()}
    _add(link, w_on, 1.0)
    _add(link, w_off, 1.0)
    _emit(b, link, "=")
    _gate(b, {w_on: 1.0}, gate_on, bound)
    _gate(b, {w_off: 1.0}, gate_off, bound)
    return w_on, w_off


def _gate(b, flows: dict, gate: dict, bound: float):
    row = dict(flows)
    for j, c in gate.items():
        _add(row, j, -bound * c)
    _emit(b, row, "<=")


# -- variable map ---------------------------------------------------------------

@dataclass
class VariableMap:
    x: dict = field(default_factory=dict)
    z: dict = field(default_factory=dict)
    y: dict = field(default_factory=dict)
    cap: dict = field(default_factory=dict)
    seg: dict = field(default_factory=dict)
    won: dict = field(default_factory=dict)
    woff: dict = field(default_factory=dict)
    dison: dict = field(default_factory=dict)
    disoff: dict = field(default_factory=dict)
    chon: dict = field(default_factory=dict)
    choff: dict = field(default_factory=dict)
    soc: dict = field(default_factory=dict)
    gin: dict = field(default_factory=dict)
    gout: dict = field(default_factory=dict)
    shed: dict = field(default_factory=dict)

    def on_dc(self, uid, feeders) -> dict:
        return {self.y[uid, k]: 1.0 for k in feeders}

    def on_ac(self, uid, feeders) -> dict:
        expr = {}
        for k in feeders:
            _add(expr, self.x[uid, k], 1.0)
            _add(expr, self.y[uid, k], -1.0)
        return expr


@dataclass
class PlanningModel:
    """An assembled model plus the bookkeeping needed to decode it."""

    scenario: Scenario
    model: MilpModel
    vars: VariableMap
    balance_rows: list
    investment: dict
    converter: dict
    operation: dict
    reliability: dict


def _allocate(s: Scenario, b: ModelBuilder) -> VariableMap:
    vm = VariableMap()
    feeders = [f.id for f in s.feeders]
    units = s.unit_ids
    for k in feeders:
        vm.z[k] = b.add_var(f"z[{k}]", binary=True)
    for u in units:
        for k in feeders:
            vm.x[u, k] = b.add_var(f"x[{u},{k}]", binary=True)
    for u in units:
        for k in feeders:
            vm.y[u, k] = linearize_binary_product(b, vm.x[u, k], vm.z[k], f"y[{u},{k}]")
    for d in s.ders:
        vm.cap[d.id] = b.add_var(f"cap[{d.id}]", 0.0, d.capacity_max)
    for st in s.storages:
        vm.cap[st.id] = b.add_var(f"cap[{st.id}]", 0.0, st.power_max)
    return vm


def _der_switch_bound(d) -> float:
    return d.capacity_max


def build_der_constraints(s: Scenario, vm: VariableMap, b: ModelBuilder) -> None:
    feeders = [f.id for f in s.feeders]
    units = [(d.id, d.capacity_max) for d in s.ders] + [(st.id, st.power_max) for st in s.storages]
    for uid, cmax in units:
        b.add_row({vm.x[uid, k]: 1.0 for k in feeders}, "<=", 1.0)
        row = {vm.cap[uid]: 1.0}
        for k in feeders:
            row[vm.x[uid, k]] = -cmax
        b.add_row(row, "<=", 0.0)
    for group, limit in sorted(s.capacity_groups.items()):
        members = [vm.cap[d.id] for d in s.ders if d.capacity_group == group]
        if members:
            b.add_row({j: 1.0 for j in members}, "<=", limit)

    for d in s.ders:
        for t in range(s.num_hours):
            if d.capacity_max > 0:
                if d.kind == DISPATCHABLE:
                    p = {}
                    for si, (width, _) in enumerate(d.cost_segments):
                        j = b.add_var(f"seg[{d.id},{si},{t}]", 0.0, width)
                        vm.seg[d.id, si, t] = j
                        b.add_row({j: 1.0, vm.cap[d.id]: -width / d.capacity_max}, "<=", 0.0)
                        p[j] = 1.0
                    if sum(w for w, _ in d.cost_segments) > d.capacity_max:
                        row = dict(p)
                        row[vm.cap[d.id]] = -1.0
                        b.add_row(row, "<=", 0.0)
                else:
                    p = None
                won, woff = _route(b, vm, d.id, feeders, p, d.capacity_max, t)
                if d.kind == RENEWABLE:
                    avail = s.profiles[d.profile_id][t]
                    b.add_row({won: 1.0, woff: 1.0, vm.cap[d.id]: -avail}, "<=", 0.0)
            else:
                # zero-capacity candidate: no flows, keep names stable
                vm.won[d.id, t] = b.add_var(f"won[{d.id},{t}]", 0.0, 0.0)
                vm.woff[d.id, t] = b.add_var(f"woff[{d.id},{t}]", 0.0, 0.0)
                if d.kind == DISPATCHABLE:
                    for si in range(len(d.cost_segments)):
                        vm.seg[d.id, si, t] = b.add_var(f"seg[{d.id},{si},{t}]", 0.0, 0.0)


def _route(b, vm, uid, feeders, p, bound, t):
    """Routed output pair for one DER-hour (``p`` None: output is the pair sum)."""
    name = f"{uid},{t}"
    if p is None:
        won = b.add_var(f"won[{name}]", 0.0, bound)
        woff = b.add_var(f"woff[{name}]", 0.0, bound)
        _gate(b, {won: 1.0}, vm.on_dc(uid, feeders), bound)
        _gate(b, {woff: 1.0}, vm.on_ac(uid, feeders), bound)
    else:
        won, woff = linearize_continuous_switch(b, p, vm.on_dc(uid, feeders), bound, name,
                                                gate_off=vm.on_ac(uid, feeders))
    vm.won[uid, t] = won
    vm.woff[uid, t] = woff
    return won, woff


def build_storage_constraints(s: Scenario, vm: VariableMap, b: ModelBuilder) -> None:
    feeders = [f.id for f in s.feeders]
    for st in s.storages:
        pmax = st.power_max
        emax = pmax * st.energy_per_power
        for t in range(s.num_hours):
            name = f"{st.id},{t}"
            vm.dison[st.id, t] = b.add_var(f"dison[{name}]", 0.0, pmax)
            vm.disoff[st.id, t] = b.add_var(f"disoff[{name}]", 0.0, pmax)
            vm.chon[st.id, t] = b.add_var(f"chon[{name}]", 0.0, pmax)
            vm.choff[st.id, t] = b.add_var(f"choff[{name}]", 0.0, pmax)
            vm.soc[st.id, t] = b.add_var(f"soc[{name}]", 0.0, st.soc_max * emax)
        if pmax <= 0:
            continue
        for period in s.horizon.periods():
            hours = list(period)
            for pos, t in enumerate(hours):
                prev = hours[pos - 1]  # cyclic within the period
                dis = {vm.dison[st.id, t]: 1.0, vm.disoff[st.id, t]: 1.0}
                ch = {vm.chon[st.id, t]: 1.0, vm.choff[st.id, t]: 1.0}
                row = {vm.soc[st.id, t]: 1.0}
                _add(row, vm.soc[st.id, prev], -1.0)
                for j in ch:
                    _add(row, j, -st.charge_efficiency)
                for j in dis:
                    _add(row, j, 1.0 / st.discharge_efficiency)
                b.add_row(row, "=", 0.0)
                b.add_row({**dis, vm.cap[st.id]: -1.0}, "<=", 0.0)
                b.add_row({**ch, vm.cap[st.id]: -1.0}, "<=", 0.0)
                _gate(b, {vm.dison[st.id, t]: 1.0, vm.chon[st.id, t]: 1.0},
                      vm.on_dc(st.id, feeders), pmax)
                _gate(b, {vm.disoff[st.id, t]: 1.0, vm.choff[st.id, t]: 1.0},
                      vm.on_ac(st.id, feeders), pmax)
                e = st.energy_per_power
                b.add_row({vm.soc[st.id, t]: 1.0, vm.cap[st.id]: -st.soc_max * e}, "<=", 0.0)
                b.add_row({vm.soc[st.id, t]: 1.0, vm.cap[st.id]: -st.soc_min * e}, ">=", 0.0)


def build_grid_and_reliability_constraints(s: Scenario, vm: VariableMap, b: ModelBuilder) -> None:
    islanded = set(s.islanding.islanded_hours)
    limit = s.market.exchange_limit
    for t in range(s.num_hours):
        cap = 0.0 if t in islanded else limit
        vm.gin[t] = b.add_var(f"gin[{t}]", 0.0, cap)
        vm.gout[t] = b.add_var(f"gout[{t}]", 0.0, cap)
        demand = s.load.demand_profile[t]
        vm.shed[t] = b.add_var(f"shed[{t}]", 0.0, demand * (1.0 - s.load.critical_ratio))


def build_load_balance(s: Scenario, vm: VariableMap, b: ModelBuilder) -> list[int]:
    """One system-wide balance row per hour; returns the row indices."""
    cv = s.converters
    rows = []
    for t in range(s.num_hours):
        expr = {}
        for d in s.ders:
            if d.native_bus == "ac":
                _add(expr, vm.won[d.id, t], cv.eta_rec)
                _add(expr, vm.woff[d.id, t], 1.0)
            else:
                _add(expr, vm.won[d.id, t], 1.0)
                _add(expr, vm.woff[d.id, t], cv.eta_inv)
        for st in s.storages:
            # discharge loses through the converter, charging draws extra through it
            if st.native_bus == "ac":
                on_out, on_in, off_out, off_in = cv.eta_rec, 1.0 / cv.eta_inv, 1.0, 1.0
            else:
                on_out, on_in, off_out, off_in = 1.0, 1.0, cv.eta_inv, 1.0 / cv.eta_rec
            _add(expr, vm.dison[st.id, t], on_out)
            _add(expr, vm.chon[st.id, t], -on_in)
            _add(expr, vm.disoff[st.id, t], off_out)
            _add(expr, vm.choff[st.id, t], -off_in)
        _add(expr, vm.gin[t], 1.0)
        _add(expr, vm.gout[t], -1.0)
        _add(expr, vm.shed[t], 1.0)
        rows.append(_emit(b, expr, "=", s.load.demand_profile[t]))
    return rows


def converter_coefficients(s: Scenario) -> dict:
    """Annual converter cost coefficients.

    ``der[u]``: cost of placing unit u on an opposite-type feeder.
    ``to_dc[k]``: cost of making feeder k dc (inverters for its ac load).
    ``to_ac[k]``: cost of leaving feeder k ac (rectifiers for its dc load).
    """
    cv = s.converters
    peak = s.load.peak
    dc_peak = peak * s.load.dc_ratio
    ac_peak = peak - dc_peak
    der = {}
    for d in s.ders:
        unit = cv.der_rectifier_cost if d.native_bus == "ac" else cv.der_inverter_cost
        der[d.id] = unit * d.capacity_max
    for st in s.storages:
        unit = cv.der_rectifier_cost if st.native_bus == "ac" else cv.der_inverter_cost
        der[st.id] = unit * st.power_max
    to_dc = {f.id: cv.inverter_unit_cost * f.ac_load_share * ac_peak for f in s.feeders}
    to_ac = {f.id: cv.rectifier_unit_cost * f.dc_load_share * dc_peak for f in s.feeders}
    return {"der": der, "to_dc": to_dc, "to_ac": to_ac}


def _native(s: Scenario) -> dict:
    out = {d.id: d.native_bus for d in s.ders}
    out.update({st.id: st.native_bus for st in s.storages})
    return out


def build_investment_objective(s: Scenario, vm: VariableMap) -> tuple[dict, dict]:
    """(total investment, converter part) as expressions over the horizon."""
    years = s.horizon.years
    coef = converter_coefficients(s)
    native = _native(s)
    total, conv = {}, {}
    for d in s.ders:
        _add(total, vm.cap[d.id], years * d.annualized_capital_cost)
    for st in s.storages:
        _add(total, vm.cap[st.id], years * st.annualized_capital_cost)
    for u in s.unit_ids:
        c = years * coef["der"][u]
        for f in s.feeders:
            if native[u] == "ac":
                _add(conv, vm.y[u, f.id], c)
            else:
                _add(conv, vm.x[u, f.id], c)
                _add(conv, vm.y[u, f.id], -c)
    for f in s.feeders:
        _add(conv, vm.z[f.id], years * coef["to_dc"][f.id])
        _add(conv, vm.z[f.id], -years * coef["to_ac"][f.id])
        _add(conv, None, years * coef["to_ac"][f.id])
    for j, c in conv.items():
        _add(total, j, c)
    grid_fixed = years * s.converters.grid_interface_unit_cost * s.market.exchange_limit
    if grid_fixed:
        _add(total, None, grid_fixed)
    return total, conv


def build_operation_objective(s: Scenario, vm: VariableMap) -> tuple[dict, dict]:
    """(operation, reliability) expressions over the horizon.

    Exports earn the hourly price (net metering), so they enter with a
    negative sign.
    """
    years = s.horizon.years
    op, rel = {}, {}
    for t in range(s.num_hours):
        w = years * s.horizon.hour_weights[t]
        price = s.market.price_profile[t]
        for d in s.ders:
            if d.kind == DISPATCHABLE:
                for si, (_, mc) in enumerate(d.cost_segments):
                    _add(op, vm.seg[d.id, si, t], w * mc)
        _add(op, vm.gin[t], w * price)
        _add(op, vm.gout[t], -w * price)
        _add(rel, vm.shed[t], w * s.load.voll)
    return op, rel


def assemble(s: Scenario) -> PlanningModel:
    """Build the full planning MILP; raises :class:`ScenarioInvalid`."""
    violations = domain.validate(s)
    if violations:
        raise ScenarioInvalid(violations)
    b = ModelBuilder()
    vm = _allocate(s, b)
    build_der_constraints(s, vm, b)
    build_storage_constraints(s, vm, b)
    build_grid_and_reliability_constraints(s, vm, b)
    balance = build_load_balance(s, vm, b)
    investment, converter = build_investment_objective(s, vm)
    operation, reliability = build_operation_objective(s, vm)
    for expr in (investment, operation, reliability):
        for j, c in expr.items():
            if j is None:
                b.add_constant(c)
            else:
                b.add_objective(j, c)
    return PlanningModel(s, b.build(), vm, balance, investment, converter, operation, reliability)


# -- decoding -------------------------------------------------------------------

@dataclass(frozen=True)
class Placement:
    feeder: str | None
    capacity: float
    kind: str
    native_bus: str


@dataclass(frozen=True)
class CostBreakdown:
    investment: float
    operation: float
    reliability: float
    total: float
    der_investment: float
    converter_investment: float
    grid_interface_investment: float
    fuel: float
    energy_purchase: float
    export_revenue: float


@dataclass(frozen=True)
class HourDispatch:
    hour: int
    demand: float
    outputs: dict
    charge: dict
    discharge: dict
    soc: dict
    grid_import: float
    grid_export: float
    shed: float

    @property
    def grid(self) -> float:
        return self.grid_import - self.grid_export


@dataclass(frozen=True)
class SolverStats:
    status: str
    objective: float
    bound: float
    gap: float
    nodes: int
    wall_time: float


@dataclass(frozen=True)
class PlanResult:
    feeder_types: dict
    placements: dict
    cost_breakdown: CostBreakdown
    dispatch: tuple
    solver_stats: SolverStats

    @property
    def dc_feeder_count(self) -> int:
        return sum(1 for v in self.feeder_types.values() if v == "dc")

    def capacity(self, kind: str | None = None) -> float:
        return sum(p.capacity for p in self.placements.values() if kind in (None, p.kind))


def _value(expr, values):
    return sum(c * (1.0 if j is None else values[j]) for j, c in expr.items())


def decode(source, solution: Solution) -> PlanResult:
    """Turn a solver :class:`Solution` into a :class:`PlanResult`.

    ``source`` is a Scenario (re-assembled here) or an already assembled
    :class:`PlanningModel`. Costs are recomputed from the decoded values and
    must agree with the solver objective to 1e-6 relative.
    """
    pm = source if isinstance(source, PlanningModel) else assemble(source)
    if solution.status not in (OPTIMAL, FEASIBLE_GAP, LIMIT) or solution.values is None:
        raise DecodeError(f"cannot decode a solution with status {solution.status!r}")
    s, vm = pm.scenario, pm.vars
    v = np.asarray(solution.values, float)
    if v.shape != (pm.model.num_vars,):
        raise DecodeError("solution length does not match the model")

    feeder_types = {f.id: ("dc" if v[vm.z[f.id]] > 0.5 else "ac") for f in s.feeders}
    placements = {}
    kinds = {d.id: (d.kind, d.native_bus) for d in s.ders}
    kinds.update({st.id: (domain.STORAGE, st.native_bus) for st in s.storages})
    for u in s.unit_ids:
        feeder = next((f.id for f in s.feeders if v[vm.x[u, f.id]] > 0.5), None)
        cap = float(v[vm.cap[u]]) if feeder is not None else 0.0
        placements[u] = Placement(feeder, cap, *kinds[u])

    years = s.horizon.years
    der_inv = sum(years * d.annualized_capital_cost * v[vm.cap[d.id]] for d in s.ders)
    der_inv += sum(years * st.annualized_capital_cost * v[vm.cap[st.id]] for st in s.storages)
    conv = _value(pm.converter, v)
    grid_fixed = years * s.converters.grid_interface_unit_cost * s.market.exchange_limit
    fuel = purchase = export = 0.0
    hours = []
    for t in range(s.num_hours):
        w = years * s.horizon.hour_weights[t]
        price = s.market.price_profile[t]
        outputs = {}
        for d in s.ders:
            if d.kind == DISPATCHABLE:
                segs = [v[vm.seg[d.id, si, t]] for si in range(len(d.cost_segments))]
                fuel += w * sum(x * mc for x, (_, mc) in zip(segs, d.cost_segments))
                outputs[d.id] = float(sum(segs))
            else:
                outputs[d.id] = float(v[vm.won[d.id, t]] + v[vm.woff[d.id, t]])
        purchase += w * price * v[vm.gin[t]]
        export += w * price * v[vm.gout[t]]
        hours.append(HourDispatch(
            t, float(s.load.demand_profile[t]), outputs,
            {st.id: float(v[vm.chon[st.id, t]] + v[vm.choff[st.id, t]]) for st in s.storages},
            {st.id: float(v[vm.dison[st.id, t]] + v[vm.disoff[st.id, t]]) for st in s.storages},
            {st.id: float(v[vm.soc[st.id, t]]) for st in s.storages},
            float(v[vm.gin[t]]), float(v[vm.gout[t]]), float(v[vm.shed[t]])))
    reliability = _value(pm.reliability, v)
    investment = der_inv + conv + grid_fixed
    operation = fuel + purchase - export
    total = investment + operation + reliability
    if abs(total - solution.objective) > DECODE_TOL * max(1.0, abs(solution.objective)):
        raise DecodeError(f"recomputed total {total!r} disagrees with solver objective "
                          f"{solution.objective!r}")
    costs = CostBreakdown(float(investment), float(operation), float(reliability), float(total),
                          float(der_inv), float(conv), float(grid_fixed), float(fuel),
                          float(purchase), float(export))
    stats = SolverStats(solution.status, float(solution.objective), float(solution.best_bound),
                        float(solution.gap), int(solution.nodes), float(solution.wall_time))
    return PlanResult(feeder_types, placements, costs, tuple(hours), stats)
