import dataclasses
import itertools
import math

import numpy as np
import pytest

from hybridplan.domain import DerSpec, FeederSpec, StorageSpec
from hybridplan.formulation import (DecodeError, ScenarioInvalid, assemble, decode,
                                    linearize_binary_product, linearize_continuous_switch)
from hybridplan.milp import MilpModel, ModelBuilder, solve, solve_lp
from tests.helpers import linearization_residuals, random_mini, scale_costs, tiny_scenario

GAS = DerSpec("GAS", "dispatchable", "ac", 50_000.0, 1.0, None, ((1.0, 85.0),))
SOLAR = DerSpec("PV", "dispatchable", "dc", 40_000.0, 1.0, None, ((1.0, 20.0),))


def extremes(model, j):
    """(min, max) of variable j over the model's feasible set."""
    c = np.zeros(model.num_vars)
    c[j] = 1.0
    lo = solve(_with_objective(model, c))
    hi = solve(_with_objective(model, -c))
    return lo.values[j], hi.values[j]


def _with_objective(model, c):
    return MilpModel(model.names, model.lb.copy(), model.ub.copy(), model.binary.copy(),
                     model.rows, model.senses, model.rhs.copy(), np.asarray(c, float), 0.0)


def fixed(model, values: dict):
    """Copy of ``model`` with the named variables fixed."""
    lb, ub = np.array(model.lb), np.array(model.ub)
    for name, v in values.items():
        j = model.index(name)
        lb[j] = ub[j] = v
    return model.with_bounds(lb, ub)


def row_with(model, required: dict):
    """The single row whose coefficients include all of ``required`` (name -> coef)."""
    A = model.rows.tocsr()
    found = []
    for i in range(model.num_rows):
        cols, vals = A.indices[A.indptr[i]:A.indptr[i + 1]], A.data[A.indptr[i]:A.indptr[i + 1]]
        coefs = {model.names[c]: v for c, v in zip(cols, vals)}
        if all(math.isclose(coefs.get(n, math.nan), v) for n, v in required.items()):
            found.append(coefs)
    assert len(found) == 1, found
    return found[0]


# -- linearizations ---------------------------------------------------------------

@pytest.mark.parametrize("x, z", list(itertools.product((0, 1), repeat=2)))
def test_binary_product_truth_table(x, z):
    b = ModelBuilder()
    xv = b.add_var("x", x, x, binary=True)
    zv = b.add_var("z", z, z, binary=True)
    y = linearize_binary_product(b, xv, zv, "y")
    assert extremes(b.build(), y) == (x * z, x * z)


@pytest.mark.parametrize("p, z, expected", [
    (1.0, 1, (1.0, 0.0)),
    (1.0, 0, (0.0, 1.0)),
    (0.0, 1, (0.0, 0.0)),
    (0.0, 0, (0.0, 0.0)),
])
def test_continuous_switch(p, z, expected):
    b = ModelBuilder()
    pv = b.add_var("p", p, p)
    zv = b.add_var("z", z, z, binary=True)
    on, off = linearize_continuous_switch(b, {pv: 1.0}, {zv: 1.0}, 2.0, "s")
    m = b.build()
    assert extremes(m, on) == (expected[0], expected[0])
    assert extremes(m, off) == (expected[1], expected[1])


@pytest.mark.parametrize("bound", [math.inf, 0.0, -1.0, math.nan])
def test_switch_needs_finite_positive_bound(bound):
    b = ModelBuilder()
    pv = b.add_var("p", 0, 1)
    zv = b.add_var("z", binary=True)
    with pytest.raises(ValueError):
        linearize_continuous_switch(b, {pv: 1.0}, {zv: 1.0}, bound, "s")


# -- investment -------------------------------------------------------------------

def investment_value(pm, assignment):
    v = np.zeros(pm.model.num_vars)
    for name, val in assignment.items():
        v[pm.model.index(name)] = val
    return sum(c * (1.0 if j is None else v[j]) for j, c in pm.investment.items())


def test_investment_single_ac_unit_on_ac_feeder():
    pm = assemble(tiny_scenario([GAS], rectifier=10_000.0))
    assert investment_value(pm, {"x[GAS,F1]": 1, "z[F1]": 0, "y[GAS,F1]": 0,
                                 "cap[GAS]": 1}) == pytest.approx(50_000.0)


def test_investment_single_ac_unit_on_dc_feeder():
    # der-side rectifier 10,000 * 1 MW, plus inverters for the whole 1 MW ac peak
    pm = assemble(tiny_scenario([GAS], rectifier=10_000.0, inverter=7_000.0))
    value = investment_value(pm, {"x[GAS,F1]": 1, "z[F1]": 1, "y[GAS,F1]": 1, "cap[GAS]": 1})
    assert value == pytest.approx(50_000.0 + 10_000.0 + 7_000.0)


@pytest.mark.parametrize("dc_ratio, expected", [(0.0, 0.0), (0.25, 10_000 * 0.25 * 4.0)])
def test_investment_without_units(dc_ratio, expected):
    pm = assemble(tiny_scenario(demand=(4.0, 2.0), price=(50.0, 50.0), dc_ratio=dc_ratio))
    assert investment_value(pm, {"z[F1]": 0}) == pytest.approx(expected)


# -- assembly ----------------------------------------------------------------------

def test_bundled_binary_count(bundled):
    units, feeders = len(bundled.ders) + len(bundled.storages), len(bundled.feeders)
    assert assemble(bundled).model.num_binaries == units * feeders * 2 + feeders == 45


def test_minimal_instance():
    pm = assemble(tiny_scenario([GAS]))
    assert pm.model.num_binaries == 3
    assert len(pm.balance_rows) == 1


def test_invalid_scenario_rejected():
    with pytest.raises(ScenarioInvalid) as err:
        assemble(tiny_scenario(dc_ratio=2.0))
    assert [v.path for v in err.value.violations] == ["load.dc_ratio"]


def test_assembly_is_deterministic(bundled):
    assert assemble(bundled).model == assemble(bundled).model


# -- constraint families -------------------------------------------------------------

def test_capacity_group_row(bundled):
    row = row_with(assemble(bundled).model, {"cap[G1]": 1.0, "cap[G2]": 1.0})
    assert set(row) == {"cap[G1]", "cap[G2]"}


def test_renewable_output_follows_profile():
    wind = DerSpec("W", "renewable", "ac", 1.0, 2.0, None, (), "wind")
    s = tiny_scenario([wind], demand=(5.0,), price=(100.0,), profiles={"wind": (0.5,)})
    result = decode(assemble(s), solve(assemble(s).model))
    assert result.placements["W"].capacity == pytest.approx(2.0)
    assert result.dispatch[0].outputs["W"] == pytest.approx(1.0)


def test_uninstalled_unit_produces_nothing():
    s = tiny_scenario([dataclasses.replace(GAS, annualized_capital_cost=1.0)],
                      demand=(1.0,), price=(500.0,))
    pm = assemble(s)
    sol = solve(fixed(pm.model, {"x[GAS,F1]": 0}))
    result = decode(pm, sol)
    assert result.placements["GAS"].feeder is None
    assert result.placements["GAS"].capacity == 0.0
    assert result.dispatch[0].outputs["GAS"] == 0.0


def test_storage_state_of_charge_step():
    bat = StorageSpec("B", "dc", 1.0, 0.5, 2.0, 0.95, 0.9)
    pm = assemble(tiny_scenario(storages=[bat], demand=(1.0, 1.0), price=(10.0, 90.0)))
    m = pm.model
    row = row_with(m, {"soc[B,1]": 1.0, "soc[B,0]": -1.0})
    # charging 1 MW for an hour from empty raises the state of charge by 0.95 MWh
    assert -row["chon[B,1]"] == pytest.approx(0.95) == -row["choff[B,1]"]
    assert row["dison[B,1]"] == pytest.approx(1 / 0.9)
    assert m.ub[m.index("dison[B,0]")] == 0.5
    lossless = assemble(tiny_scenario(storages=[dataclasses.replace(
        bat, charge_efficiency=1.0, discharge_efficiency=1.0)], demand=(1.0, 1.0),
        price=(10.0, 90.0))).model
    assert row_with(lossless, {"soc[B,1]": 1.0, "soc[B,0]": -1.0})["chon[B,1]"] == -1.0


def test_storage_arbitrage_is_cyclic():
    bat = StorageSpec("B", "ac", 1.0, 1.0, 2.0, 0.9, 0.9)
    s = tiny_scenario(storages=[bat], demand=(1.0, 1.0), price=(10.0, 90.0))
    result = decode(assemble(s), solve(assemble(s).model))
    d0, d1 = result.dispatch
    assert d0.charge["B"] > 0 and d1.discharge["B"] > 0
    assert d1.discharge["B"] == pytest.approx(d0.charge["B"] * 0.9 * 0.9)
    assert d1.soc["B"] == pytest.approx(d0.soc["B"] - d1.discharge["B"] / 0.9)


def test_grid_and_shed_bounds():
    pm = assemble(tiny_scenario(demand=(8.0, 8.0), price=(40.0, 40.0), critical_ratio=0.5,
                                islanded=(1,), exchange_limit=10.0))
    m = pm.model
    assert m.ub[m.index("shed[0]")] == 4.0
    assert m.ub[m.index("gin[0]")] == m.ub[m.index("gout[0]")] == 10.0
    assert m.ub[m.index("gin[1]")] == m.ub[m.index("gout[1]")] == 0.0


def test_export_limited_by_exchange_limit():
    wind = DerSpec("W", "renewable", "ac", 0.0, 20.0, None, (), "wind")
    s = tiny_scenario([wind], demand=(1.0,), price=(50.0,), exchange_limit=10.0,
                      profiles={"wind": (1.0,)})
    result = decode(assemble(s), solve(assemble(s).model))
    assert result.dispatch[0].grid_export == pytest.approx(10.0)
    assert result.dispatch[0].outputs["W"] == pytest.approx(11.0)


def test_islanded_single_source_balance():
    s = tiny_scenario([GAS], demand=(1.5,), price=(40.0,), islanded=(0,), critical_ratio=0.2)
    result = decode(assemble(s), solve(assemble(s).model))
    hour = result.dispatch[0]
    assert hour.outputs["GAS"] + hour.shed == pytest.approx(1.5)
    assert hour.grid == 0.0


@pytest.mark.parametrize("der, feeder_dc, coef", [
    (GAS, True, 0.95),
    (GAS, False, 1.0),
    (SOLAR, True, 1.0),
])
def test_balance_contributions(der, feeder_dc, coef):
    pm = assemble(tiny_scenario([der], eta_rec=0.95, eta_inv=0.9))
    row = row_with(pm.model, {"gin[0]": 1.0, "shed[0]": 1.0})
    name = f"won[{der.id},0]" if feeder_dc else f"woff[{der.id},0]"
    assert row[name] == pytest.approx(coef)


def test_operation_objective_signs():
    s = tiny_scenario([GAS], demand=(1.0,), price=(30.0,))
    pm = assemble(s)
    weight = s.horizon.years * s.horizon.hour_weights[0]
    m = pm.model
    per_mwh = {name: pm.operation[m.index(name)] / weight
               for name in ("gin[0]", "gout[0]", "seg[GAS,0,0]")}
    assert per_mwh["gin[0]"] == 30.0
    assert per_mwh["gout[0]"] == -30.0
    assert 2 * per_mwh["seg[GAS,0,0]"] == 170.0


# -- decoding ----------------------------------------------------------------------

def test_all_ac_plan_and_unplaced_unit():
    idle = dataclasses.replace(GAS, id="IDLE", annualized_capital_cost=1e9)
    feeders = (FeederSpec("A", 0.5, 0.5), FeederSpec("B", 0.5, 0.5))
    s = tiny_scenario([GAS, idle], feeders=feeders, demand=(2.0,), price=(200.0,))
    result = decode(assemble(s), solve(assemble(s).model))
    assert result.feeder_types == {"A": "ac", "B": "ac"}
    assert result.placements["IDLE"].feeder is None and result.placements["IDLE"].capacity == 0
    c = result.cost_breakdown
    assert c.total == pytest.approx(c.investment + c.operation + c.reliability, rel=1e-12)


def test_decode_rejects_mismatched_objective():
    s = tiny_scenario([GAS])
    pm = assemble(s)
    sol = solve(pm.model)
    sol.objective *= 1.01
    with pytest.raises(DecodeError):
        decode(pm, sol)


def test_decode_rejects_infeasible():
    s = tiny_scenario(critical_ratio=1.0, islanded=(0,))
    pm = assemble(s)
    sol = solve(pm.model)
    assert sol.status == "infeasible"
    with pytest.raises(DecodeError):
        decode(pm, sol)


# -- structural properties -----------------------------------------------------------

@pytest.mark.parametrize("seed", range(15))
def test_linearization_exact_on_random_instances(seed):
    pm = assemble(random_mini(seed))
    sol = solve(pm.model)
    if sol.values is not None:
        worst = linearization_residuals(pm, sol.values)
        assert worst["product"] == 0.0 and worst["gate"] == 0.0
        assert worst["switch"] <= 1e-9 and worst["balance"] <= 1e-6


@pytest.mark.parametrize("dc_ratio", [0.4, 0.8])
def test_matched_placement_never_costs_more(bundled, dc_ratio):
    s = dataclasses.replace(bundled, load=dataclasses.replace(bundled.load, dc_ratio=dc_ratio))
    pm = assemble(s)
    free = solve(pm.model)
    result = decode(pm, free)
    native = {d.id: d.native_bus for d in s.ders} | {st.id: st.native_bus for st in s.storages}
    fix = {f"z[{k}]": 1.0 if kind == "dc" else 0.0 for k, kind in result.feeder_types.items()}
    for u, bus in native.items():
        if bus in result.feeder_types.values():
            for k, kind in result.feeder_types.items():
                if kind != bus:
                    fix[f"x[{u},{k}]"] = 0.0
    matched = solve(fixed(pm.model, fix))
    assert matched.objective <= free.objective * (1 + 1e-6)


def test_zero_dc_load_keeps_feeders_ac(bundled):
    s = dataclasses.replace(
        bundled, ders=tuple(d for d in bundled.ders if d.native_bus == "ac"), storages=(),
        load=dataclasses.replace(bundled.load, dc_ratio=0.0))
    result = decode(assemble(s), solve(assemble(s).model))
    assert set(result.feeder_types.values()) == {"ac"}


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_cost_scaling(mini, lam):
    pm = assemble(mini)
    base = solve(pm.model)
    scaled_model = assemble(scale_costs(mini, lam)).model
    scaled = solve(scaled_model)
    assert scaled.objective == pytest.approx(lam * base.objective, rel=1e-6)
    assert scaled_model.evaluate(base.values) == pytest.approx(lam * base.objective, rel=1e-9)


def test_relaxation_bounds_plan(mini):
    pm = assemble(mini)
    assert solve_lp(pm.model).objective <= solve(pm.model).objective
