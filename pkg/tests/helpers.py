"""Scenario builders and checks shared by the test modules."""

import dataclasses

import numpy as np

from hybridplan.domain import (ConverterCatalog, DerSpec, FeederSpec, Horizon, IslandingModel,
                               LoadModel, MarketModel, Scenario, StorageSpec)


def tiny_scenario(ders=(), storages=(), feeders=None, *, demand=(1.0,), price=(50.0,),
                  dc_ratio=0.0, critical_ratio=0.0, voll=1000.0, exchange_limit=10.0,
                  years=1, islanded=(), profiles=None, groups=None, rectifier=10000.0,
                  inverter=10000.0, eta_rec=1.0, eta_inv=1.0, der_rectifier=None,
                  der_inverter=None):
    """Small hand-checkable scenario; hours share the year equally."""
    hours = len(demand)
    feeders = feeders or (FeederSpec("F1", 1.0, 1.0),)
    return Scenario(
        tuple(ders), tuple(storages), tuple(feeders),
        ConverterCatalog(rectifier, inverter, eta_rec, eta_inv,
                         der_rectifier_unit_cost=der_rectifier,
                         der_inverter_unit_cost=der_inverter),
        LoadModel(tuple(demand), dc_ratio, critical_ratio, voll),
        MarketModel(tuple(price), exchange_limit),
        Horizon(years, hours, (8760.0 / hours,) * hours),
        IslandingModel(tuple(islanded)), dict(profiles or {}), dict(groups or {}))


def random_mini(seed: int, max_binaries: int = 14) -> Scenario:
    """Random instance with at most 2 feeders, 4 units and 6 hours."""
    rng = np.random.default_rng(seed)
    hours = int(rng.integers(2, 7))
    n_feeders = int(rng.integers(1, 3))
    n_units = int(rng.integers(1, 5))
    while (n_units + 1) * n_feeders > max_binaries:
        n_units -= 1
    ders, storages = [], []
    for i in range(n_units):
        kind = rng.choice(["dispatchable", "renewable", "storage"])
        bus = str(rng.choice(["ac", "dc"]))
        if kind == "storage":
            storages.append(StorageSpec(f"S{i}", bus, float(rng.uniform(1e3, 5e4)),
                                        float(rng.uniform(0.2, 2.0)), 2.0, 0.95, 0.9, 0.1, 1.0))
        elif kind == "renewable":
            ders.append(DerSpec(f"U{i}", "renewable", bus, float(rng.uniform(1e3, 1e5)),
                                float(rng.uniform(0.5, 3.0)), None, (), "avail"))
        else:
            cmax = float(rng.uniform(0.5, 4.0))
            lo, hi = sorted(rng.uniform(20, 120, 2))
            ders.append(DerSpec(f"U{i}", "dispatchable", bus, float(rng.uniform(1e3, 8e4)), cmax,
                                None, ((cmax / 2, float(lo)), (cmax / 2, float(hi)))))
    if n_feeders == 1:
        feeders = (FeederSpec("F0", 1.0, 1.0),)
    else:
        a, b = rng.uniform(0.1, 0.9, 2).round(3)
        feeders = (FeederSpec("F0", float(a), float(b)),
                   FeederSpec("F1", float(1 - a), float(1 - b)))
    return Scenario(
        tuple(ders), tuple(storages), feeders,
        ConverterCatalog(float(rng.uniform(1e3, 5e4)), float(rng.uniform(1e3, 5e4)),
                         0.95, 0.96),
        LoadModel(tuple(float(x) for x in rng.uniform(1, 4, hours).round(2)),
                  float(rng.uniform(0, 1)), float(rng.uniform(0, 1)), 1000.0),
        MarketModel(tuple(float(x) for x in rng.uniform(10, 120, hours).round(1)), 5.0),
        Horizon(1, hours, (8760.0 / hours,) * hours),
        IslandingModel(tuple(int(h) for h in np.flatnonzero(rng.random(hours) < 0.2))),
        {"avail": tuple(float(x) for x in rng.uniform(0, 1, hours))}, {})


def scale_costs(s: Scenario, lam: float) -> Scenario:
    """Every currency input multiplied by ``lam``."""
    def opt(v):
        return None if v is None else v * lam
    ders = tuple(dataclasses.replace(
        d, annualized_capital_cost=d.annualized_capital_cost * lam,
        cost_segments=tuple((w, c * lam) for w, c in d.cost_segments)) for d in s.ders)
    storages = tuple(dataclasses.replace(st, annualized_capital_cost=st.annualized_capital_cost * lam)
                     for st in s.storages)
    cv = s.converters
    conv = dataclasses.replace(
        cv, rectifier_unit_cost=cv.rectifier_unit_cost * lam,
        inverter_unit_cost=cv.inverter_unit_cost * lam, dc_dc_unit_cost=cv.dc_dc_unit_cost * lam,
        grid_interface_unit_cost=cv.grid_interface_unit_cost * lam,
        der_rectifier_unit_cost=opt(cv.der_rectifier_unit_cost),
        der_inverter_unit_cost=opt(cv.der_inverter_unit_cost))
    return dataclasses.replace(
        s, ders=ders, storages=storages, converters=conv,
        load=dataclasses.replace(s.load, voll=s.load.voll * lam),
        market=dataclasses.replace(s.market,
                                   price_profile=tuple(p * lam for p in s.market.price_profile)))


def linearization_residuals(pm, values) -> dict:
    """Largest violation of each linearization identity and of the hourly balance."""
    vm, s = pm.vars, pm.scenario
    feeders = [f.id for f in s.feeders]
    product = max((abs(values[y] - values[vm.x[u, k]] * values[vm.z[k]])
                   for (u, k), y in vm.y.items()), default=0.0)
    switch = gate = 0.0
    for d in s.ders:
        on_dc = sum(values[vm.y[d.id, k]] for k in feeders)
        on_ac = sum(values[vm.x[d.id, k]] for k in feeders) - on_dc
        for t in range(s.num_hours):
            on, off = values[vm.won[d.id, t]], values[vm.woff[d.id, t]]
            gate = max(gate, on * (1.0 - on_dc), off * (1.0 - on_ac))
            if d.cost_segments:
                p = sum(values[vm.seg[d.id, si, t]] for si in range(len(d.cost_segments)))
                switch = max(switch, abs(on + off - p) / max(1.0, p))
    rows = pm.balance_rows
    residual = np.abs(pm.model.rows[rows] @ values - pm.model.rhs[rows])
    demand = np.maximum(1.0, np.asarray(s.load.demand_profile))
    return {"product": product, "switch": switch, "gate": gate,
            "balance": float(np.max(residual / demand)) if len(rows) else 0.0}
