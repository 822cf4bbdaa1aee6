import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridplan.domain import (DerSpec, FeederSpec, LoadModel, StorageSpec, effective_demand,
                               validate)
from tests.helpers import tiny_scenario


def paths(violations):
    return [v.path for v in violations]


def test_bundled_scenario_is_valid(bundled):
    assert validate(bundled) == []


def test_dc_ratio_out_of_range(bundled):
    bad = dataclasses.replace(bundled, load=dataclasses.replace(bundled.load, dc_ratio=1.3))
    assert paths(validate(bad)) == ["load.dc_ratio"]


def test_feeder_shares_must_sum_to_one():
    s = tiny_scenario(feeders=(FeederSpec("A", 0.5, 0.5), FeederSpec("B", 0.6, 0.5)))
    violations = validate(s)
    assert len(violations) == 1
    assert violations[0].path == "feeders.dc_load_share"


@pytest.mark.parametrize("der, path", [
    (DerSpec("G", "dispatchable", "ac", 1.0, -1.0, None, ((1.0, 10.0),)), "ders[0].capacity_max"),
    (DerSpec("G", "dispatchable", "ac", 1.0, 1.0, None, ()), "ders[0].cost_segments"),
    (DerSpec("G", "dispatchable", "ac", 1.0, 2.0, None, ((1.0, 20.0), (1.0, 10.0))),
     "ders[0].cost_segments[1]"),
    (DerSpec("G", "dispatchable", "ac", 1.0, 1.0, None, ((0.0, 10.0),)), "ders[0].cost_segments[0]"),
    (DerSpec("W", "renewable", "ac", 1.0, 1.0, None, (), None), "ders[0].profile_id"),
    (DerSpec("W", "renewable", "ac", 1.0, 1.0, None, (), "missing"), "ders[0].profile_id"),
    (DerSpec("W", "renewable", "xx", 1.0, 1.0, None, (), "p"), "ders[0].native_bus"),
    (DerSpec("G", "dispatchable", "ac", 1.0, 1.0, "nogroup", ((1.0, 5.0),)),
     "ders[0].capacity_group"),
])
def test_der_invariants(der, path):
    s = tiny_scenario(ders=[der], profiles={"p": (0.5,)})
    assert path in paths(validate(s))


@pytest.mark.parametrize("change, path", [
    ({"charge_efficiency": 0.0}, "storages[0].charge_efficiency"),
    ({"discharge_efficiency": 1.2}, "storages[0].discharge_efficiency"),
    ({"soc_min": 0.9, "soc_max": 0.5}, "storages[0].soc_min"),
])
def test_storage_invariants(change, path):
    base = StorageSpec("B", "dc", 1.0, 1.0, 2.0, 0.95, 0.95)
    s = tiny_scenario(storages=[dataclasses.replace(base, **change)])
    assert paths(validate(s)) == [path]


def test_duplicate_ids_and_other_scalars():
    g = DerSpec("G", "dispatchable", "ac", 1.0, 1.0, None, ((1.0, 5.0),))
    s = tiny_scenario(ders=[g], storages=[StorageSpec("G", "dc", 1.0, 1.0, 2.0, 1.0, 1.0)],
                      voll=10.0, islanded=(5,), eta_rec=0.0)
    found = set(paths(validate(s)))
    assert {"ders", "load.voll", "islanding.islanded_hours", "converters.eta_rec"} <= found


def test_weights_must_cover_a_year():
    s = tiny_scenario()
    bad = dataclasses.replace(s, horizon=dataclasses.replace(s.horizon, hour_weights=(8000.0,)))
    assert paths(validate(bad)) == ["horizon.hour_weights"]


def test_validate_is_idempotent(bundled):
    bad = dataclasses.replace(bundled, load=dataclasses.replace(bundled.load, dc_ratio=-1,
                                                                critical_ratio=2))
    first, second = validate(bad), validate(bad)
    assert first == second and len(first) == 2


@pytest.mark.parametrize("demand, dc_ratio, critical, expected", [
    (8.5, 0.4, 0.5, (5.1, 3.4, 4.25)),
    (0.0, 0.4, 0.5, (0.0, 0.0, 0.0)),
    (10.0, 1.0, 0.3, (0.0, 10.0, 3.0)),
])
def test_effective_demand(demand, dc_ratio, critical, expected):
    split = effective_demand(LoadModel((demand,), dc_ratio, critical, 1000.0), 0)
    assert split == pytest.approx(expected, abs=1e-12)


def test_effective_demand_hour_out_of_range():
    with pytest.raises(IndexError):
        effective_demand(LoadModel((1.0, 2.0), 0.5, 0.5, 1000.0), 2)


@given(st.lists(st.floats(0, 1e4, allow_nan=False), min_size=1, max_size=30),
       st.floats(0, 1), st.floats(0, 1), st.data())
def test_demand_split_reconstructs_total(demand, dc_ratio, critical, data):
    load = LoadModel(tuple(demand), dc_ratio, critical, 1e6)
    t = data.draw(st.integers(0, len(demand) - 1))
    ac, dc, crit = effective_demand(load, t)
    assert ac >= 0 and dc >= 0 and crit >= 0
    assert ac + dc == demand[t]
