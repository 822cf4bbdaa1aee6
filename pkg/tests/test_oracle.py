import dataclasses

import numpy as np
import pytest

from hybridplan import oracle
from hybridplan.domain import DerSpec, FeederSpec
from hybridplan.formulation import assemble
from hybridplan.milp import solve
from tests.helpers import random_mini, tiny_scenario

GAS = DerSpec("GAS", "dispatchable", "ac", 50_000.0, 2.0, None, ((2.0, 60.0),))
FUEL_CELL = DerSpec("FC", "dispatchable", "dc", 50_000.0, 2.0, None, ((2.0, 60.0),))
TWO_FEEDERS = (FeederSpec("A", 0.5, 0.5), FeederSpec("B", 0.5, 0.5))


def test_all_ac_boundary():
    report = oracle.enumerate_solve(tiny_scenario([GAS], demand=(1.0,), price=(100.0,)))
    assert report.evaluated_count == 2 ** 2
    assert report.best_assignment["z"] == {"F1": 0}


def test_high_dc_ratio_selects_a_dc_feeder():
    s = tiny_scenario([GAS, FUEL_CELL], feeders=TWO_FEEDERS, demand=(3.0,), price=(100.0,),
                      dc_ratio=1.0, rectifier=40_000.0, inverter=40_000.0)
    report = oracle.enumerate_solve(s)
    assert report.evaluated_count == 2 ** 6
    assert any(report.best_assignment["z"].values())


def test_mini_matches_solver(mini):
    report = oracle.compare(mini, solve(assemble(mini).model))
    assert report.evaluated_count == 2 ** oracle.enumerable_binaries(mini) == 256
    assert report.agreement is True
    assert report.discrepancy <= 1e-6
    # frozen reference value of the bundled mini scenario
    assert report.best_objective == pytest.approx(46115425.95241453, rel=1e-9)


def test_perturbed_objective_is_caught(mini):
    sol = solve(assemble(mini).model)
    sol.objective *= 1.001
    report = oracle.compare(mini, sol)
    assert report.agreement is False
    assert report.discrepancy > 0


def test_both_sides_report_infeasible():
    s = tiny_scenario(critical_ratio=1.0, islanded=(0,))
    sol = solve(assemble(s).model)
    report = oracle.compare(s, sol)
    assert sol.status == "infeasible"
    assert not report.feasible and report.best_assignment is None
    assert report.agreement is True


def test_size_limit(bundled):
    with pytest.raises(oracle.OracleSizeError) as err:
        oracle.enumerate_solve(bundled)
    assert err.value.count == 24 > oracle.MAX_BINARIES
    assert "24" in str(err.value)


@pytest.mark.parametrize("seed", range(6))
def test_minimum_bounds_every_assignment(seed):
    s = random_mini(seed, max_binaries=8)
    report = oracle.enumerate_solve(s)
    pm = assemble(s)
    lp = oracle._ResidualLP(pm)
    rng = np.random.default_rng(seed)
    xk, zk = list(pm.vars.x), list(pm.vars.z)
    for _ in range(10):
        xs = {k: int(rng.integers(2)) for k in xk}
        zs = {k: int(rng.integers(2)) for k in zk}
        assert report.best_objective <= lp.value(oracle._fixings(pm, xs, zs)) + 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_feeder_order_does_not_matter(seed):
    s = random_mini(seed, max_binaries=10)
    flipped = dataclasses.replace(s, feeders=tuple(reversed(s.feeders)))
    a, b = oracle.enumerate_solve(s), oracle.enumerate_solve(flipped)
    assert a.best_objective == pytest.approx(b.best_objective, rel=1e-9)

