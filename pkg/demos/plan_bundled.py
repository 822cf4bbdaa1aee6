"""Plan the bundled three-feeder microgrid and compare it with buying everything from the grid.

Run: python demos/plan_bundled.py
"""

from hybridplan.cli.commands import baseline_breakdown, plan
from hybridplan.scenario_io import bundled_path, load_scenario

scenario = load_scenario(bundled_path("microgrid.yaml"))
print(f"{len(scenario.feeders)} feeders, {len(scenario.ders)} candidate units, "
      f"{len(scenario.storages)} storage, {scenario.num_hours} representative hours")

result = plan(scenario)

# Which feeders went dc, and where each unit landed
for feeder, kind in result.feeder_types.items():
    print(f"feeder {feeder}: {kind}")
for uid, p in result.placements.items():
    print(f"  {uid:<5} {p.kind:<12} native {p.native_bus}  on {p.feeder or '-':<4} {p.capacity:7.3f} MW")

c = result.cost_breakdown
print(f"investment  {c.investment:16,.0f}")
print(f"operation   {c.operation:16,.0f}")
print(f"reliability {c.reliability:16,.0f}")
print(f"total       {c.total:16,.0f}")

# The null plan: no units, every feeder stays ac, all energy from the grid
energy, fixed = baseline_breakdown(scenario)
print(f"grid-only   {energy + fixed:16,.0f}  (energy {energy:,.0f}, fixed {fixed:,.0f})")
print(f"saving      {energy + fixed - c.total:16,.0f}")
