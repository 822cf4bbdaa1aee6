"""Three sensitivity sweeps on the bundled scenario.

* dc-load ratio: how many feeders are converted to dc
* critical-load ratio: how much dispatchable capacity is needed for islanded hours
* price scale: investment against operating cost

Run: python demos/sensitivity_sweeps.py [workers]
"""

import sys

from hybridplan.cli.commands import sweep
from hybridplan.scenario_io import bundled_path, load_scenario

workers = int(sys.argv[1]) if len(sys.argv) > 1 else 4
scenario = load_scenario(bundled_path("microgrid.yaml"))

dc = sweep(scenario, "dc_ratio", [i / 10 for i in range(11)], workers=workers)
print("dc ratio -> dc feeders")
for row in dc.rows:
    print(f"  {row.value:4.1f}  {row.plan.dc_feeder_count}  "
          f"{''.join(k[0] for k in row.plan.feeder_types.values())}")

crit = sweep(scenario, "critical_ratio", [0, 0.25, 0.5, 0.75, 1.0], workers=workers)
print("critical ratio -> dispatchable MW")
for row, mw in zip(crit.rows, crit.column("dispatchable_capacity")):
    print(f"  {row.value:4.2f}  {mw:6.3f}")

price = sweep(scenario, "price_scale", [0.9, 1.0, 1.1, 1.2], workers=workers)
print("price scale -> investment / operation (M$)")
for row in price.rows:
    c = row.plan.cost_breakdown
    print(f"  {row.value:4.1f}  {c.investment / 1e6:8.3f}  {c.operation / 1e6:8.3f}")

for line in dc.summary() + crit.summary() + price.summary():
    print(line)
