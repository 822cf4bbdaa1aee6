"""Cross-check the branch-and-bound solver against brute-force enumeration.

The oracle tries every assignment of the placement and feeder-type binaries and
solves the remaining LP with scipy's HiGHS. It only runs on small instances.

Run: python demos/verify_against_enumeration.py
"""

from hybridplan import oracle
from hybridplan.formulation import assemble
from hybridplan.milp import solve
from hybridplan.scenario_io import bundled_path, load_scenario

for name in ("mini.yaml", "mini_perturbed.yaml"):
    scenario = load_scenario(bundled_path(name))
    sol = solve(assemble(scenario).model)
    report = oracle.compare(scenario, sol)
    print(f"{name}: {oracle.enumerable_binaries(scenario)} binaries, "
          f"{report.evaluated_count} assignments")
    print(f"  branch and bound {sol.objective:,.6f}")
    print(f"  enumeration      {report.best_objective:,.6f}")
    print(f"  agreement {report.agreement} (discrepancy {report.discrepancy:.2e})")

big = load_scenario(bundled_path("microgrid.yaml"))
try:
    oracle.enumerate_solve(big)
except oracle.OracleSizeError as err:
    print(f"microgrid.yaml is too large to enumerate: {err}")
