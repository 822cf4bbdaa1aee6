"""Export the planning MILP to the text format, read it back and solve it two ways.

Run: python demos/model_exchange.py [out.milp]
"""

import sys
import tempfile
from pathlib import Path

from hybridplan.formulation import assemble
from hybridplan.milp import export_model, import_model, solve_model_file
from hybridplan.scenario_io import bundled_path, load_scenario

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp()) / "mini.milp"
model = assemble(load_scenario(bundled_path("mini.yaml"))).model
export_model(model, out)
print(f"wrote {out}: {model.num_vars} columns, {model.num_binaries} binary, {model.num_rows} rows")
print("\n".join(out.read_text().splitlines()[:6]))
print("...")

assert import_model(out) == model  # floats are written with repr, so the round trip is exact

native = solve_model_file(out, "native")
highs = solve_model_file(out, "highs")
print(f"native {native.status:>8}  {native.objective:,.6f}")
print(f"highs  {highs.status:>8}  {highs.objective:,.6f}")
print(f"relative difference {abs(native.objective - highs.objective) / abs(highs.objective):.1e}")
