import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridplan.formulation import assemble
from hybridplan.milp import ModelBuilder, ModelFormatError, export_model, import_model
from hybridplan.milp.textformat import dumps, loads
from hybridplan.scenario_io import bundled_path, load_scenario

GOOD = """\
# two variables, one row
MILP 2 1
VAR x 0.0 inf C
VAR y 0.0 1.0 B
ROW <= 4.0 0:1.0 1:2.0
OBJ 5.0 0:3.0 1:-1.0
END
"""


@pytest.mark.parametrize("name", ["microgrid.yaml", "mini.yaml", "mini_perturbed.yaml"])
def test_bundled_models_round_trip(tmp_path, name):
    model = assemble(load_scenario(bundled_path(name))).model
    path = tmp_path / "model.txt"
    export_model(model, path)
    assert import_model(path) == model


def test_parse_small_file():
    m = loads(GOOD)
    assert m.names == ("x", "y")
    assert m.ub[0] == math.inf and m.binary.tolist() == [False, True]
    assert m.rows.toarray().tolist() == [[1.0, 2.0]]
    assert m.objective_constant == 5.0


def test_empty_model_round_trip():
    m = ModelBuilder().build()
    again = loads(dumps(m))
    assert again == m and again.num_vars == 0 and again.num_rows == 0


@pytest.mark.parametrize("old, new, line", [
    ("ROW <= 4.0", "ROW < 4.0", 5),
    ("VAR y 0.0 1.0 B", "VAR y 0.0 1.0 Q", 4),
    ("0:1.0 1:2.0", "0:1.0 7:2.0", 5),
    ("0:1.0 1:2.0", "0:nan 1:2.0", 5),
    ("0:1.0 1:2.0", "0:1.0 0:2.0", 5),
    ("MILP 2 1", "MILP 3 1", 7),
    ("END\n", "", 6),
    ("END\n", "END\nVAR z 0 1 C\n", 8),
    ("OBJ 5.0", "OBJ five", 6),
    ("MILP 2 1\nVAR x 0.0 inf C\n", "MILP 3 1\nVAR x 0.0 inf C\nVAR x 0.0 1.0 C\n", 4),
])
def test_malformed_input_names_the_line(old, new, line):
    text = GOOD.replace(old, new)
    assert text != GOOD
    with pytest.raises(ModelFormatError) as err:
        loads(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        import_model(tmp_path / "absent.txt")


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.tuples(finite, finite, finite), min_size=1, max_size=6),
       st.lists(finite, min_size=1, max_size=4), finite)
def test_round_trip_is_bit_exact(var_data, rhs, constant):
    b = ModelBuilder()
    for j, (lo, coef, _) in enumerate(var_data):
        b.add_var(f"v{j}", lo, max(lo, lo + abs(coef)) if math.isfinite(lo + abs(coef)) else math.inf)
        b.add_objective(j, coef)
    for r in rhs:
        b.add_row({j: d[2] for j, d in enumerate(var_data)}, "<=", r)
    b.add_constant(constant)
    m = b.build()
    again = loads(dumps(m))
    assert again == m
    assert np.array_equal(again.rows.data.view(np.uint64), m.rows.data.view(np.uint64))
