"""Pluggable solver backends.

The built-in branch-and-bound is always available. ``highs`` hands the same
model to HiGHS through ``scipy.optimize.milp``, which is useful for
cross-checking results; nothing in the package depends on it.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import solver
from .model import MilpModel
from .solver import Solution, SolveOptions
from .textformat import import_model


class NativeBackend:
    name = "native"

    def solve(self, model: MilpModel, options: SolveOptions | None = None) -> Solution:
        return solver.solve(model, options)


class HighsBackend:
    name = "highs"

    def solve(self, model: MilpModel, options: SolveOptions | None = None) -> Solution:
        from scipy.optimize import Bounds, LinearConstraint, milp

        options = options or SolveOptions()
        problems = model.validate()
        if problems:
            raise solver.ModelError("; ".join(problems))
        start = time.perf_counter()
        lo = np.where(np.array(model.senses) == "<=", -np.inf, model.rhs)
        hi = np.where(np.array(model.senses) == ">=", np.inf, model.rhs)
        constraints = [LinearConstraint(model.rows, lo, hi)] if model.num_rows else []
        opts = {"mip_rel_gap": options.relative_gap}
        if options.time_limit is not None:
            opts["time_limit"] = options.time_limit
        if options.node_limit is not None:
            opts["node_limit"] = options.node_limit
        res = milp(np.asarray(model.objective), integrality=model.binary.astype(int),
                   bounds=Bounds(model.lb, model.ub), constraints=constraints, options=opts)
        elapsed = time.perf_counter() - start
        if res.x is None:
            status = {2: solver.INFEASIBLE, 3: solver.UNBOUNDED}.get(res.status, solver.LIMIT)
            obj = math.inf if status == solver.INFEASIBLE else -math.inf \
                if status == solver.UNBOUNDED else math.nan
            return Solution(status, obj, obj if status != solver.LIMIT else -math.inf, None,
                            0, elapsed)
        values = np.clip(res.x, model.lb, model.ub)
        values[model.binary] = np.round(values[model.binary])
        obj = model.evaluate(values)
        bound = getattr(res, "mip_dual_bound", None)
        bound = obj if bound is None or not np.isfinite(bound) else \
            min(obj, float(bound) + model.objective_constant)
        status = solver.OPTIMAL if res.status == 0 else solver.FEASIBLE_GAP
        return Solution(status, obj, bound, values, int(getattr(res, "mip_node_count", 0) or 0),
                        elapsed)


BACKENDS = {"native": NativeBackend, "highs": HighsBackend}


def get_backend(name: str):
    try:
        return BACKENDS[name]()
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(BACKENDS)}") from None


def solve_model_file(path, backend: str = "native", options: SolveOptions | None = None):
    """Solve a model stored in the plain-text format."""
    return get_backend(backend).solve(import_model(path), options)
