"""Brute-force reference solver for small planning instances.

Every placement binary ``x[u,k]`` and feeder-type binary ``z[k]`` is
enumerated. For each assignment ``y = x * z`` is implied, the binaries are
fixed, and the remaining continuous problem is handed to HiGHS through
``scipy.optimize.linprog``. None of the project's own simplex or
branch-and-bound code is involved, so agreement between the two is a real
cross-check of the model and the solver.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .domain import Scenario
from .formulation import PlanningModel, assemble
from .milp.solver import INFEASIBLE, Solution

MAX_BINARIES = 18
AGREEMENT_TOL = 1e-6


class OracleSizeError(ValueError):
    def __init__(self, count: int):
        super().__init__(f"instance has {count} enumerable binaries; the oracle handles at most "
                         f"{MAX_BINARIES}")
        self.count = count


@dataclass
class OracleReport:
    best_objective: float
    best_assignment: dict | None
    evaluated_count: int
    agreement: bool | None = None
    discrepancy: float | None = None

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.best_objective)


def enumerable_binaries(scenario: Scenario) -> int:
    return (len(scenario.unit_ids) + 1) * len(scenario.feeders)


class _ResidualLP:
    """The continuous problem left once every binary is fixed."""

    def __init__(self, pm: PlanningModel):
        m = pm.model
        self.pm = pm
        rows = m.rows.tocsr()
        senses = np.array(m.senses)
        le, ge, eq = senses == "<=", senses == ">=", senses == "="
        self.A_ub = sp.vstack([rows[np.flatnonzero(le)], -rows[np.flatnonzero(ge)]]).tocsr()
        self.b_ub = np.concatenate([m.rhs[le], -m.rhs[ge]])
        self.A_eq = rows[np.flatnonzero(eq)].tocsr()
        self.b_eq = m.rhs[eq]
        self.c = np.asarray(m.objective, float)
        self.const = m.objective_constant
        self.lb, self.ub = np.array(m.lb, float), np.array(m.ub, float)
        # rows touching binaries only can be checked without an LP
        is_bin = np.asarray(m.binary)
        self.pure = [i for i in range(m.num_rows)
                     if rows.indptr[i + 1] > rows.indptr[i]
                     and is_bin[rows.indices[rows.indptr[i]:rows.indptr[i + 1]]].all()]
        self.rows, self.senses, self.rhs = rows, senses, m.rhs

    def _pure_rows_ok(self, fixed: np.ndarray) -> bool:
        for i in self.pure:
            lo, hi = self.rows.indptr[i], self.rows.indptr[i + 1]
            act = self.rows.data[lo:hi] @ fixed[self.rows.indices[lo:hi]]
            b, s = self.rhs[i], self.senses[i]
            if (s == "<=" and act > b + 1e-9) or (s == ">=" and act < b - 1e-9) \
                    or (s == "=" and abs(act - b) > 1e-9):
                return False
        return True

    def value(self, fixings: dict) -> float:
        """Optimal objective with the given variables fixed, or inf."""
        lb, ub = self.lb.copy(), self.ub.copy()
        fixed = np.zeros_like(lb)
        for j, val in fixings.items():
            lb[j] = ub[j] = fixed[j] = val
        if np.any(lb > ub) or not self._pure_rows_ok(fixed):
            return math.inf
        res = linprog(self.c, A_ub=self.A_ub if self.A_ub.shape[0] else None,
                      b_ub=self.b_ub if self.A_ub.shape[0] else None,
                      A_eq=self.A_eq if self.A_eq.shape[0] else None,
                      b_eq=self.b_eq if self.A_eq.shape[0] else None,
                      bounds=np.column_stack([lb, ub]), method="highs")
        if res.status != 0:
            return math.inf
        return float(res.fun) + self.const


def _fixings(pm: PlanningModel, xs: dict, zs: dict) -> dict:
    vm = pm.vars
    out = {}
    for (u, k), j in vm.x.items():
        out[j] = float(xs[u, k])
        out[vm.y[u, k]] = float(xs[u, k] * zs[k])
    for k, j in vm.z.items():
        out[j] = float(zs[k])
    return out


def enumerate_solve(scenario: Scenario) -> OracleReport:
    """Exhaustive minimum over all (x, z) assignments."""
    count = enumerable_binaries(scenario)
    if count > MAX_BINARIES:
        raise OracleSizeError(count)
    pm = assemble(scenario)
    lp = _ResidualLP(pm)
    x_keys = list(pm.vars.x)
    z_keys = list(pm.vars.z)
    best, best_assign = math.inf, None
    evaluated = 0
    for bits in itertools.product((0, 1), repeat=len(x_keys) + len(z_keys)):
        evaluated += 1
        xs = dict(zip(x_keys, bits[:len(x_keys)]))
        zs = dict(zip(z_keys, bits[len(x_keys):]))
        val = lp.value(_fixings(pm, xs, zs))
        if val < best:
            best, best_assign = val, {"x": xs, "z": zs}
    return OracleReport(best, best_assign, evaluated)


def compare(scenario: Scenario, solution: Solution) -> OracleReport:
    """Check a solver result against the exhaustive minimum."""
    report = enumerate_solve(scenario)
    if solution.values is None:
        solver_infeasible = solution.status == INFEASIBLE
        report.agreement = solver_infeasible and not report.feasible
        report.discrepancy = 0.0 if report.agreement else math.inf
        return report
    if not report.feasible:
        report.agreement, report.discrepancy = False, math.inf
        return report
    report.discrepancy = abs(report.best_objective - solution.objective) / max(
        1.0, abs(report.best_objective))
    pm = assemble(scenario)
    v = np.asarray(solution.values)
    xs = {key: round(v[j]) for key, j in pm.vars.x.items()}
    zs = {key: round(v[j]) for key, j in pm.vars.z.items()}
    replay = _ResidualLP(pm).value(_fixings(pm, xs, zs))
    replay_ok = abs(replay - solution.objective) <= AGREEMENT_TOL * max(1.0, abs(replay))
    report.agreement = report.discrepancy <= AGREEMENT_TOL and replay_ok
    return report
