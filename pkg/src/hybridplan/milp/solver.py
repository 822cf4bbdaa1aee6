"""LP relaxation and best-bound branch-and-bound on top of :mod:`.simplex`."""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .model import MilpModel, ModelError

OPTIMAL = "optimal"
FEASIBLE_GAP = "feasible_gap"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
LIMIT = "limit"
NUMERICAL = "numerical"

INTEGRALITY_TOL = 1e-6
SNAP_TOL = 1e-9


@dataclass
class SolveOptions:
    relative_gap: float = 1e-6
    node_limit: int | None = None
    time_limit: float | None = None
    deterministic_seed: int = 0
    feasibility_tol: float = 1e-7

    def __post_init__(self):
        if self.relative_gap < 0:
            raise ValueError("relative_gap must be >= 0")


@dataclass
class Solution:
    status: str
    objective: float
    best_bound: float
    values: np.ndarray | None
    nodes: int = 0
    wall_time: float = 0.0
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def has_values(self) -> bool:
        return self.values is not None

    @property
    def gap(self) -> float:
        if self.values is None or not math.isfinite(self.best_bound):
            return math.inf
        return max(0.0, self.objective - self.best_bound) / max(1.0, abs(self.objective))


def _check(model: MilpModel):
    problems = model.validate()
    if problems:
        raise ModelError("; ".join(problems))


def _presolve_rows(model: MilpModel):
    """Drop empty rows; returns (keep mask, infeasible flag)."""
    counts = np.diff(model.rows.indptr)
    empty = counts == 0
    infeasible = False
    for i in np.flatnonzero(empty):
        s, b = model.senses[i], model.rhs[i]
        if (s == "<=" and b < -1e-12) or (s == ">=" and b > 1e-12) or (s == "=" and abs(b) > 1e-12):
            infeasible = True
    return ~empty, infeasible


class _Engine:
    """Simplex engine bound to one model, with presolved rows."""

    def __init__(self, model: MilpModel):
        keep, self.trivially_infeasible = _presolve_rows(model)
        rows = model.rows[np.flatnonzero(keep)]
        senses = [s for s, k in zip(model.senses, keep) if k]
        self.lp = simplex.BoundedSimplex(rows, senses, model.rhs[keep], model.objective)
        self.model = model

    def solve(self, lb, ub, basis=None) -> simplex.LPResult:
        if self.trivially_infeasible:
            return simplex.LPResult(INFEASIBLE, None, math.inf, None, 0)
        return self.lp.solve(lb, ub, basis)


def _snap(values, lb, ub, binary):
    v = values.copy()
    v[binary] = np.round(v[binary])
    near_lb = np.abs(v - lb) <= SNAP_TOL * np.maximum(1.0, np.abs(lb))
    v[near_lb] = lb[near_lb]
    near_ub = np.abs(v - ub) <= SNAP_TOL * np.maximum(1.0, np.abs(ub))
    v[near_ub] = ub[near_ub]
    return v


def solve_lp(model: MilpModel) -> Solution:
    """Solve the continuous relaxation of ``model``."""
    _check(model)
    start = time.perf_counter()
    engine = _Engine(model)
    res = engine.solve(model.lb, model.ub)
    elapsed = time.perf_counter() - start
    if res.status != simplex.OPTIMAL:
        obj = math.inf if res.status == INFEASIBLE else -math.inf if res.status == UNBOUNDED else math.nan
        return Solution(res.status if res.status != simplex.LIMIT else LIMIT, obj, obj, None,
                        0, elapsed, res.iterations)
    values = np.clip(res.x, model.lb, model.ub)
    obj = model.evaluate(values)
    return Solution(OPTIMAL, obj, obj, values, 0, elapsed, res.iterations)


@dataclass(order=True)
class _Node:
    bound: float
    neg_depth: int
    ident: int
    fixings: tuple = field(compare=False)
    basis: simplex.Basis | None = field(compare=False)


def solve(model: MilpModel, options: SolveOptions | None = None) -> Solution:
    """Best-bound branch-and-bound over the binary variables of ``model``.

    Nodes are explored in order of (LP bound, deeper first, creation order);
    branching picks the most fractional binary, lowest index on ties. No
    randomness is involved, so identical inputs give identical trees.
    """
    options = options or SolveOptions()
    _check(model)
    start = time.perf_counter()
    engine = _Engine(model)
    binaries = np.flatnonzero(model.binary)
    base_lb, base_ub = np.array(model.lb, float), np.array(model.ub, float)

    def bounds_for(fixings):
        lb, ub = base_lb.copy(), base_ub.copy()
        for j, v in fixings:
            lb[j] = ub[j] = v
        return lb, ub

    incumbent = None
    incumbent_obj = math.inf
    pruned_bound = math.inf
    iterations = 0
    nodes = 0
    counter = 0
    queue: list[_Node] = [_Node(-math.inf, 0, 0, (), None)]
    status = None

    def abs_gap(obj):
        return options.relative_gap * max(1.0, abs(obj))

    while queue:
        open_bound = queue[0].bound
        if incumbent is not None and incumbent_obj - min(open_bound, pruned_bound) <= abs_gap(incumbent_obj):
            break
        if options.node_limit is not None and nodes >= options.node_limit:
            status = LIMIT
            break
        if options.time_limit is not None and time.perf_counter() - start > options.time_limit:
            status = LIMIT
            break

        node = heapq.heappop(queue)
        if node.bound >= incumbent_obj - abs_gap(incumbent_obj):
            pruned_bound = min(pruned_bound, node.bound)
            continue
        nodes += 1
        lb, ub = bounds_for(node.fixings)
        res = engine.solve(lb, ub, node.basis)
        iterations += res.iterations
        if res.status == simplex.INFEASIBLE:
            continue
        if res.status == simplex.UNBOUNDED:
            if nodes == 1:
                return Solution(UNBOUNDED, -math.inf, -math.inf, None, nodes,
                                time.perf_counter() - start, iterations)
            continue
        if res.status != simplex.OPTIMAL:
            if nodes == 1:
                return Solution(res.status if res.status != simplex.LIMIT else LIMIT, math.nan,
                                -math.inf, None, nodes, time.perf_counter() - start, iterations)
            # unreliable node: keep its parent bound so the reported bound stays honest
            pruned_bound = min(pruned_bound, node.bound)
            continue
        values = np.clip(res.x, lb, ub)
        obj = model.evaluate(values)
        if obj >= incumbent_obj - abs_gap(incumbent_obj):
            pruned_bound = min(pruned_bound, obj)
            continue

        frac = np.abs(values[binaries] - np.round(values[binaries]))
        if binaries.size == 0 or frac.max() <= INTEGRALITY_TOL:
            cand = _polish(engine, model, values, lb, ub, res.basis)
            if cand is not None:
                c_obj = model.evaluate(cand)
                if c_obj < incumbent_obj:
                    incumbent, incumbent_obj = cand, c_obj
            continue

        # most fractional binary; argmax returns the lowest index on ties
        k = int(np.argmax(np.round(frac, 12)))
        j = int(binaries[k])
        depth = len(node.fixings) + 1
        for v in (1.0, 0.0):
            counter += 1
            heapq.heappush(queue, _Node(obj, -depth, counter, node.fixings + ((j, v),),
                                        res.basis.copy()))

    elapsed = time.perf_counter() - start
    open_bound = queue[0].bound if queue else math.inf
    if incumbent is None:
        if status == LIMIT:
            return Solution(LIMIT, math.nan, min(open_bound, pruned_bound), None, nodes,
                            elapsed, iterations)
        return Solution(INFEASIBLE, math.inf, math.inf, None, nodes, elapsed, iterations)
    bound = min(incumbent_obj, open_bound, pruned_bound)
    sol = Solution(status or OPTIMAL, incumbent_obj, bound, incumbent, nodes, elapsed, iterations)
    return sol


def _polish(engine, model, values, lb, ub, basis):
    """Fix binaries at their rounded values and re-solve the LP.

    Gives an incumbent whose binaries are exactly 0/1 and whose continuous
    part is optimal for that fixing.
    """
    binary = model.binary
    rounded = np.round(values[binary])
    plb, pub = lb.copy(), ub.copy()
    plb[binary] = rounded
    pub[binary] = rounded
    res = engine.solve(plb, pub, basis)
    if res.status != simplex.OPTIMAL:
        return None
    return _snap(np.clip(res.x, plb, pub), plb, pub, binary)
