"""Solver-agnostic mixed-integer linear model (minimization)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

SENSES = ("<=", "=", ">=")


class ModelError(ValueError):
    """Raised when a model violates its structural invariants."""


@dataclass(frozen=True, eq=False)
class MilpModel:
    """Minimize ``objective @ x + objective_constant`` subject to
    ``rows[i] @ x  (sense[i])  rhs[i]`` and ``lb <= x <= ub``.

    ``rows`` is a CSR matrix; ``binary`` marks integrality. Arrays are made
    read-only on construction so a model can be shared between solves.
    """

    names: tuple[str, ...]
    lb: np.ndarray
    ub: np.ndarray
    binary: np.ndarray
    rows: sp.csr_matrix
    senses: tuple[str, ...]
    rhs: np.ndarray
    objective: np.ndarray
    objective_constant: float = 0.0
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.names)
        m = len(self.senses)
        for arr in (self.lb, self.ub, self.binary, self.objective):
            if arr.shape != (n,):
                raise ModelError(f"variable array has shape {arr.shape}, expected ({n},)")
        if self.rows.shape != (m, n) or self.rhs.shape != (m,):
            raise ModelError("row matrix / rhs shape mismatch")
        for arr in (self.lb, self.ub, self.binary, self.objective, self.rhs, self.rows.data):
            arr.flags.writeable = False
        object.__setattr__(self, "_index", {name: j for j, name in enumerate(self.names)})
        if len(self._index) != n:
            raise ModelError("variable names are not unique")

    @property
    def num_vars(self) -> int:
        return len(self.names)

    @property
    def num_rows(self) -> int:
        return len(self.senses)

    @property
    def num_binaries(self) -> int:
        return int(self.binary.sum())

    def index(self, name: str) -> int:
        return self._index[name]

    def validate(self) -> list[str]:
        """Return a list of invariant violations (empty when valid)."""
        problems = []
        for label, arr in (("objective", self.objective), ("rhs", self.rhs),
                           ("coefficients", self.rows.data)):
            if not np.all(np.isfinite(arr)):
                problems.append(f"non-finite {label}")
        if np.any(np.isnan(self.lb)) or np.any(np.isnan(self.ub)):
            problems.append("NaN bound")
        bad = np.flatnonzero(self.lb > self.ub)
        if bad.size:
            problems.append(f"lb > ub for {self.names[bad[0]]}")
        b = self.binary
        if np.any(self.lb[b] < 0) or np.any(self.ub[b] > 1):
            problems.append("binary variable bounds outside [0, 1]")
        for s in set(self.senses) - set(SENSES):
            problems.append(f"unknown relation {s!r}")
        if not math.isfinite(self.objective_constant):
            problems.append("non-finite objective constant")
        return problems

    def evaluate(self, x: np.ndarray) -> float:
        return float(self.objective @ x) + self.objective_constant

    def row_violation(self, x: np.ndarray) -> np.ndarray:
        """Per-row violation of ``x`` (zero when satisfied)."""
        act = self.rows @ x
        sense = np.asarray(self.senses)
        viol = np.zeros(self.num_rows)
        le = sense == "<="
        ge = sense == ">="
        eq = sense == "="
        viol[le] = np.maximum(act[le] - self.rhs[le], 0.0)
        viol[ge] = np.maximum(self.rhs[ge] - act[ge], 0.0)
        viol[eq] = np.abs(act[eq] - self.rhs[eq])
        return viol

    def with_bounds(self, lb: np.ndarray, ub: np.ndarray) -> "MilpModel":
        return MilpModel(self.names, np.array(lb, float), np.array(ub, float),
                         self.binary.copy(), self.rows, self.senses, self.rhs.copy(),
                         self.objective.copy(), self.objective_constant)

    def relaxed(self) -> "MilpModel":
        """Same model with integrality dropped."""
        return MilpModel(self.names, self.lb.copy(), self.ub.copy(),
                         np.zeros(self.num_vars, bool), self.rows, self.senses,
                         self.rhs.copy(), self.objective.copy(), self.objective_constant)

    def __eq__(self, other):
        if not isinstance(other, MilpModel):
            return NotImplemented
        if (self.names != other.names or self.senses != other.senses
                or self.objective_constant != other.objective_constant):
            return False
        arrays_equal = all(np.array_equal(a, b) for a, b in (
            (self.lb, other.lb), (self.ub, other.ub), (self.binary, other.binary),
            (self.rhs, other.rhs), (self.objective, other.objective)))
        if not arrays_equal:
            return False
        lhs, rhs = self.rows.tocsr(copy=True), other.rows.tocsr(copy=True)
        lhs.sort_indices()
        rhs.sort_indices()
        return (np.array_equal(lhs.indptr, rhs.indptr)
                and np.array_equal(lhs.indices, rhs.indices)
                and np.array_equal(lhs.data, rhs.data))

    __hash__ = None


class ModelBuilder:
    """Incremental construction of a :class:`MilpModel`.

    Variables and rows are numbered in insertion order, so building the same
    instance twice yields identical models.
    """

    def __init__(self):
        self._names: list[str] = []
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._binary: list[bool] = []
        self._obj: dict[int, float] = {}
        self._constant = 0.0
        self._row_ptr = [0]
        self._cols: list[int] = []
        self._vals: list[float] = []
        self._senses: list[str] = []
        self._rhs: list[float] = []
        self._seen: set[str] = set()

    @property
    def num_vars(self) -> int:
        return len(self._names)

    @property
    def num_rows(self) -> int:
        return len(self._senses)

    def add_var(self, name: str, lb: float = 0.0, ub: float = math.inf,
                binary: bool = False) -> int:
        if name in self._seen:
            raise ModelError(f"duplicate variable name {name!r}")
        if not name or any(ch.isspace() for ch in name):
            raise ModelError(f"variable name {name!r} is empty or contains whitespace")
        if binary:
            lb, ub = max(lb, 0.0), min(ub, 1.0)
        self._seen.add(name)
        self._names.append(name)
        self._lb.append(float(lb))
        self._ub.append(float(ub))
        self._binary.append(bool(binary))
        return len(self._names) - 1

    def add_row(self, terms, sense: str, rhs: float) -> int:
        """Add ``sum(coef * x[j] for j, coef in terms) (sense) rhs``.

        Repeated indices are summed; exact zeros are dropped.
        """
        if sense not in SENSES:
            raise ModelError(f"unknown relation {sense!r}")
        merged: dict[int, float] = {}
        for j, coef in (terms.items() if isinstance(terms, dict) else terms):
            merged[j] = merged.get(j, 0.0) + float(coef)
        for j in sorted(merged):
            if merged[j] != 0.0:
                self._cols.append(j)
                self._vals.append(merged[j])
        self._row_ptr.append(len(self._cols))
        self._senses.append(sense)
        self._rhs.append(float(rhs))
        return len(self._senses) - 1

    def add_objective(self, j: int, coef: float) -> None:
        self._obj[j] = self._obj.get(j, 0.0) + float(coef)

    def add_constant(self, value: float) -> None:
        self._constant += float(value)

    def build(self) -> MilpModel:
        n = len(self._names)
        rows = sp.csr_matrix(
            (np.array(self._vals, float), np.array(self._cols, np.int64),
             np.array(self._row_ptr, np.int64)), shape=(len(self._senses), n))
        obj = np.zeros(n)
        for j, coef in self._obj.items():
            obj[j] = coef
        return MilpModel(tuple(self._names), np.array(self._lb, float),
                         np.array(self._ub, float), np.array(self._binary, bool),
                         rows, tuple(self._senses), np.array(self._rhs, float),
                         obj, self._constant)
