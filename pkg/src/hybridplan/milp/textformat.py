"""Plain-text model format.

    # comment lines start with '#'
    MILP <num_vars> <num_rows>
    VAR <name> <lb> <ub> <C|B>                 (one per variable, in order)
    ROW <relation> <rhs> <index>:<coef> ...    (relation is <=, = or >=)
    OBJ <constant> <index>:<coef> ...
    END

Numbers are written with ``repr`` (shortest string that round-trips to the
same double), so export followed by import reproduces every coefficient
bit for bit. Infinite bounds are spelled ``inf`` / ``-inf``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .model import SENSES, MilpModel, ModelError

KINDS = {"C": False, "B": True}


class ModelFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _num(x: float) -> str:
    return repr(float(x))


def dumps(model: MilpModel) -> str:
    out = ["# hybridplan MILP model", f"MILP {model.num_vars} {model.num_rows}"]
    for j, name in enumerate(model.names):
        kind = "B" if model.binary[j] else "C"
        out.append(f"VAR {name} {_num(model.lb[j])} {_num(model.ub[j])} {kind}")
    rows = model.rows
    for i in range(model.num_rows):
        lo, hi = rows.indptr[i], rows.indptr[i + 1]
        terms = " ".join(f"{j}:{_num(v)}" for j, v in zip(rows.indices[lo:hi], rows.data[lo:hi]))
        out.append(f"ROW {model.senses[i]} {_num(model.rhs[i])} {terms}".rstrip())
    nz = np.flatnonzero(model.objective)
    terms = " ".join(f"{j}:{_num(model.objective[j])}" for j in nz)
    out.append(f"OBJ {_num(model.objective_constant)} {terms}".rstrip())
    out.append("END")
    return "\n".join(out) + "\n"


def _float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ModelFormatError(line, f"not a number: {token!r}") from None
    if math.isnan(value):
        raise ModelFormatError(line, "NaN is not allowed")
    return value


def _terms(tokens, line, n):
    cols, vals = [], []
    for tok in tokens:
        idx, sep, coef = tok.partition(":")
        if not sep:
            raise ModelFormatError(line, f"expected index:coef, got {tok!r}")
        try:
            j = int(idx)
        except ValueError:
            raise ModelFormatError(line, f"bad variable index {idx!r}") from None
        if not 0 <= j < n:
            raise ModelFormatError(line, f"variable index {j} out of range")
        value = _float(coef, line)
        if not math.isfinite(value):
            raise ModelFormatError(line, "coefficients must be finite")
        cols.append(j)
        vals.append(value)
    return cols, vals


def loads(text: str) -> MilpModel:
    header = None
    names, lbs, ubs, kinds = [], [], [], []
    indptr, cols, vals, senses, rhs = [0], [], [], [], []
    objective = None
    ended = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ended:
            raise ModelFormatError(lineno, "content after END")
        tokens = line.split()
        tag = tokens[0]
        if header is None:
            if tag != "MILP" or len(tokens) != 3:
                raise ModelFormatError(lineno, "expected header 'MILP <vars> <rows>'")
            try:
                header = (int(tokens[1]), int(tokens[2]))
            except ValueError:
                raise ModelFormatError(lineno, "header counts must be integers") from None
            continue
        n, m = header
        if tag == "VAR":
            if len(tokens) != 5:
                raise ModelFormatError(lineno, "VAR needs name, lb, ub, kind")
            if len(names) >= n:
                raise ModelFormatError(lineno, "more variables than declared")
            if tokens[4] not in KINDS:
                raise ModelFormatError(lineno, f"unknown variable kind {tokens[4]!r}")
            if tokens[1] in names:
                raise ModelFormatError(lineno, f"duplicate variable name {tokens[1]!r}")
            names.append(tokens[1])
            lbs.append(_float(tokens[2], lineno))
            ubs.append(_float(tokens[3], lineno))
            kinds.append(KINDS[tokens[4]])
        elif tag == "ROW":
            if len(tokens) < 3:
                raise ModelFormatError(lineno, "ROW needs relation and rhs")
            if len(senses) >= m:
                raise ModelFormatError(lineno, "more rows than declared")
            if tokens[1] not in SENSES:
                raise ModelFormatError(lineno, f"unknown relation {tokens[1]!r}")
            c, v = _terms(tokens[3:], lineno, n)
            if len(set(c)) != len(c):
                raise ModelFormatError(lineno, "repeated variable index in row")
            order = np.argsort(c, kind="stable")
            cols.extend(c[k] for k in order)
            vals.extend(v[k] for k in order)
            indptr.append(len(cols))
            senses.append(tokens[1])
            rhs.append(_float(tokens[2], lineno))
        elif tag == "OBJ":
            if objective is not None:
                raise ModelFormatError(lineno, "duplicate OBJ line")
            if len(tokens) < 2:
                raise ModelFormatError(lineno, "OBJ needs a constant")
            constant = _float(tokens[1], lineno)
            c, v = _terms(tokens[2:], lineno, n)
            objective = (constant, c, v)
        elif tag == "END":
            ended = True
        else:
            raise ModelFormatError(lineno, f"unknown record {tag!r}")
    last = len(text.splitlines())
    if header is None:
        raise ModelFormatError(last, "missing MILP header")
    if not ended:
        raise ModelFormatError(last, "missing END")
    n, m = header
    if len(names) != n or len(senses) != m:
        raise ModelFormatError(last, f"declared {n} vars / {m} rows, found {len(names)} / {len(senses)}")
    obj = np.zeros(n)
    constant = 0.0
    if objective is not None:
        constant, c, v = objective
        obj[c] = v
    rows = sp.csr_matrix((np.array(vals, float), np.array(cols, np.int64),
                          np.array(indptr, np.int64)), shape=(m, n))
    try:
        return MilpModel(tuple(names), np.array(lbs, float), np.array(ubs, float),
                         np.array(kinds, bool), rows, tuple(senses), np.array(rhs, float),
                         obj, constant)
    except ModelError as exc:
        raise ModelFormatError(last, str(exc)) from None


def export_model(model: MilpModel, path) -> None:
    Path(path).write_text(dumps(model), encoding="ascii")


def import_model(path) -> MilpModel:
    return loads(Path(path).read_text(encoding="ascii"))
