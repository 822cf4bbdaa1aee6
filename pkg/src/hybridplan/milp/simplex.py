"""Bounded-variable primal simplex with a sparse LU basis factorization.

Every row ``a_i x (sense) b_i`` gets a logical (slack) variable ``s_i`` so the
system reads ``A x + s = b`` with sign-restricted slacks:

    <=  ->  s in [0, inf)
    >=  ->  s in (-inf, 0]
    =   ->  s in [0, 0]

Phase 1 minimizes the sum of bound infeasibilities of the basic variables
starting from *any* basis (the all-slack basis on a cold start, the parent's
optimal basis inside branch-and-bound). The ratio test stops at the first
breakpoint, so the infeasibility sum never increases. Phase 2 is the usual
bounded primal simplex. Pricing is Dantzig's rule; after a run of degenerate
pivots it falls back to Bland's rule until progress resumes.

The basis inverse is kept in product form: a sparse LU of the basis at the
last refactorization followed by one eta column per pivot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
LIMIT = "limit"
NUMERICAL = "numerical"


@dataclass
class Basis:
    """Basic variable indices plus the nonbasic-at-upper flags.

    Indices ``>= n`` refer to row slacks.
    """

    head: np.ndarray
    at_upper: np.ndarray

    def copy(self) -> "Basis":
        return Basis(self.head.copy(), self.at_upper.copy())


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None
    objective: float
    basis: Basis | None
    iterations: int


class _Factor:
    """Basis inverse as ``E_k ... E_1 (LU)^-1``."""

    def __init__(self, lu, m):
        self.lu = lu
        self.m = m
        self.etas: list[tuple[int, np.ndarray]] = []

    def copy(self) -> "_Factor":
        f = _Factor(self.lu, self.m)
        f.etas = list(self.etas)
        return f

    def ftran(self, a: np.ndarray) -> np.ndarray:
        w = self.lu.solve(a) if self.lu is not None else a.copy()
        for r, alpha in self.etas:
            wr = w[r] / alpha[r]
            if wr != 0.0:
                w -= wr * alpha
            w[r] = wr
        return w

    def btran(self, c: np.ndarray) -> np.ndarray:
        v = c.copy()
        for r, alpha in reversed(self.etas):
            vr = v[r]
            v[r] = 0.0
            v[r] = (vr - v @ alpha) / alpha[r]
        return self.lu.solve(v, trans="T") if self.lu is not None else v

    def update(self, r: int, alpha: np.ndarray) -> None:
        self.etas.append((r, alpha))


class BoundedSimplex:
    """Reusable LP engine for a fixed constraint matrix.

    Bounds change between calls to :meth:`solve` (branch-and-bound fixes
    binaries); the row data and objective stay put.
    """

    def __init__(self, rows, senses, rhs, cost, *, feas_tol=1e-9, opt_tol=1e-9,
                 pivot_tol=1e-9, refactor_every=64, max_iter=None):
        A = sp.csc_matrix(rows, dtype=float)
        A.sort_indices()
        self.A = A
        self.At = A.T.tocsr()
        self.m, self.n = A.shape
        self.M = sp.hstack([A, sp.identity(self.m, format="csc")], format="csc")
        self.b = np.asarray(rhs, float)
        senses = np.asarray(senses)
        self.slack_lb = np.where(senses == ">=", -np.inf, 0.0)
        self.slack_ub = np.where(senses == "<=", np.inf, 0.0)
        cost = np.asarray(cost, float)
        self.cost_scale = max(1.0, float(np.max(np.abs(cost)))) if cost.size else 1.0
        self.cost = np.concatenate([cost / self.cost_scale, np.zeros(self.m)])
        self.raw_cost = cost
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.pivot_tol = pivot_tol
        self.refactor_every = refactor_every
        self.max_iter = max_iter or 50 * (self.m + self.n) + 1000
        # warm state kept between calls
        self._head = None
        self._factor_cache = None

    # -- helpers -----------------------------------------------------------

    def slack_basis(self) -> Basis:
        return Basis(np.arange(self.n, self.n + self.m), np.zeros(self.n + self.m, bool))

    def _column(self, j) -> np.ndarray:
        col = np.zeros(self.m)
        lo, hi = self.M.indptr[j], self.M.indptr[j + 1]
        col[self.M.indices[lo:hi]] = self.M.data[lo:hi]
        return col

    def _factor(self, head):
        if self.m == 0:
            return _Factor(None, 0)
        if np.array_equal(head, np.arange(self.n, self.n + self.m)):
            return _Factor(None, self.m)
        B = self.M[:, head].tocsc()
        try:
            lu = spla.splu(B, permc_spec="COLAMD")
        except RuntimeError:
            return None
        diag = np.abs(lu.U.diagonal())
        if diag.size and diag.min() < 1e-11 * max(1.0, diag.max()):
            return None
        return _Factor(lu, self.m)

    def _place_nonbasic(self, x, L, U, at_upper, basic):
        """Put every nonbasic variable at the bound its flag points to."""
        nb = ~basic
        up = nb & at_upper & np.isfinite(U)
        lo = nb & ~up & np.isfinite(L)
        up |= nb & ~lo & np.isfinite(U)
        free = nb & ~lo & ~up
        x[lo] = L[lo]
        x[up] = U[up]
        x[free] = 0.0
        at_upper[:] = up | (at_upper & basic)

    def _basic_values(self, x, basic, head, factor):
        xs = np.where(basic[: self.n], 0.0, x[: self.n])
        xl = np.where(basic[self.n:], 0.0, x[self.n:])
        r = self.b - self.A @ xs - xl
        x[head] = factor.ftran(r)

    # -- main entry ----------------------------------------------------------

    def solve(self, lb, ub, basis: Basis | None = None) -> LPResult:
        n, m = self.n, self.m
        N = n + m
        L = np.concatenate([np.asarray(lb, float), self.slack_lb])
        U = np.concatenate([np.asarray(ub, float), self.slack_ub])
        if np.any(L > U):
            return LPResult(INFEASIBLE, None, np.inf, None, 0)
        if basis is None:
            basis = self.slack_basis()
        head = basis.head.copy()
        at_upper = basis.at_upper.copy()

        if self._head is not None and np.array_equal(self._head, head):
            factor = self._factor_cache.copy()
        else:
            factor = self._factor(head)
            if factor is None:
                basis = self.slack_basis()
                head, at_upper = basis.head.copy(), basis.at_upper.copy()
                factor = self._factor(head)
        basic = np.zeros(N, bool)
        basic[head] = True
        x = np.zeros(N)
        self._place_nonbasic(x, L, U, at_upper, basic)
        self._basic_values(x, basic, head, factor)

        ftol = self.feas_tol * np.maximum(1.0, np.minimum(np.abs(L), np.abs(U)))
        ftol = np.where(np.isfinite(ftol), ftol, self.feas_tol)
        cost = self.cost
        degenerate_run = 0
        retries = 0
        it = 0
        while True:
            if it >= self.max_iter:
                return self._finish(LIMIT, x, head, at_upper, factor, it)
            if len(factor.etas) >= self.refactor_every:
                fresh = self._factor(head)
                if fresh is not None:
                    factor = fresh
                    self._basic_values(x, basic, head, factor)

            xB = x[head]
            lB, uB = L[head], U[head]
            tB = ftol[head]
            below = xB < lB - tB
            above = xB > uB + tB
            phase1 = bool(below.any() or above.any())
            if phase1:
                cB = np.where(below, -1.0, np.where(above, 1.0, 0.0))
                y = factor.btran(cB)
                d = np.concatenate([-(self.At @ y), -y])
            else:
                y = factor.btran(cost[head])
                d = cost - np.concatenate([self.At @ y, y])
            d[head] = 0.0

            movable_up = ~basic & (x < U)
            movable_dn = ~basic & (x > L)
            score = np.where(movable_up & (d < -self.opt_tol), -d, 0.0)
            score = np.maximum(score, np.where(movable_dn & (d > self.opt_tol), d, 0.0))
            candidates = np.flatnonzero(score)
            if candidates.size == 0:
                status = INFEASIBLE if phase1 else OPTIMAL
                if not self._residual_ok(x, head, factor, basic):
                    if retries < 2:
                        retries += 1
                        fresh = self._factor(head)
                        if fresh is None:
                            return self._finish(NUMERICAL, x, head, at_upper, factor, it)
                        factor = fresh
                        self._basic_values(x, basic, head, factor)
                        continue
                    if not phase1:
                        status = NUMERICAL
                return self._finish(status, x, head, at_upper, factor, it)

            bland = degenerate_run > 25
            j = int(candidates[0]) if bland else int(candidates[np.argmax(score[candidates])])
            direction = 1.0 if (d[j] < 0 and movable_up[j]) else -1.0

            alpha = factor.ftran(self._column(j))
            delta = -direction * alpha

            limits = np.full(m, np.inf)
            to_upper = np.zeros(m, bool)
            feasible = ~(below | above)
            dec = delta < -self.pivot_tol
            inc = delta > self.pivot_tol
            with np.errstate(invalid="ignore", divide="ignore"):
                sel = feasible & dec & np.isfinite(lB)
                limits[sel] = np.maximum(xB[sel] - lB[sel], 0.0) / -delta[sel]
                sel = feasible & inc & np.isfinite(uB)
                limits[sel] = np.maximum(uB[sel] - xB[sel], 0.0) / delta[sel]
                to_upper[sel] = True
                sel = below & inc
                limits[sel] = (lB[sel] - xB[sel]) / delta[sel]
                sel = above & dec
                limits[sel] = (xB[sel] - uB[sel]) / -delta[sel]
                to_upper[sel] = True

            flip = U[j] - L[j]
            theta = float(limits.min()) if m else np.inf
            if np.isfinite(flip) and flip <= theta:
                theta, leave = flip, -1
            elif not np.isfinite(theta):
                if phase1:
                    return self._finish(NUMERICAL, x, head, at_upper, factor, it)
                return self._finish(UNBOUNDED, x, head, at_upper, factor, it)
            else:
                ties = np.flatnonzero(limits <= theta + 1e-12 * (1.0 + theta))
                if bland:
                    leave = int(ties[np.argmin(head[ties])])
                else:
                    leave = int(ties[np.argmax(np.abs(alpha[ties]))])

            it += 1
            degenerate_run = degenerate_run + 1 if theta <= 1e-12 else 0
            x[j] += direction * theta
            x[head] += theta * delta
            if leave < 0:
                x[j] = U[j] if direction > 0 else L[j]
                at_upper[j] = direction > 0
                continue

            out = int(head[leave])
            x[out] = U[out] if to_upper[leave] else L[out]
            at_upper[out] = bool(to_upper[leave])
            basic[out] = False
            basic[j] = True
            at_upper[j] = False
            head[leave] = j
            factor.update(leave, alpha)

    def _residual_ok(self, x, head, factor, basic) -> bool:
        fresh = x.copy()
        self._basic_values(fresh, basic, head, factor)
        drift = np.abs(fresh[head] - x[head])
        scale = np.maximum(1.0, np.abs(x[head]))
        if np.any(drift > 1e-9 * scale):
            return False
        act = self.A @ x[: self.n] + x[self.n:]
        return bool(np.all(np.abs(act - self.b) <= 1e-8 * np.maximum(1.0, np.abs(self.b))))

    def _refine(self, x, head, factor, steps=2):
        """Iterative refinement of the basic values against the original rows."""
        for _ in range(steps):
            r = self.b - self.A @ x[: self.n] - x[self.n:]
            if not np.any(r):
                return
            x[head] += factor.ftran(r)

    def _finish(self, status, x, head, at_upper, factor, it) -> LPResult:
        if status == OPTIMAL and self.m:
            self._refine(x, head, factor)
        self._head = head.copy()
        self._factor_cache = factor.copy()
        basis = Basis(head.copy(), at_upper.copy())
        xs = x[: self.n].copy()
        if status != OPTIMAL:
            return LPResult(status, xs if status == LIMIT else None,
                            np.inf if status == INFEASIBLE else -np.inf if status == UNBOUNDED
                            else np.nan, basis, it)
        return LPResult(status, xs, float(self.raw_cost @ xs), basis, it)
