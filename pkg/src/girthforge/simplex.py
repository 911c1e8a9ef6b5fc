"""Bounded-variable revised primal simplex over sparse columns.

The engine solves   min c'x  s.t.  A_eq x = b_eq,  A_le x <= b_le,
l <= x <= u   and is the only LP code in the package.  Every row carries an
auxiliary column with coefficient +1: a genuine slack (bounds [0, inf)) for
<= rows, a pinned column (bounds [0, 0]) for = rows.  The all-auxiliary
basis is therefore always invertible, and a composite phase 1 that drives
bound violations of basic variables to zero doubles as the warm-start
repair: a stale basis from a related problem is loaded, violated basics are
priced with +-1 costs, and ordinary pivots restore feasibility.

Pricing is Dantzig with a Bland fallback after a degenerate stall, and all
tie-breaks go to the smallest column index so repeated solves are
bit-reproducible.  The basis is held in product form: a sparse LU
factorization refreshed every REFACTOR_EVERY pivots plus an eta file of
rank-1 updates in between, so a pivot costs O(m) and a refactorization
costs only the sparse factor time.  Cut rows are short, which keeps the
factors near-diagonal even when thousands of rows have been appended.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .budget import Deadline

EPS_FEAS = 1e-7
EPS_COST = 1e-9
REFACTOR_EVERY = 64
STALL_LIMIT = 600


class SimplexBreakdown(RuntimeError):
    """Numerical failure: singular basis or iteration cap without progress."""


class LpError(ValueError):
    """Malformed problem input."""


@dataclass
class LpProblem:
    """Column bounds, objective, and an appendable list of rows.

    Structural columns are fixed at construction; rows may be appended
    later (each new row silently gains its auxiliary column), which is how
    cutting planes arrive.
    """

    ncols: int
    objective: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    row_cols: list = field(default_factory=list)
    row_vals: list = field(default_factory=list)
    senses: list = field(default_factory=list)
    rhs: list = field(default_factory=list)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        for arr in (self.objective, self.lower, self.upper):
            if arr.shape != (self.ncols,):
                raise LpError(f"array shape {arr.shape} != ({self.ncols},)")
        if np.any(self.lower > self.upper):
            raise LpError("lower bound above upper bound")
        self._amat = None
        self._amat_t = None

    @property
    def nrows(self) -> int:
        return len(self.rhs)

    def add_row(self, cols, vals, sense: str, rhs: float) -> int:
        if sense not in ("=", "<="):
            raise LpError(f"unsupported row sense {sense!r}")
        cols = np.asarray(cols, dtype=np.int64)
        if cols.size and (cols.min() < 0 or cols.max() >= self.ncols):
            raise LpError("row references a column outside the problem")
        self.row_cols.append(cols)
        self.row_vals.append(np.asarray(vals, dtype=float))
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        self._amat = None
        self._amat_t = None
        return len(self.rhs) - 1

    def set_bounds(self, col: int, lo: float, hi: float):
        if lo > hi:
            raise LpError(f"bounds crossed for column {col}: [{lo}, {hi}]")
        self.lower[col] = lo
        self.upper[col] = hi

    def full_matrix(self):
        """CSC matrix over structural plus auxiliary columns, cached."""
        m = self.nrows
        if self._amat is not None and self._amat.shape[0] == m:
            return self._amat
        data, rows, cols = [], [], []
        for r in range(m):
            data.append(self.row_vals[r])
            rows.append(np.full(self.row_cols[r].shape, r, dtype=np.int64))
            cols.append(self.row_cols[r])
        # auxiliary identity block
        data.append(np.ones(m))
        rows.append(np.arange(m, dtype=np.int64))
        cols.append(np.arange(self.ncols, self.ncols + m, dtype=np.int64))
        amat = sp.csc_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(m, self.ncols + m),
        )
        self._amat = amat
        return amat

    def full_matrix_t(self):
        if self._amat_t is None or self._amat_t.shape[1] != self.nrows:
            self._amat_t = self.full_matrix().T.tocsr()
        return self._amat_t


@dataclass(frozen=True)
class LpBasis:
    """Warm-start descriptor: one basic column per row plus column states."""

    basis: np.ndarray
    vstat: np.ndarray
    ntotal: int


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible"
    objective: Optional[float]
    x: Optional[np.ndarray]
    dual_bound: Optional[float]
    basis: Optional[LpBasis]
    iterations: int


AT_LOWER, AT_UPPER, BASIC = 0, 1, 2


class _Engine:
    def __init__(self, problem: LpProblem, deadline: Deadline):
        self.p = problem
        self.deadline = deadline
        m = problem.nrows
        n = problem.ncols
        self.m = m
        self.ntotal = n + m
        self.A = problem.full_matrix()
        self.At = problem.full_matrix_t()
        self.b = np.asarray(problem.rhs, dtype=float)
        self.c = np.concatenate([problem.objective, np.zeros(m)])
        aux_up = np.array(
            [np.inf if s == "<=" else 0.0 for s in problem.senses]
        )
        self.l = np.concatenate([problem.lower, np.zeros(m)])
        self.u = np.concatenate([problem.upper, aux_up])
        self.iterations = 0
        self.bland = False
        self.stall = 0
        self.pivots_since_refactor = 0

    # -- basis management ---------------------------------------------------

    def load_default_basis(self):
        self.basis = np.arange(self.p.ncols, self.ntotal, dtype=np.int64)
        self.vstat = np.full(self.ntotal, AT_LOWER, dtype=np.int8)
        self.vstat[self.basis] = BASIC
        self.lu = None  # identity basis needs no factor
        self.etas = []
        self.sync_x()

    def load_basis(self, warm: LpBasis) -> bool:
        basis = np.array(warm.basis, dtype=np.int64)
        vstat = np.array(warm.vstat, dtype=np.int8)
        missing = self.ntotal - warm.ntotal
        if missing < 0 or len(basis) + missing != self.m:
            return False
        if missing:
            # rows appended since the basis was saved: their aux columns
            # enter the basis, keeping it block-triangular and invertible
            new_aux = np.arange(warm.ntotal, self.ntotal, dtype=np.int64)
            basis = np.concatenate([basis, new_aux])
            vstat = np.concatenate([vstat, np.full(missing, BASIC, dtype=np.int8)])
        if len(np.unique(basis)) != self.m or basis.max() >= self.ntotal:
            return False
        vstat[basis] = BASIC
        self.basis = basis
        self.vstat = vstat
        if not self.refactor():
            return False
        self.sync_x()
        return True

    def refactor(self) -> bool:
        if self.m == 0:
            self.lu = None
            self.etas = []
            self.pivots_since_refactor = 0
            return True
        bmat = self.A[:, self.basis].tocsc()
        try:
            self.lu = splu(bmat)
        except RuntimeError:
            return False
        self.etas = []
        self.pivots_since_refactor = 0
        return True

    def ftran(self, v):
        """B^-1 v through the factor and the eta file; consumes v."""
        if self.lu is not None:
            v = self.lu.solve(v)
        for pos, w, wp in self.etas:
            t = v[pos] / wp
            v -= t * w
            v[pos] = t
        return v

    def btran(self, y):
        """y B^-1 (row vector times inverse); consumes y."""
        for pos, w, wp in reversed(self.etas):
            y[pos] = (y[pos] - y @ w + y[pos] * wp) / wp
        if self.lu is not None:
            y = self.lu.solve(y, trans="T")
        return y

    def sync_x(self):
        x = np.where(self.vstat == AT_UPPER, self.u, self.l)
        x[~np.isfinite(x)] = 0.0
        x[self.basis] = 0.0
        resid = self.b - self.A @ x
        x[self.basis] = self.ftran(resid)
        self.x = x

    # -- pricing ------------------------------------------------------------

    def reduced_costs(self, cvec):
        y = self.btran(cvec[self.basis].astype(float))
        d = cvec - self.At @ y
        return y, d

    def pick_entering(self, d):
        lo_ok = (self.vstat == AT_LOWER) & (self.l < self.u)
        up_ok = (self.vstat == AT_UPPER) & (self.l < self.u)
        score = np.zeros(self.ntotal)
        score[lo_ok] = -d[lo_ok]
        score[up_ok] = d[up_ok]
        if self.bland:
            idx = np.nonzero(score > EPS_COST)[0]
            return int(idx[0]) if idx.size else -1
        j = int(np.argmax(score))
        return j if score[j] > EPS_COST else -1

    # -- ratio test ---------------------------------------------------------

    def ratio_test(self, j, direction, w, phase1):
        """Largest step for entering column j moving in +-1 direction.

        Returns (theta, leaving_pos, leaving_bound) where leaving_pos is -1
        for a bound flip of the entering column itself.  In phase 1 a basic
        variable outside its bounds blocks at the violated bound it is
        approaching (slope change point) and is free otherwise.
        """
        xb = self.x[self.basis]
        lb = self.l[self.basis]
        ub = self.u[self.basis]
        delta = -direction * w
        theta = np.full(self.m, np.inf)
        bound_hit = np.zeros(self.m, dtype=np.int8)

        inc = delta > EPS_COST
        dec = delta < -EPS_COST
        if phase1:
            below = xb < lb - EPS_FEAS
            above = xb > ub + EPS_FEAS
            inside = ~(below | above)
            sel = inc & inside & np.isfinite(ub)
            theta[sel] = (ub[sel] - xb[sel]) / delta[sel]
            bound_hit[sel] = 1
            sel = inc & below
            theta[sel] = (lb[sel] - xb[sel]) / delta[sel]
            bound_hit[sel] = 0
            sel = dec & inside
            theta[sel] = (lb[sel] - xb[sel]) / delta[sel]
            bound_hit[sel] = 0
            sel = dec & above & np.isfinite(ub)
            theta[sel] = (ub[sel] - xb[sel]) / delta[sel]
            bound_hit[sel] = 1
        else:
            sel = inc & np.isfinite(ub)
            theta[sel] = (ub[sel] - xb[sel]) / delta[sel]
            bound_hit[sel] = 1
            sel = dec
            theta[sel] = (lb[sel] - xb[sel]) / delta[sel]
            bound_hit[sel] = 0
        np.maximum(theta, 0.0, out=theta)

        span = self.u[j] - self.l[j]
        tmin = float(theta.min()) if self.m else np.inf
        if span <= tmin:
            return span, -1, 0
        if not np.isfinite(tmin):
            return np.inf, -1, 0
        ties = np.nonzero(theta <= tmin + 1e-12)[0]
        if self.bland:
            pos = int(ties[np.argmin(self.basis[ties])])
        else:
            pos = int(ties[np.argmax(np.abs(w[ties]))])
        return float(theta[pos]), pos, int(bound_hit[pos])

    # -- pivoting -----------------------------------------------------------

    def column(self, j):
        a = self.A
        w = np.zeros(self.m)
        sl = slice(a.indptr[j], a.indptr[j + 1])
        w[a.indices[sl]] = a.data[sl]
        return self.ftran(w)

    def pivot(self, j, direction, theta, pos, bound_hit, w):
        self.x[self.basis] -= theta * direction * w
        self.x[j] = self.x[j] + direction * theta
        if pos < 0:
            # bound flip, basis unchanged
            self.vstat[j] = AT_UPPER if direction > 0 else AT_LOWER
            self.x[j] = self.u[j] if direction > 0 else self.l[j]
            return
        leaving = self.basis[pos]
        if bound_hit == 1:
            self.vstat[leaving] = AT_UPPER
            self.x[leaving] = self.u[leaving]
        else:
            self.vstat[leaving] = AT_LOWER
            self.x[leaving] = self.l[leaving]
        self.basis[pos] = j
        self.vstat[j] = BASIC
        self.etas.append((pos, w, w[pos]))
        self.pivots_since_refactor += 1
        if self.pivots_since_refactor >= REFACTOR_EVERY:
            if not self.refactor():
                raise SimplexBreakdown("singular basis during refactorization")
            self.sync_x()

    # -- violation bookkeeping ----------------------------------------------

    def violation(self):
        """(total, max) bound violation over the basic variables."""
        xb = self.x[self.basis]
        lo = np.maximum(self.l[self.basis] - xb, 0.0)
        hi = np.maximum(xb - self.u[self.basis], 0.0)
        hi[~np.isfinite(hi)] = 0.0
        return float(lo.sum() + hi.sum()), float(max(lo.max(), hi.max(), 0.0))

    def phase1_costs(self):
        g = np.zeros(self.ntotal)
        xb = self.x[self.basis]
        below = xb < self.l[self.basis] - EPS_FEAS
        above = xb > self.u[self.basis] + EPS_FEAS
        g[self.basis[below]] = -1.0
        g[self.basis[above]] = 1.0
        return g

    # -- main loops ----------------------------------------------------------

    def run_phase1(self) -> bool:
        """Drive bound violations of basics to zero; False means infeasible."""
        self.bland = False
        self.stall = 0
        last = np.inf
        cap = 20000 + 30 * self.m
        for _ in range(cap):
            viol, worst = self.violation()
            if worst <= EPS_FEAS:
                return True
            if self.iterations % 64 == 0:
                self.deadline.check()
            g = self.phase1_costs()
            _, d = self.reduced_costs(g)
            j = self.pick_entering(d)
            if j < 0:
                if self.bland:
                    return False
                # confirm under Bland before declaring infeasible
                self.bland = True
                continue
            direction = 1 if self.vstat[j] == AT_LOWER else -1
            w = self.column(j)
            theta, pos, hit = self.ratio_test(j, direction, w, phase1=True)
            if not np.isfinite(theta):
                raise SimplexBreakdown("unbounded phase-1 direction")
            self.pivot(j, direction, theta, pos, hit, w)
            self.iterations += 1
            if viol < last - 1e-12:
                self.stall = 0
                self.bland = False
            else:
                self.stall += 1
                if self.stall > STALL_LIMIT:
                    self.bland = True
            last = min(last, viol)
        raise SimplexBreakdown("phase-1 iteration cap reached")

    def run_phase2(self):
        self.bland = False
        self.stall = 0
        last = np.inf
        cap = 50000 + 30 * self.m
        for _ in range(cap):
            if self.iterations % 64 == 0:
                self.deadline.check()
            y, d = self.reduced_costs(self.c)
            j = self.pick_entering(d)
            if j < 0:
                return y, d
            direction = 1 if self.vstat[j] == AT_LOWER else -1
            w = self.column(j)
            theta, pos, hit = self.ratio_test(j, direction, w, phase1=False)
            if not np.isfinite(theta):
                raise SimplexBreakdown("unbounded LP relaxation")
            self.pivot(j, direction, theta, pos, hit, w)
            self.iterations += 1
            obj = float(self.c @ self.x)
            if obj < last - 1e-12:
                self.stall = 0
                self.bland = False
                last = obj
            else:
                self.stall += 1
                if self.stall > STALL_LIMIT:
                    self.bland = True
        raise SimplexBreakdown("phase-2 iteration cap reached")


def _dual_bound(engine: _Engine, y, d) -> float:
    """Weak-duality bound y'b + sum over nonbasic of best d_j * bound."""
    val = float(y @ engine.b)
    nb = engine.vstat != BASIC
    dj = d[nb]
    lo = engine.l[nb]
    hi = engine.u[nb]
    take_lo = dj >= 0
    with np.errstate(invalid="ignore"):
        contrib = np.where(take_lo, dj * lo, dj * hi)
    contrib[np.isnan(contrib)] = 0.0  # 0 * inf from pinned columns
    return val + float(contrib.sum())


def solve(
    problem: LpProblem,
    warm: Optional[LpBasis] = None,
    deadline: Optional[Deadline] = None,
) -> LpSolution:
    """Solve the LP, optionally starting from a saved basis.

    Returns an LpSolution with status "optimal" or "infeasible".  Raises
    SimplexBreakdown on numerical failure and TimeLimitReached when the
    deadline expires mid-solve.
    """
    deadline = deadline or Deadline(None)
    engine = _Engine(problem, deadline)
    if warm is not None and engine.load_basis(warm):
        try:
            if engine.run_phase1():
                y, d = engine.run_phase2()
                return _finalize(engine, problem, y, d)
        except SimplexBreakdown:
            pass
        # a stale basis can wedge the repair; retry cold before giving up
        engine = _Engine(problem, deadline)

    engine.load_default_basis()
    if not engine.run_phase1():
        return LpSolution(
            status="infeasible",
            objective=None,
            x=None,
            dual_bound=None,
            basis=None,
            iterations=engine.iterations,
        )
    y, d = engine.run_phase2()
    return _finalize(engine, problem, y, d)


def _finalize(engine: _Engine, problem: LpProblem, y, d) -> LpSolution:
    engine.sync_x()
    obj = float(engine.c @ engine.x)
    basis = LpBasis(
        basis=engine.basis.copy(),
        vstat=engine.vstat.copy(),
        ntotal=engine.ntotal,
    )
    return LpSolution(
        status="optimal",
        objective=obj,
        x=engine.x[: problem.ncols].copy(),
        dual_bound=_dual_bound(engine, y, d),
        basis=basis,
        iterations=engine.iterations,
    )
