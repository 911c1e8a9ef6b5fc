"""Branch and cut over the degree-deviation program.

The tree search keeps one shared LP and rebinds cell bounds per node.
Cycle constraints never enter the initial LP: integral points are repaired
by adding a row for every short cycle in their support at once, fractional
points are attacked with exact 4-cycle rows plus rows from the
minimum-mean-cycle search until the objective stops moving (the root node
keeps cutting for as long as anything is violated), and only then does the
node branch on its most fractional cell.  Modes widen the preprocessing:
BC0 searches the raw program, BC1 pins the canonical first row and column,
BC2 pins the full staircase pattern, BC3 adds the cycle-region fixes and
packing rows, and BC4 additionally installs a greedy construction as the
starting incumbent.

Staircase pinning is known to preserve the optimum where a zero-deviation
code exists and the girth target exceeds the pattern's largest closable
cycle (T > tau); any positive optimum is relative to whatever pinning
ran.  Below that threshold the solver downgrades BC2-BC4 to the basic
fixing, except when the staircase is degenerate (r_cr <= J) and adds so
little beyond the first row and column that it is kept for its bound
strength.  The report records which fixing actually ran and whether the
T > tau guard held, since both positive lower bounds and positive optima
only certify facts about the pinned program.

Deviation has fixed parity: every placed edge lowers it by exactly 2 from
the all-slack value, so LP bounds are lifted to the parity grid of the
degree-target sum before pruning.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .budget import Deadline, TimeLimitReached
from .model import Cut, DesignSpec, MddProblem, ModelError
from .peg import modified_peg
from .separation import separate_fractional, separate_integral, separate_quads
from .simplex import solve as lp_solve
from .structure import (
    conflict_packing,
    cycle_regions,
    fixing_plan,
    valid_inequalities,
)
from .tanner import TannerGraph, build_graph, degree_deviation, girth

MODES = ("BC0", "BC1", "BC2", "BC3", "BC4")
NODE_SELECTIONS = ("best-bound", "depth-first")
BRANCHING_RULES = ("most-fractional",)

EPS_INT = 1e-6
EPS_TAIL = 1e-6
TAIL_ROUNDS = 5
TRACE_CAP = 200_000


class SolverError(RuntimeError):
    """Raised when a report fails its own consistency checks."""


@dataclass(frozen=True)
class SolveConfig:
    """Search knobs; defaults match the strongest mode."""

    mode: str = "BC4"
    time_limit: Optional[float] = None
    node_selection: str = "best-bound"
    branching: str = "most-fractional"
    seed: Optional[int] = None
    peg_restarts: int = 512
    log: Optional[Callable] = None


@dataclass
class BnbNode:
    """Branching fixings on top of the global bounds, plus a warm hint."""

    fixings: dict
    bound: float
    depth: int
    serial: int
    basis: object = None


@dataclass
class SolveReport:
    status: str
    mode: str
    z: int
    z_l: int
    z_u_i: int
    gap: float
    lazy_cuts: int
    user_cuts: int
    nodes: int
    wall_time: float
    incumbent: Optional[TannerGraph]
    fixing_mode: str
    tau: Optional[float]
    guard_holds: Optional[bool]
    trace: list = field(default_factory=list)


def _validate(spec: DesignSpec, config: SolveConfig):
    if config.mode not in MODES:
        raise ModelError(f"unknown mode {config.mode!r}")
    if config.node_selection not in NODE_SELECTIONS:
        raise ModelError(f"unknown node selection {config.node_selection!r}")
    if config.branching not in BRANCHING_RULES:
        raise ModelError(f"unknown branching rule {config.branching!r}")
    if config.time_limit is not None and config.time_limit <= 0:
        raise ModelError("time limit must be positive")
    if config.mode != "BC0" and spec.regularity is None:
        raise ModelError("fixing modes need a (J, K)-regular spec")


def select_fixing(spec: DesignSpec, mode: str):
    """Resolve the mode to the fixing that actually runs.

    Returns (fixing_mode, plan, region, tau, guard_holds).  region is only
    populated when the extended pattern is active, and guard_holds reports
    the T > tau check for modes that asked for the staircase.
    """
    if mode == "BC0":
        return "none", None, None, None, None
    if mode == "BC1":
        return "basic", fixing_plan(spec, "basic"), None, None, None
    region = cycle_regions(spec)
    tau = region.tau
    J = spec.regularity[0]
    guard = spec.T > tau
    if not guard and region.plan.r_cr > J:
        return "basic", fixing_plan(spec, "basic"), None, tau, False
    return "extended", region.plan, region, tau, guard


def _parity_lift(value: float, spec: DesignSpec) -> float:
    lifted = math.ceil(value - 1e-7)
    if (spec.target_sum - lifted) % 2 != 0:
        lifted += 1
    return float(max(lifted, 0))


def _most_fractional(x: np.ndarray):
    """Cell with value nearest 1/2, ties to the smallest (i, j)."""
    dist = np.abs(x - 0.5)
    flat = int(np.argmin(dist))
    if dist.flat[flat] > 0.5 - EPS_INT:
        return None, None
    i, j = divmod(flat, x.shape[1])
    return (i + 1, j + 1), float(x[i, j])


def _entries_of(x: np.ndarray) -> frozenset:
    return frozenset(
        (int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(x > 0.5))
    )


class _Search:
    """Mutable state of one solve call."""

    def __init__(self, spec: DesignSpec, config: SolveConfig):
        self.spec = spec
        self.config = config
        self.deadline = Deadline(config.time_limit)
        self.problem = MddProblem(spec)
        self.lazy = 0
        self.user = 0
        self.nodes = 0
        self.serial = 0
        self.z_l_pub = 0.0
        self.incumbent = None
        self.z_best = math.inf
        self.heap = []
        self.stack = []
        self.trace = []

    # -- incumbents ---------------------------------------------------------

    def offer(self, graph: TannerGraph) -> bool:
        """Install graph as incumbent when valid and strictly better."""
        dev = degree_deviation(graph, self.spec)
        if dev >= self.z_best:
            return False
        g = girth(graph)
        if g is not None and g < self.spec.T:
            return False
        self.incumbent = graph
        self.z_best = float(dev)
        return True

    # -- node pool ----------------------------------------------------------

    def push(self, node: BnbNode):
        if self.config.node_selection == "best-bound":
            heapq.heappush(self.heap, (node.bound, node.serial, node))
        else:
            self.stack.append(node)

    def pop(self) -> Optional[BnbNode]:
        if self.config.node_selection == "best-bound":
            if not self.heap:
                return None
            return heapq.heappop(self.heap)[2]
        if not self.stack:
            return None
        return self.stack.pop()

    def open_bounds(self):
        pool = self.heap if self.config.node_selection == "best-bound" else None
        if pool is not None:
            return [entry[0] for entry in pool]
        return [node.bound for node in self.stack]

    def publish(self, extra_bound=None):
        bounds = self.open_bounds()
        if extra_bound is not None:
            bounds.append(extra_bound)
        bounds.append(self.z_best)
        self.z_l_pub = max(self.z_l_pub, min(bounds))

    def record(self, node: BnbNode, action: str, lp=None, bound=None, t0=0.0):
        rec = {
            "node": node.serial,
            "depth": node.depth,
            "action": action,
            "lp": lp,
            "bound": bound if bound is not None else node.bound,
            "z_l": self.z_l_pub,
            "z_u": self.z_best,
            "lazy": self.lazy,
            "user": self.user,
            "time": time.monotonic() - t0,
        }
        if len(self.trace) < TRACE_CAP:
            self.trace.append(rec)
        if self.config.log is not None:
            self.config.log(rec)

    # -- per-node bound overrides -------------------------------------------

    def apply(self, fixings: dict):
        lp = self.problem.lp
        saved = []
        for (i, j), v in fixings.items():
            col = self.problem.xcol(i, j)
            lo, up = lp.lower[col], lp.upper[col]
            if lo > v or up < v:
                raise ModelError(
                    f"branch fixing ({i}, {j})={v} contradicts global bounds"
                )
            saved.append((col, lo, up))
            lp.set_bounds(col, v, v)
        return saved

    def restore(self, saved):
        lp = self.problem.lp
        for col, lo, up in reversed(saved):
            lp.set_bounds(col, lo, up)

    def add_cuts(self, cuts) -> int:
        added = 0
        for cut in cuts:
            if self.problem.add_cut(cut) is not None:
                added += 1
        return added


def solve(spec: DesignSpec, config: SolveConfig = None) -> SolveReport:
    """Run branch and cut and return the report with its trace."""
    if config is None:
        config = SolveConfig()
    _validate(spec, config)
    t0 = time.monotonic()
    search = _Search(spec, config)
    fixing_mode, plan, region, tau, guard = select_fixing(spec, config.mode)
    if plan is not None:
        search.problem.apply_fixing(plan)
    if region is not None and config.mode in ("BC3", "BC4"):
        zero_cells, packs = valid_inequalities(spec, region)
        for (i, j) in sorted(zero_cells):
            search.problem.fix_cell(i, j, 0)
        for cut in packs:
            search.problem.add_cut(cut)
        for cut in conflict_packing(spec, region):
            search.problem.add_cut(cut)
    base_entries = frozenset(plan.ones) if plan is not None else frozenset()
    search.offer(build_graph(spec.m, spec.n, base_entries))
    z_u_i = int(search.z_best)
    status = "optimal"
    try:
        if config.mode == "BC4":
            search.offer(
                modified_peg(spec, plan=plan, seed=config.seed,
                             deadline=search.deadline)
            )
            base = 0 if config.seed is None else config.seed
            for k in range(config.peg_restarts):
                if search.z_best == 0:
                    break
                search.deadline.check()
                search.offer(
                    modified_peg(spec, plan=plan, seed=base + k,
                                 deadline=search.deadline)
                )
            z_u_i = int(search.z_best)
        root = BnbNode(fixings={}, bound=0.0, depth=0, serial=0)
        search.serial = 1
        search.push(root)
        while True:
            node = search.pop()
            if node is None:
                break
            search.deadline.check()
            if node.bound >= search.z_best:
                search.publish()
                continue
            search.nodes += 1
            saved = search.apply(node.fixings)
            try:
                _process(search, node, t0)
            finally:
                search.restore(saved)
    except TimeLimitReached:
        status = "feasible-time-limit" if search.incumbent is not None \
            else "no-incumbent"
    if status == "optimal":
        search.z_l_pub = search.z_best
    else:
        search.publish()
    z = int(search.z_best)
    z_l = int(search.z_l_pub)
    gap = 0.0 if z == 0 else 100.0 * (z - z_l) / z
    return SolveReport(
        status=status,
        mode=config.mode,
        z=z,
        z_l=z_l,
        z_u_i=z_u_i,
        gap=gap,
        lazy_cuts=search.lazy,
        user_cuts=search.user,
        nodes=search.nodes,
        wall_time=time.monotonic() - t0,
        incumbent=search.incumbent,
        fixing_mode=fixing_mode,
        tau=tau,
        guard_holds=guard,
        trace=search.trace,
    )


def _process(search: _Search, node: BnbNode, t0: float):
    spec = search.spec
    problem = search.problem
    basis = node.basis
    tail = 0
    last_obj = None
    cutting = True
    while True:
        sol = lp_solve(problem.lp, warm=basis, deadline=search.deadline)
        if sol.status == "infeasible":
            search.publish()
            search.record(node, "infeasible", t0=t0)
            return
        basis = sol.basis
        lifted = max(node.bound, _parity_lift(sol.objective, spec))
        node.bound = lifted
        search.publish(extra_bound=lifted)
        if lifted >= search.z_best:
            search.record(node, "bound-pruned", lp=sol.objective, t0=t0)
            return
        x = problem.x_matrix(sol.x)
        cell, _val = _most_fractional(x)
        if cell is None:
            lazy = separate_integral(x, spec.T, deadline=search.deadline)
            added = search.add_cuts(lazy)
            if added:
                search.lazy += added
                continue
            graph = build_graph(spec.m, spec.n, _entries_of(x))
            if search.offer(graph):
                search.publish(extra_bound=lifted)
                search.record(node, "incumbent", lp=sol.objective, t0=t0)
            else:
                search.record(node, "dominated", lp=sol.objective, t0=t0)
            return
        if cutting:
            user = separate_quads(x, deadline=search.deadline)
            if spec.T > 6:
                user = user + separate_fractional(
                    x, spec.T, deadline=search.deadline
                )
            added = search.add_cuts(user)
            if added:
                search.user += added
                if last_obj is not None and sol.objective - last_obj < EPS_TAIL:
                    tail += 1
                    # the root keeps cutting as long as anything is violated
                    if tail >= TAIL_ROUNDS and node.depth > 0:
                        cutting = False
                else:
                    tail = 0
                last_obj = sol.objective
                continue
            cutting = False
        for value in (0, 1):
            child_fix = dict(node.fixings)
            child_fix[cell] = value
            child = BnbNode(
                fixings=child_fix,
                bound=lifted,
                depth=node.depth + 1,
                serial=search.serial + (1 - value),
                basis=basis,
            )
            search.push(child)
        search.serial += 2
        search.publish()
        search.record(node, f"branched@{cell}", lp=sol.objective, t0=t0)
        return


def certify(spec: DesignSpec, report: SolveReport) -> bool:
    """Re-derive the incumbent's merits from scratch; raise on any drift."""
    if report.incumbent is None:
        raise SolverError("report carries no incumbent to certify")
    g = report.incumbent
    rebuilt = build_graph(g.m, g.n, g.entries)
    got = girth(rebuilt)
    if got is not None and got < spec.T:
        raise SolverError(f"incumbent girth {got} is below target {spec.T}")
    dev = degree_deviation(rebuilt, spec)
    if dev != report.z:
        raise SolverError(f"incumbent deviation {dev} does not match z={report.z}")
    if report.z_l > report.z:
        raise SolverError("lower bound exceeds the incumbent value")
    return True
