"""Symmetry-breaking structure for (J,K)-regular designs.

Any girth-g matrix can be row/column permuted so its first row and column
are filled left-to-right / top-to-bottom, and when g is large enough the
permutation extends to two interleaved staircases of 1-blocks: row i of the
first r_cr + 1 rows carries K-1 ones in fresh columns, column j of the
first c_cr + 1 columns carries J-1 ones in fresh rows.  Pinning that
pattern (mode "extended") removes permutation symmetry from the search.

Every remaining cell (i, j) would, if set to 1, close a unique cycle
through the pinned forest; its length rho(i, j) is the cell's cycle region.
Cells with rho below the girth target are forced to zero, and cells that
pairwise close short cycles yield packing rows (at most one 1 among them).
The same geometry gives a lower bound on n for a girth target: the
staircase is forced row by row for as long as every alternative cell of
the next row has rho below target, and each forced row consumes K-1 fresh
columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from .budget import Deadline
from .model import Cut, DesignSpec
from .tanner import TannerGraph, build_graph, girth

INF_RHO = 2**30


class StructureError(ValueError):
    """Raised when a structural precondition does not hold."""


@dataclass(frozen=True)
class FixingPlan:
    """Cells pinned ahead of the search: ones, zeros, staircase depths."""

    mode: str
    ones: frozenset
    zeros: frozenset
    r_cr: int
    c_cr: int


def _require_regular(spec: DesignSpec):
    reg = spec.regularity
    if reg is None:
        raise StructureError("fixing plans require a (J,K)-regular spec")
    J, K = reg
    if J < 2 or K < 2:
        raise StructureError(f"degrees must be >= 2, got J={J} K={K}")
    return J, K


def staircase_depths(spec: DesignSpec):
    """(r_cr, c_cr): how many rows/columns the two staircases span."""
    J, K = _require_regular(spec)
    return (spec.n - 1) // (K - 1), (spec.m - 1) // (J - 1)


def row_block_cols(i: int, K: int, n: int) -> range:
    """Fresh columns of staircase row i >= 2 (may be clipped empty)."""
    start = (i - 1) * (K - 1) + 2
    return range(start, min(i * (K - 1) + 1, n) + 1)


def col_block_rows(j: int, J: int, m: int) -> range:
    """Fresh rows of staircase column j >= 2 (may be clipped empty)."""
    start = (j - 1) * (J - 1) + 2
    return range(start, min(j * (J - 1) + 1, m) + 1)


def fixing_plan(spec: DesignSpec, mode: str = "extended") -> FixingPlan:
    """Pin cells that are free of loss of generality for regular designs.

    mode "basic" fills row 1 and column 1; "extended" adds the two
    staircases of 1-blocks and zeroes the region they sweep.  The pinned
    ones always form a forest, so the plan never conflicts with any girth
    target.
    """
    if mode not in ("basic", "extended"):
        raise StructureError(f"unknown fixing mode {mode!r}")
    J, K = _require_regular(spec)
    m, n = spec.m, spec.n
    ones = {(1, j) for j in range(1, K + 1)} | {(i, 1) for i in range(1, J + 1)}
    zeros = {(1, j) for j in range(K + 1, n + 1)}
    zeros |= {(i, 1) for i in range(J + 1, m + 1)}
    if mode == "basic":
        return FixingPlan(
            mode=mode,
            ones=frozenset(ones),
            zeros=frozenset(zeros),
            r_cr=0,
            c_cr=0,
        )

    r_cr, c_cr = staircase_depths(spec)
    for i in range(2, min(r_cr, m) + 1):
        zeros.update((i, j) for j in range(2, n + 1))
    for i in range(r_cr + 1, m + 1):
        zeros.update((i, j) for j in range(2, min(c_cr, n) + 1))
    for i in range(2, min(r_cr + 1, m) + 1):
        ones.update((i, j) for j in row_block_cols(i, K, n))
    for j in range(2, min(c_cr + 1, n) + 1):
        ones.update((i, j) for i in col_block_rows(j, J, m))
    zeros -= ones
    return FixingPlan(
        mode=mode,
        ones=frozenset(ones),
        zeros=frozenset(zeros),
        r_cr=r_cr,
        c_cr=c_cr,
    )


def fixing_graph(spec: DesignSpec, plan: FixingPlan) -> TannerGraph:
    """The pinned ones as a TannerGraph (always a forest)."""
    return build_graph(spec.m, spec.n, plan.ones)


# -- cycle regions -----------------------------------------------------------


@dataclass
class CycleRegionMap:
    """Per-cell shortest closable cycle lengths over the extended fixing.

    rho[i-1, j-1] is the length of the unique cycle created by setting the
    free or zero-pinned cell (i, j) to 1 on top of the pinned forest
    (INF_RHO when check i and variable j lie in different trees), and 0 as
    a sentinel on pinned-one cells.  tau is the largest rho over the
    zero-pinned region: above tau, the extended pattern costs no girth-T
    solutions.
    """

    plan: FixingPlan
    rho: np.ndarray
    tau: float
    J: int
    K: int

    def rho_at(self, i: int, j: int) -> float:
        v = int(self.rho[i - 1, j - 1])
        if v == 0:
            raise StructureError(f"cell ({i}, {j}) is a pinned one")
        return math.inf if v >= INF_RHO else v

    def col_tile(self, j: int) -> int:
        return 0 if j == 1 else (j - 2) // (self.K - 1) + 1

    def anchor_col(self, i: int) -> int:
        """Staircase column carrying the pinned one of row i (i >= 2)."""
        return 1 if i == 1 else (i - 2) // (self.J - 1) + 1

    def subblock(self, i: int, j: int) -> tuple:
        """Tile coordinates (row group, column group) of cell (i, j).

        Rows sharing the anchor column of one row tile and columns sharing
        an anchor row form one subblock; interior subblocks have constant
        rho.
        """
        return (self.col_tile(self.anchor_col(i)), self.col_tile(j))


def cycle_regions(spec: DesignSpec, deadline: Deadline = None) -> CycleRegionMap:
    """Compute rho for every non-pinned-one cell of the extended fixing."""
    J, K = _require_regular(spec)
    if deadline is not None:
        deadline.check()
    plan = fixing_plan(spec, "extended")
    m, n = spec.m, spec.n
    nodes = n + m  # variables 0..n-1, checks n..n+m-1
    if plan.ones:
        arr = np.array(sorted(plan.ones), dtype=np.int64)
        vi = arr[:, 1] - 1
        ci = arr[:, 0] - 1 + n
        adj = sp.csr_matrix(
            (np.ones(len(arr)), (vi, ci)), shape=(nodes, nodes)
        )
        adj = adj + adj.T
    else:
        adj = sp.csr_matrix((nodes, nodes))
    dist = shortest_path(
        adj, method="D", unweighted=True, indices=np.arange(n)
    )[:, n:]
    if deadline is not None:
        deadline.check()
    rho = dist.T + 1.0  # (m, n): cycle closed by cell (i, j)
    rho[~np.isfinite(rho)] = INF_RHO
    rho = rho.astype(np.int64)
    if plan.ones:
        rho[arr[:, 0] - 1, arr[:, 1] - 1] = 0
    zmask = np.zeros((m, n), dtype=bool)
    if plan.zeros:
        zarr = np.array(sorted(plan.zeros), dtype=np.int64)
        zmask[zarr[:, 0] - 1, zarr[:, 1] - 1] = True
    if zmask.any():
        worst = int(rho[zmask].max())
        tau = math.inf if worst >= INF_RHO else float(worst)
    else:
        tau = 0.0
    return CycleRegionMap(plan=plan, rho=rho, tau=tau, J=J, K=K)


def valid_inequalities(spec: DesignSpec, region: CycleRegionMap):
    """Zero-fixings and packing cuts implied by the cycle regions.

    Returns (zero_cells, cuts).  Free cells whose rho is below the girth
    target are forced to zero.  For T = 8, two surviving cells in the same
    subblock that share an anchor column close a 6-cycle through the
    staircase, so each such group packs to at most one 1; for T = 10 the
    same argument over whole subblocks forbids pairs closing 8-cycles.
    """
    T = spec.T
    plan = region.plan
    m, n = spec.m, spec.n
    free = np.ones((m, n), dtype=bool)
    for (i, j) in plan.ones:
        free[i - 1, j - 1] = False
    for (i, j) in plan.zeros:
        free[i - 1, j - 1] = False
    rho = region.rho
    zero_cells = {
        (int(r) + 1, int(c) + 1)
        for r, c in zip(*np.nonzero(free & (rho < T)))
    }
    cuts = []
    if T == 8:
        eligible = free & ((rho == 8) | (rho == 10))
        key = lambda i, j: (region.subblock(i, j), region.anchor_col(i))
    elif T == 10:
        eligible = free & (rho == 10)
        key = lambda i, j: region.subblock(i, j)
    else:
        return zero_cells, cuts
    groups = {}
    for r, c in zip(*np.nonzero(eligible)):
        i, j = int(r) + 1, int(c) + 1
        groups.setdefault(key(i, j), []).append((i, j))
    for cells in groups.values():
        if len(cells) >= 2:
            cuts.append(
                Cut(entry_set=frozenset(cells), rhs=1, origin="cycle-region")
            )
    return zero_cells, cuts


class _MisBudget(Exception):
    pass


def _bounded_mis(masks, count: int, budget: int):
    """Exact independence number of the conflict graph, or None on budget.

    Bitmask branch and bound: vertices isolated in the remaining set are
    taken greedily, otherwise the densest vertex is branched on.  The step
    budget keeps the worst case bounded; callers fall back to clique rows
    alone when it trips.
    """
    if count == 0:
        return 0
    best = 0
    steps = 0

    def grow(avail, size):
        nonlocal best, steps
        while avail:
            steps += 1
            if steps > budget:
                raise _MisBudget
            took = False
            t = avail
            while t:
                w = t & -t
                idx = w.bit_length() - 1
                if masks[idx] & avail == 0:
                    size += 1
                    avail &= ~w
                    took = True
                t &= t - 1
            if took:
                continue
            if size + bin(avail).count("1") <= best:
                return
            bestdeg, pick = -1, -1
            t = avail
            while t:
                w = t & -t
                idx = w.bit_length() - 1
                deg = bin(masks[idx] & avail).count("1")
                if deg > bestdeg:
                    bestdeg, pick = deg, idx
                t &= t - 1
            grow(avail & ~(1 << pick) & ~masks[pick], size + 1)
            avail &= ~(1 << pick)
        if size > best:
            best = size

    try:
        grow((1 << count) - 1, 0)
    except _MisBudget:
        return None
    return best


def conflict_packing(spec: DesignSpec, region: CycleRegionMap,
                     mis_budget: int = 300_000, mis_max_cells: int = 300):
    """Packing cuts from pairwise conflicts between surviving cells.

    Placing two cells a and b on top of the pinned forest closes a cycle
    of length 2 plus the shorter endpoint pairing through the forest; when
    that is below the girth target the pair is in conflict, and since each
    cell alone survives (rho >= T) the closed walk is a single simple
    cycle, so the conflict is exact.  Greedy cliques of the conflict graph
    give one row each, and when the bounded search proves the exact packing
    number, a single aggregate row over all surviving cells carries it.
    """
    T = spec.T
    plan = region.plan
    m, n = spec.m, spec.n
    free = np.ones((m, n), dtype=bool)
    for (i, j) in plan.ones:
        free[i - 1, j - 1] = False
    for (i, j) in plan.zeros:
        free[i - 1, j - 1] = False
    cand = [
        (int(r) + 1, int(c) + 1)
        for r, c in zip(*np.nonzero(free & (region.rho >= T)))
    ]
    count = len(cand)
    if count == 0:
        return []
    nodes = n + m
    arr = np.array(sorted(plan.ones), dtype=np.int64)
    vi = arr[:, 1] - 1
    ci = arr[:, 0] - 1 + n
    adj = sp.csr_matrix((np.ones(len(arr)), (vi, ci)), shape=(nodes, nodes))
    adj = adj + adj.T
    dist = shortest_path(adj, method="D", unweighted=True)
    rows = np.array([i - 1 for (i, _) in cand], dtype=np.int64) + n
    cols = np.array([j - 1 for (_, j) in cand], dtype=np.int64)
    vc = dist[np.ix_(cols, rows)]  # vc[a, b] = d(v of a, c of b)
    vv = dist[np.ix_(cols, cols)]
    cc = dist[np.ix_(rows, rows)]
    pair = np.minimum(vc + vc.T, vv + cc) + 2
    conflict = pair < T
    np.fill_diagonal(conflict, False)
    masks = [0] * count
    for a in range(count):
        bits = 0
        for b in np.nonzero(conflict[a])[0]:
            bits |= 1 << int(b)
        masks[a] = bits
    cuts = []
    covered = 0
    for a in range(count):
        if covered >> a & 1:
            continue
        covered |= 1 << a
        clique = [a]
        joint = masks[a]
        for b in range(a + 1, count):
            if covered >> b & 1 or not joint >> b & 1:
                continue
            clique.append(b)
            covered |= 1 << b
            joint &= masks[b]
        if len(clique) >= 2:
            cuts.append(Cut(
                entry_set=frozenset(cand[t] for t in clique),
                rhs=1,
                origin="conflict-clique",
            ))
    if count <= mis_max_cells:
        alpha = _bounded_mis(masks, count, mis_budget)
        if alpha is not None:
            cuts.append(Cut(
                entry_set=frozenset(cand),
                rhs=alpha,
                origin="conflict-pack",
            ))
    return cuts


# -- reordering ----------------------------------------------------------------


def _stable_front(seq, frontier, members):
    """Move members of seq[frontier:] to the front of that slice, stably."""
    tail = seq[frontier:]
    picked = [x for x in tail if x in members]
    rest = [x for x in tail if x not in members]
    seq[frontier:] = picked + rest
    return frontier + len(picked)


def reorder(h: TannerGraph, spec: DesignSpec) -> TannerGraph:
    """Permute rows/columns of h onto the extended fixing pattern.

    Replays the staircase greedily: each next row (column) slot must be
    fillable by some row (column) of the current interchangeable block
    whose remaining ones all sit in fresh slots.  Requires girth(h) > tau
    of the cycle regions; below that the pattern can exclude h and the
    permutation may not exist.
    """
    J, K = _require_regular(spec)
    m, n = spec.m, spec.n
    if h.m != m or h.n != n:
        raise StructureError(
            f"matrix is {h.m}x{h.n}, spec wants {m}x{n}"
        )
    for j in range(1, n + 1):
        if h.var_degree(j) != J:
            raise StructureError(f"column {j} has degree {h.var_degree(j)} != {J}")
    for i in range(1, m + 1):
        if h.check_degree(i) != K:
            raise StructureError(f"row {i} has degree {h.check_degree(i)} != {K}")
    region = cycle_regions(spec)
    g = girth(h)
    if g is not None and g <= region.tau:
        raise StructureError(
            f"girth {g} is not above the pattern threshold tau={region.tau}; "
            "the extended pattern is only free of loss of generality above it"
        )
    plan = region.plan
    r_cr, c_cr = plan.r_cr, plan.c_cr
    ones_by_row = {i: set(h.check_neighbors(i)) for i in range(1, m + 1)}
    ones_by_col = {j: set(h.var_neighbors(j)) for j in range(1, n + 1)}
    rows = list(range(1, m + 1))
    cols = list(range(1, n + 1))

    # slot -> last slot of its interchangeable block
    row_block_end = {1: 1}
    col_block_end = {1: 1}

    def register(block_end_map, start, end):
        for s in range(start, end + 1):
            block_end_map[s] = end

    r1 = rows[0]
    col_frontier = _stable_front(cols, 0, ones_by_row[r1])
    register(col_block_end, 2, K)
    c1 = cols[0]
    row_frontier = _stable_front(rows, 0, ones_by_col[c1])
    register(row_block_end, 2, J)

    def advance(slot, axis_items, block_end_map, by_item, cross_items,
                cross_frontier, need, what):
        """Fill one staircase slot; returns the new cross frontier."""
        end = block_end_map.get(slot)
        if end is None:
            raise StructureError(
                f"{what} slot {slot} was never locked into a block"
            )
        unlocked = set(cross_items[cross_frontier:])
        pick = None
        for cand in range(slot, end + 1):
            item = axis_items[cand - 1]
            if len(by_item[item] & unlocked) == need:
                pick = cand
                break
        if pick is None:
            raise StructureError(
                f"no {what} in block {slot}..{end} has exactly {need} "
                "ones outside the locked slots; the matrix does not fit "
                "the extended pattern"
            )
        axis_items[slot - 1], axis_items[pick - 1] = (
            axis_items[pick - 1],
            axis_items[slot - 1],
        )
        return _stable_front(
            cross_items, cross_frontier, by_item[axis_items[slot - 1]]
        )

    for s in range(2, max(r_cr, c_cr) + 1):
        if s <= r_cr and s <= m:
            start = col_frontier + 1
            col_frontier = advance(
                s, rows, row_block_end, ones_by_row, cols, col_frontier,
                K - 1, "row",
            )
            register(col_block_end, start, col_frontier)
        if s <= c_cr and s <= n:
            start = row_frontier + 1
            row_frontier = advance(
                s, cols, col_block_end, ones_by_col, rows, row_frontier,
                J - 1, "column",
            )
            register(row_block_end, start, row_frontier)

    if r_cr + 1 <= m and n - col_frontier > 0:
        col_frontier = advance(
            r_cr + 1, rows, row_block_end, ones_by_row, cols, col_frontier,
            n - col_frontier, "row",
        )
    if c_cr + 1 <= n and m - row_frontier > 0:
        row_frontier = advance(
            c_cr + 1, cols, col_block_end, ones_by_col, rows, row_frontier,
            m - row_frontier, "column",
        )

    row_slot = {orig: s for s, orig in enumerate(rows, start=1)}
    col_slot = {orig: s for s, orig in enumerate(cols, start=1)}
    entries = {(row_slot[i], col_slot[j]) for (i, j) in h.entries}
    for cell in plan.ones:
        if cell not in entries:
            raise StructureError(
                f"reordered matrix misses the pinned one at {cell}"
            )
    for cell in plan.zeros:
        if cell in entries:
            raise StructureError(
                f"reordered matrix has a one in the pinned zero at {cell}"
            )
    return build_graph(m, n, entries)


# -- dimension bound ----------------------------------------------------------


def consistent_dims(m: int, n: int, J: int, K: int) -> bool:
    """Whether the edge counts agree (n J = m K; K = 2J forces n = 2m)."""
    return n * J == m * K


def min_n_bound(J: int, K: int, T: int) -> int:
    """Smallest n compatible with girth T for a (J,K)-regular design.

    Replays the forced staircase: row s must put its K-1 remaining ones in
    fresh columns as long as every already-built column j gives the cell
    (s, j) a closable cycle shorter than T.  Once some cell survives, the
    forcing stops at depth r_cr and any girth-T design needs at least
    (K-1)(r_cr + 1) columns.
    """
    if J < 2 or K < 2:
        raise StructureError(f"degrees must be >= 2, got J={J} K={K}")
    if T < 4 or T % 2 != 0:
        raise StructureError(f"girth target {T} is not an even number >= 4")
    ones = set()
    var_adj = {}
    chk_adj = {}

    def add(i, j):
        ones.add((i, j))
        var_adj.setdefault(j, []).append(i)
        chk_adj.setdefault(i, []).append(j)

    for j in range(1, K + 1):
        add(1, j)
    for i in range(2, J + 1):
        add(i, 1)
    ncols = K

    def bfs_checks(source_check):
        """Distance from c_source to every variable node in the forest."""
        dist_v, dist_c = {}, {source_check: 0}
        frontier = [source_check]
        side = "c"
        d = 0
        while frontier:
            nxt = []
            d += 1
            if side == "c":
                for i in frontier:
                    for j in chk_adj.get(i, ()):
                        if j not in dist_v:
                            dist_v[j] = d
                            nxt.append(j)
            else:
                for j in frontier:
                    for i in var_adj.get(j, ()):
                        if i not in dist_c:
                            dist_c[i] = d
                            nxt.append(i)
            side = "v" if side == "c" else "c"
            frontier = nxt
        return dist_v

    cap = max(1000, 10 * T * (J + K))
    for s in range(2, cap):
        dist_v = bfs_checks(s)
        forced = True
        for j in range(1, ncols + 1):
            if (s, j) in ones:
                continue
            d = dist_v.get(j)
            if d is None or d + 1 >= T:
                forced = False
                break
        if not forced:
            return (K - 1) * s  # r_cr = s - 1
        for j in range(ncols + 1, ncols + K):
            add(s, j)
        ncols += K - 1
        for i in col_block_rows(s, J, cap * J):
            add(i, s)
    raise StructureError(f"staircase forcing did not stop within {cap} rows")
