"""Cycle cut separation for the branch-and-cut search.

Integral points are screened exhaustively: every cycle shorter than the
target in the 0/1 support graph becomes one constraint sum_C X <= |C| - 1.
Fractional points use a minimum mean cycle search instead: edge costs are
-X shifted by the current mean estimate, negative cycles are hunted
Bellman-Ford style with a predecessor ban (the undirected relaxation may
not step straight back along the edge it arrived by), and every strictly
improving cycle is tested for violation while the estimate tightens.  The
ban makes the search a terminating heuristic: any cycle it reports is
real, so emitted cuts are always valid, but on some supports it can stop
above the true minimum mean.  Small supports skip the heuristic entirely:
all simple cycles are enumerated and the minimum mean is exact.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .budget import Deadline
from .model import Cut
from .tanner import build_graph, canonical_cycle, enumerate_short_cycles

EPS_SUPPORT = 1e-9
EPS_VIOLATION = 1e-6
EPS_COST = 1e-12
MEAN_ITER_CAP = 500
EXACT_MAX_NODES = 14
EXACT_MAX_EDGES = 32


def separate_integral(x: np.ndarray, T: int, deadline: Deadline = None):
    """Cuts for every short cycle in the support of an integral point."""
    m, n = x.shape
    cells = {
        (int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(x > 0.5))
    }
    g = build_graph(m, n, cells)
    cycles = enumerate_short_cycles(g, T, deadline=deadline)
    ordered = sorted(cycles, key=lambda c: sorted(c.entry_set))
    return [Cut.from_cycle(c.entry_set) for c in ordered]


@dataclass
class _Support:
    nodes: list
    edges: list  # (check node, variable node, cell)
    weight: dict


def _build_support(x: np.ndarray, eps: float = EPS_SUPPORT) -> _Support:
    nodes = []
    seen = set()
    edges = []
    weight = {}
    for i, j in zip(*np.nonzero(x > eps)):
        cell = (int(i) + 1, int(j) + 1)
        u = ("c", cell[0])
        v = ("v", cell[1])
        for node in (u, v):
            if node not in seen:
                seen.add(node)
                nodes.append(node)
        edges.append((u, v, cell))
        weight[cell] = float(x[i, j])
    return _Support(nodes=nodes, edges=edges, weight=weight)


def find_negative_cycle(support: _Support, costs: dict,
                        deadline: Deadline = None):
    """One negative-cost cycle as (nodes, cells), or None.

    All distances start at zero (every node is a source).  An edge may
    relax into a node only when the node at its other end is not already
    the predecessor, which rules out the trivial two-cycle of an
    undirected negative edge.  After as many rounds as there are nodes,
    any still-improving label is chased through the predecessor pointers;
    the walk either closes a genuine cycle or the call reports None.
    """
    nv = len(support.nodes)
    if nv == 0:
        return None
    dist = {node: 0.0 for node in support.nodes}
    pred = {node: None for node in support.nodes}
    pred_cell = {}
    last_changed = None
    for _ in range(nv + 1):
        if deadline is not None:
            deadline.check()
        last_changed = None
        for (u, v, cell) in support.edges:
            c = costs[cell]
            for a, b in ((u, v), (v, u)):
                if pred[a] == b:
                    continue
                nd = dist[a] + c
                if nd < dist[b] - EPS_COST:
                    dist[b] = nd
                    pred[b] = a
                    pred_cell[b] = cell
                    last_changed = b
        if last_changed is None:
            return None
    node = last_changed
    for _ in range(nv):
        if pred[node] is None:
            return None
        node = pred[node]
    order = {}
    walk = []
    cur = node
    while cur is not None and cur not in order:
        order[cur] = len(walk)
        walk.append(cur)
        cur = pred[cur]
    if cur is None:
        return None
    cyc_nodes = walk[order[cur]:]
    cells = [pred_cell[a] for a in cyc_nodes]
    if sum(costs[c] for c in cells) >= -EPS_COST:
        return None
    return cyc_nodes, cells


def _improving_cycles(support: _Support, deadline: Deadline = None):
    """Cycles of strictly decreasing mean weight-cost, ending at the min.

    Yields (mean, nodes, cells) with mean = -sum(weight)/len, decreasing.
    """
    weight = support.weight
    mu = 0.0
    for _ in range(MEAN_ITER_CAP):
        costs = {cell: -w - mu for cell, w in weight.items()}
        hit = find_negative_cycle(support, costs, deadline=deadline)
        if hit is None:
            return
        nodes, cells = hit
        mean = -sum(weight[c] for c in cells) / len(cells)
        if mean >= mu - EPS_COST:
            return
        mu = mean
        yield mu, nodes, cells


def _exact_min_mean(support: _Support, deadline: Deadline = None):
    """Minimum mean over all simple cycles, by full enumeration."""
    cells = {cell for _, _, cell in support.edges}
    if not cells:
        return None
    m = max(c[0] for c in cells)
    n = max(c[1] for c in cells)
    g = build_graph(m, n, cells)
    span = len(support.nodes) + 2
    if span % 2:
        span += 1
    best = None
    for cyc in enumerate_short_cycles(g, max(span, 4), deadline=deadline):
        mean = -sum(support.weight[c] for c in cyc.entry_set) / len(cyc.entry_set)
        key = (mean, sorted(cyc.entry_set))
        if best is None or key < best[0]:
            best = (key, cyc.entry_set)
    if best is None:
        return None
    return best[0][0], frozenset(best[1])


def min_mean_cycle(x: np.ndarray, deadline: Deadline = None):
    """Smallest mean of -X over cycles of the support.

    Returns (mean, frozenset of cells) or None when the support is acyclic.
    Supports of at most EXACT_MAX_NODES nodes and EXACT_MAX_EDGES cells are
    solved exactly by enumerating every simple cycle; larger ones fall back
    to the improving-cycle heuristic, whose reported mean is still achieved
    by a real cycle and hence never below the true minimum.
    """
    support = _build_support(x)
    if (len(support.nodes) <= EXACT_MAX_NODES
            and len(support.edges) <= EXACT_MAX_EDGES):
        return _exact_min_mean(support, deadline=deadline)
    best = None
    for mean, _nodes, cells in _improving_cycles(support, deadline=deadline):
        best = (mean, frozenset(cells))
    return best


def separate_quads(x: np.ndarray, max_cuts: int = 200,
                   eps: float = EPS_VIOLATION,
                   deadline: Deadline = None):
    """Every violated 4-cycle cut of a point, exactly, most violated first.

    A 4-cycle on rows i1 < i2 needs both its columns to carry more than 1
    of combined mass, so only those columns are paired.  Complete for
    girth target 6, where no longer cycle is ever separated.
    """
    m, _n = x.shape
    found = []
    for i1 in range(m - 1):
        if deadline is not None:
            deadline.check()
        for i2 in range(i1 + 1, m):
            s = x[i1] + x[i2]
            heavy = np.nonzero(s > 1.0)[0]
            for a in range(len(heavy) - 1):
                for b in range(a + 1, len(heavy)):
                    j1, j2 = int(heavy[a]), int(heavy[b])
                    viol = s[j1] + s[j2] - 3.0
                    if viol > eps:
                        cells = frozenset({
                            (i1 + 1, j1 + 1), (i1 + 1, j2 + 1),
                            (i2 + 1, j1 + 1), (i2 + 1, j2 + 1),
                        })
                        found.append((-viol, sorted(cells), cells))
    found.sort(key=lambda t: (t[0], t[1]))
    return [Cut.from_cycle(cells) for _, _, cells in found[:max_cuts]]


def separate_fractional(x: np.ndarray, T: int, max_cuts: int = 50,
                        eps: float = EPS_VIOLATION,
                        deadline: Deadline = None):
    """Violated cycle cuts from the minimum mean cycle search."""
    support = _build_support(x)
    weight = support.weight
    out = {}
    for _mean, nodes, cells in _improving_cycles(support, deadline=deadline):
        if len(cells) < T:
            total = sum(weight[c] for c in cells)
            if total > len(cells) - 1 + eps:
                cyc = canonical_cycle(nodes)
                if cyc.entry_set not in out:
                    out[cyc.entry_set] = Cut.from_cycle(cyc.entry_set)
                if len(out) >= max_cuts:
                    break
    return list(out.values())
