"""Independent reference implementations used only by the test suite.

These lean on networkx and scipy so that every expected value in the tests
is produced by a code path that shares nothing with the package under test.
"""

from fractions import Fraction

import networkx as nx
import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from girthforge.tanner import TannerGraph, build_graph, canonical_cycle


def to_nx(g: TannerGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(("v", j) for j in range(1, g.n + 1))
    G.add_nodes_from(("c", i) for i in range(1, g.m + 1))
    G.add_edges_from((("c", i), ("v", j)) for (i, j) in g.entries)
    return G


def oracle_girth(g: TannerGraph):
    """Shortest cycle length via networkx, None when acyclic."""
    G = to_nx(g)
    if nx.is_forest(G):
        return None
    return nx.girth(G)


def oracle_cycles(g: TannerGraph, T: int) -> set:
    """Canonical entry sets of every simple cycle shorter than T."""
    out = set()
    for nodes in nx.simple_cycles(to_nx(g), length_bound=T - 1):
        if len(nodes) < T:
            out.add(canonical_cycle(nodes).entry_set)
    return out


def oracle_mdd(spec) -> int:
    """Optimal degree deviation by scipy's milp plus lazy cycle rows.

    Maximizes the number of placed entries under the row/column degree
    caps, then keeps appending sum_C X <= |C| - 1 for every short cycle
    of the integral optimum until none remains.  Small instances only.
    """
    m, n = spec.m, spec.n
    nv = m * n
    rows, rhs = [], []
    for i in range(m):
        r = np.zeros(nv)
        r[i * n:(i + 1) * n] = 1.0
        rows.append(r)
        rhs.append(float(spec.dc[i]))
    for j in range(n):
        r = np.zeros(nv)
        r[j::n] = 1.0
        rows.append(r)
        rhs.append(float(spec.dv[j]))
    while True:
        res = milp(
            c=-np.ones(nv),
            constraints=LinearConstraint(np.array(rows), -np.inf, np.array(rhs)),
            integrality=np.ones(nv),
            bounds=Bounds(0.0, 1.0),
        )
        assert res.success, res.message
        x = np.round(res.x).astype(int).reshape(m, n)
        cells = {(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(x))}
        short = oracle_cycles(build_graph(m, n, cells), spec.T)
        if not short:
            return spec.target_sum - 2 * int(x.sum())
        for cyc in short:
            r = np.zeros(nv)
            for (i, j) in cyc:
                r[(i - 1) * n + (j - 1)] = 1.0
            rows.append(r)
            rhs.append(float(len(cyc) - 1))


def oracle_min_mean_cycle(g: TannerGraph, weights: dict):
    """Exact minimum mean over all simple cycles of cost -weights[cell].

    weights maps (i, j) cells to X values.  Returns (mean, entry_set) with
    the mean as a Fraction, or None when the graph is acyclic.
    """
    best = None
    best_cells = None
    for nodes in nx.simple_cycles(to_nx(g)):
        cells = canonical_cycle(nodes).entry_set
        mean = Fraction(-sum(Fraction(weights[c]) for c in cells), len(cells))
        if best is None or mean < best:
            best = mean
            best_cells = cells
    if best is None:
        return None
    return best, best_cells
