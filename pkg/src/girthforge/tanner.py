"""Bipartite Tanner graphs: construction, girth, and short-cycle enumeration.

A parity-check matrix H of size m x n is identified with its Tanner graph:
check nodes c_1..c_m on one side, variable nodes v_1..v_n on the other, and
an edge (i, j) for every nonzero cell H[i][j].  All indices are 1-based to
match the matrix view.  Cycles in a bipartite graph have even length >= 4.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class GraphError(ValueError):
    """Raised for malformed graph input (bad dimensions, duplicate cells)."""


@dataclass(frozen=True)
class TannerGraph:
    """Immutable bipartite graph of an m x n parity-check matrix.

    Attributes:
        m: number of check nodes (matrix rows).
        n: number of variable nodes (matrix columns).
        entries: frozenset of (i, j) cells with a one, 1-based.
    """

    m: int
    n: int
    entries: frozenset
    _adj: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        var_nbrs = {j: [] for j in range(1, self.n + 1)}
        chk_nbrs = {i: [] for i in range(1, self.m + 1)}
        for (i, j) in self.entries:
            chk_nbrs[i].append(j)
            var_nbrs[j].append(i)
        for j in var_nbrs:
            var_nbrs[j] = tuple(sorted(var_nbrs[j]))
        for i in chk_nbrs:
            chk_nbrs[i] = tuple(sorted(chk_nbrs[i]))
        self._adj["v"] = var_nbrs
        self._adj["c"] = chk_nbrs

    def var_neighbors(self, j: int) -> tuple:
        """Sorted check indices adjacent to variable node j."""
        return self._adj["v"][j]

    def check_neighbors(self, i: int) -> tuple:
        """Sorted variable indices adjacent to check node i."""
        return self._adj["c"][i]

    def var_degree(self, j: int) -> int:
        return len(self._adj["v"][j])

    def check_degree(self, i: int) -> int:
        return len(self._adj["c"][i])

    @property
    def num_edges(self) -> int:
        return len(self.entries)


def build_graph(m: int, n: int, ones: Iterable) -> TannerGraph:
    """Build a TannerGraph from matrix dimensions and an iterable of cells.

    Raises GraphError on non-positive dimensions, out-of-range cells, or
    duplicate cells.
    """
    if m < 1 or n < 1:
        raise GraphError(f"dimensions must be positive, got m={m} n={n}")
    seen = set()
    for cell in ones:
        i, j = cell
        if not (1 <= i <= m and 1 <= j <= n):
            raise GraphError(f"cell {cell} outside [1..{m}] x [1..{n}]")
        if (i, j) in seen:
            raise GraphError(f"duplicate cell {cell}")
        seen.add((i, j))
    return TannerGraph(m=m, n=n, entries=frozenset(seen))


@dataclass(frozen=True)
class Cycle:
    """A simple cycle, stored in canonical orientation.

    nodes is the closed alternating sequence ('v', j), ('c', i), ... with
    each node listed once; the closing edge back to nodes[0] is implicit.
    entry_set is the frozenset of matrix cells (i, j) the cycle traverses.
    """

    nodes: tuple
    entry_set: frozenset

    @property
    def length(self) -> int:
        return len(self.nodes)


def _cells_of(nodes: Sequence) -> frozenset:
    cells = []
    k = len(nodes)
    for t in range(k):
        a, b = nodes[t], nodes[(t + 1) % k]
        if a[0] == "v":
            cells.append((b[1], a[1]))
        else:
            cells.append((a[1], b[1]))
    return frozenset(cells)


def canonical_cycle(nodes: Sequence) -> Cycle:
    """Normalize a closed alternating node sequence to a canonical Cycle.

    Rotation starts at the smallest variable-node index; direction is chosen
    so the second node is the smaller-indexed of that variable's two check
    neighbors on the cycle.
    """
    nodes = tuple(nodes)
    k = len(nodes)
    if k < 4 or k % 2 != 0:
        raise GraphError(f"cycle length {k} is not an even number >= 4")
    vpos = [t for t in range(k) if nodes[t][0] == "v"]
    start = min(vpos, key=lambda t: nodes[t][1])
    nxt = nodes[(start + 1) % k]
    prv = nodes[(start - 1) % k]
    if nxt[1] <= prv[1]:
        ordered = tuple(nodes[(start + t) % k] for t in range(k))
    else:
        ordered = tuple(nodes[(start - t) % k] for t in range(k))
    return Cycle(nodes=ordered, entry_set=_cells_of(ordered))


def _int_adjacency(g: TannerGraph):
    # variables are 0..n-1, checks are n..n+m-1
    n = g.n
    adj = [[] for _ in range(n + g.m)]
    for (i, j) in g.entries:
        adj[j - 1].append(n + i - 1)
        adj[n + i - 1].append(j - 1)
    for lst in adj:
        lst.sort()
    return adj

def girth(g: TannerGraph) -> Optional[int]:
    """Length of the shortest cycle, or None when the graph is acyclic.

    Runs a truncated BFS from every variable node; every cycle passes
    through some variable node, so the minimum over roots is exact.
    """
    adj = _int_adjacency(g)
    nv = g.n + g.m
    best = None
    dist = [-1] * nv
    parent = [-1] * nv
    for root in range(g.n):
        touched = [root]
        dist[root] = 0
        parent[root] = -2
        q = deque([root])
        while q:
            u = q.popleft()
            # nothing shorter than 2*dist+2 can close beyond this depth
            if best is not None and 2 * dist[u] + 2 >= best:
                break
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    touched.append(w)
                    q.append(w)
                elif w != parent[u] and dist[w] >= dist[u]:
                    cand = dist[u] + dist[w] + 1
                    if best is None or cand < best:
                        best = cand
        for u in touched:
            dist[u] = -1
            parent[u] = -1
        if best == 4:
            break
    return best


def enumerate_short_cycles(g: TannerGraph, T: int, deadline=None) -> set:
    """All simple cycles of length < T, deduplicated canonically.

    Depth-first search over simple paths rooted at each variable node, with
    track depth capped at T - 2 nodes.  A cycle is recorded whenever the
    next neighbor is an ancestor on the current track at gap >= 4.  Every
    cycle shorter than T contains a variable node and is walked in full from
    that root, so the enumeration is exhaustive.  deadline, when given, is
    checked between roots.
    """
    if T % 2 != 0 or T < 4:
        raise GraphError(f"target girth {T} is not an even number >= 4")
    adj = _int_adjacency(g)
    n = g.n
    cap = T - 2
    found = {}
    if cap < 4:
        return set()
    on_track = [-1] * (n + g.m)

    def tag(u):
        return ("v", u + 1) if u < n else ("c", u - n + 1)

    def dfs(track):
        depth = len(track)
        u = track[-1]
        prev = track[-2] if depth >= 2 else -1
        for w in adj[u]:
            if w == prev:
                continue
            t = on_track[w]
            if t >= 0:
                if depth - t >= 4:
                    cyc = canonical_cycle([tag(x) for x in track[t:]])
                    found[cyc.entry_set] = cyc
                continue
            if depth < cap:
                on_track[w] = depth
                track.append(w)
                dfs(track)
                track.pop()
                on_track[w] = -1

    for root in range(n):
        if deadline is not None:
            deadline.check()
        on_track[root] = 0
        dfs([root])
        on_track[root] = -1
    return set(found.values())


def degree_deviation(g: TannerGraph, spec) -> int:
    """Total slack between target degrees and realized degrees.

    spec provides 1-based-aligned target sequences spec.dv (variables) and
    spec.dc (checks).  Raises GraphError if any node exceeds its target.
    """
    total = 0
    for j in range(1, g.n + 1):
        d = g.var_degree(j)
        t = spec.dv[j - 1]
        if d > t:
            raise GraphError(f"variable node {j} has degree {d} > target {t}")
        total += t - d
    for i in range(1, g.m + 1):
        d = g.check_degree(i)
        t = spec.dc[i - 1]
        if d > t:
            raise GraphError(f"check node {i} has degree {d} > target {t}")
        total += t - d
    return total
