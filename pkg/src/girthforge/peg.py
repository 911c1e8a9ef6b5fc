"""Greedy girth-safe construction used to warm start the search.

Progressive edge growth, modified in two ways: the construction starts
from (and never contradicts) a fixing plan, and edges beyond a variable's
first are only placed on checks at distance >= T-1, so every intermediate
graph keeps girth >= T.  Checks are chosen by largest remaining degree
slack; ties go to the smallest index, or are shuffled by an optional seed
to diversify restarts.  When no check qualifies the variable is left
short, which shows up as degree deviation rather than a girth violation.
"""

from __future__ import annotations

import random
from collections import deque

from .budget import Deadline
from .model import DesignSpec
from .tanner import TannerGraph, build_graph


def modified_peg(spec: DesignSpec, plan=None, seed=None,
                 deadline: Deadline = None) -> TannerGraph:
    """Grow a girth >= spec.T graph toward the target degrees.

    plan, when given, provides .ones (pre-placed cells) and .zeros
    (forbidden cells).  seed=None makes ties deterministic by index.
    """
    m, n, T = spec.m, spec.n, spec.T
    rng = random.Random(seed) if seed is not None else None
    var_adj = {j: set() for j in range(1, n + 1)}
    chk_adj = {i: set() for i in range(1, m + 1)}
    banned = frozenset(plan.zeros) if plan is not None else frozenset()
    entries = set()

    def place(i, j):
        entries.add((i, j))
        var_adj[j].add(i)
        chk_adj[i].add(j)

    if plan is not None:
        for (i, j) in plan.ones:
            place(i, j)

    # depth cap T-2 reaches every check at odd distance <= T-3; anything
    # left unvisited is at distance >= T-1 and safe to join
    def near_checks(j):
        seen_v = {j}
        seen_c = set()
        frontier = [j]
        side = "v"
        for _ in range(T - 2):
            nxt = []
            if side == "v":
                for v in frontier:
                    for c in var_adj[v]:
                        if c not in seen_c:
                            seen_c.add(c)
                            nxt.append(c)
            else:
                for c in frontier:
                    for v in chk_adj[c]:
                        if v not in seen_v:
                            seen_v.add(v)
                            nxt.append(v)
            side = "c" if side == "v" else "v"
            frontier = nxt
            if not frontier:
                break
        return seen_c

    for j in range(1, n + 1):
        if deadline is not None:
            deadline.check()
        want = spec.dv[j - 1]
        while len(var_adj[j]) < want:
            if var_adj[j]:
                blocked = near_checks(j)
            else:
                blocked = set()  # first edge closes no cycle
            best_slack = 0
            cands = []
            for i in range(1, m + 1):
                if i in blocked or (i, j) in banned or i in var_adj[j]:
                    continue
                slack = spec.dc[i - 1] - len(chk_adj[i])
                if slack > best_slack:
                    best_slack = slack
                    cands = [i]
                elif slack == best_slack and slack > 0:
                    cands.append(i)
            if not cands:
                break  # leave the variable short rather than close a cycle
            pick = cands[0] if rng is None else rng.choice(cands)
            place(pick, j)

    return build_graph(m, n, entries)
