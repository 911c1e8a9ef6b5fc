"""Seeded random graph and weight generators shared by tests."""

import random

from girthforge.tanner import build_graph


def random_bipartite(rng: random.Random, max_m=6, max_n=8, p=0.35):
    m = rng.randint(2, max_m)
    n = rng.randint(2, max_n)
    ones = [
        (i, j)
        for i in range(1, m + 1)
        for j in range(1, n + 1)
        if rng.random() < p
    ]
    return build_graph(m, n, ones)


def random_weights(rng: random.Random, g, lo=0.05, hi=1.0):
    return {cell: rng.uniform(lo, hi) for cell in g.entries}
