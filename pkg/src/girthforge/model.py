"""Degree-deviation integer program over parity-check matrix cells.

One binary column X_ij per matrix cell, one slack column per node.  Column
j must collect dv_j ones and row i must collect dc_i ones; the slacks
absorb any shortfall and their sum is the objective.  A girth target enters
through cycle-breaking rows: for a cycle C shorter than the target,
sum of X over the cells of C <= |C| - 1.  Girth-feasibility is the
deviation-zero question: a graph meeting every degree target exactly and
every cycle row exists iff the minimized deviation is 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .simplex import LpProblem


class ModelError(ValueError):
    """Raised for inconsistent design parameters."""


@dataclass(frozen=True)
class DesignSpec:
    """Dimensions, per-node degree targets, and the girth target T."""

    m: int
    n: int
    dv: tuple
    dc: tuple
    T: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ModelError(f"dimensions must be positive, got {self.m}x{self.n}")
        if self.T < 4 or self.T % 2 != 0:
            raise ModelError(f"girth target {self.T} is not an even number >= 4")
        if len(self.dv) != self.n or len(self.dc) != self.m:
            raise ModelError("degree target lengths do not match dimensions")
        if any(d < 0 or d > self.m for d in self.dv):
            raise ModelError("a variable-node target falls outside [0, m]")
        if any(d < 0 or d > self.n for d in self.dc):
            raise ModelError("a check-node target falls outside [0, n]")

    @classmethod
    def regular(cls, m: int, n: int, J: int, K: int, T: int) -> "DesignSpec":
        return cls(m=m, n=n, dv=(J,) * n, dc=(K,) * m, T=T)

    @property
    def regularity(self) -> Optional[tuple]:
        """(J, K) when all targets agree on each side, else None."""
        if not self.dv or not self.dc:
            return None
        if len(set(self.dv)) == 1 and len(set(self.dc)) == 1:
            return (self.dv[0], self.dc[0])
        return None

    @property
    def target_sum(self) -> int:
        return sum(self.dv) + sum(self.dc)


@dataclass(frozen=True)
class Cut:
    """A <= row over matrix cells: sum of X over entry_set <= rhs."""

    entry_set: frozenset
    rhs: int
    origin: str = "cycle"

    @classmethod
    def from_cycle(cls, entry_set, origin="cycle") -> "Cut":
        cells = frozenset(entry_set)
        return cls(entry_set=cells, rhs=len(cells) - 1, origin=origin)


class MddProblem:
    """LP relaxation of the deviation program plus a deduplicated cut pool.

    Column layout: cell (i, j) at (i-1)*n + (j-1), then the n variable-side
    slacks, then the m check-side slacks.  Bounds on the LP are the global
    state (construction plus fixings); per-node overrides are the caller's
    business.
    """

    def __init__(self, spec: DesignSpec):
        self.spec = spec
        m, n = spec.m, spec.n
        ncols = m * n + n + m
        objective = np.zeros(ncols)
        objective[m * n :] = 1.0
        lower = np.zeros(ncols)
        upper = np.concatenate([np.ones(m * n), np.full(n + m, np.inf)])
        self.lp = LpProblem(ncols=ncols, objective=objective, lower=lower, upper=upper)
        for j in range(1, n + 1):
            cols = np.arange(m, dtype=np.int64) * n + (j - 1)
            cols = np.append(cols, self.dv_col(j))
            self.lp.add_row(cols, np.ones(m + 1), "=", spec.dv[j - 1])
        for i in range(1, m + 1):
            cols = np.arange(n, dtype=np.int64) + (i - 1) * n
            cols = np.append(cols, self.dc_col(i))
            self.lp.add_row(cols, np.ones(n + 1), "=", spec.dc[i - 1])
        self.cut_pool = {}

    def xcol(self, i: int, j: int) -> int:
        return (i - 1) * self.spec.n + (j - 1)

    def dv_col(self, j: int) -> int:
        return self.spec.m * self.spec.n + (j - 1)

    def dc_col(self, i: int) -> int:
        return self.spec.m * self.spec.n + self.spec.n + (i - 1)

    def fix_cell(self, i: int, j: int, value: int):
        """Pin X_ij to 0 or 1 in the global bounds."""
        if value not in (0, 1):
            raise ModelError(f"cell value must be 0 or 1, got {value}")
        col = self.xcol(i, j)
        if self.lp.lower[col] > value or self.lp.upper[col] < value:
            raise ModelError(f"cell ({i}, {j}) already fixed to the other value")
        self.lp.set_bounds(col, value, value)

    def apply_fixing(self, plan):
        """Pin every cell in plan.ones to 1 and plan.zeros to 0."""
        for (i, j) in plan.ones:
            self.fix_cell(i, j, 1)
        for (i, j) in plan.zeros:
            self.fix_cell(i, j, 0)

    def add_cut(self, cut: Cut) -> Optional[int]:
        """Append a cut row unless an identical entry set is pooled.

        Returns the new row index, or None for a duplicate.
        """
        if cut.entry_set in self.cut_pool:
            return None
        cols = np.fromiter(
            (self.xcol(i, j) for (i, j) in sorted(cut.entry_set)),
            dtype=np.int64,
            count=len(cut.entry_set),
        )
        row = self.lp.add_row(cols, np.ones(cols.size), "<=", cut.rhs)
        self.cut_pool[cut.entry_set] = row
        return row

    def x_matrix(self, x: np.ndarray) -> np.ndarray:
        """Reshape a structural solution vector to the m x n cell view."""
        m, n = self.spec.m, self.spec.n
        return x[: m * n].reshape(m, n)
