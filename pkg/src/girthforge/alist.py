"""Reader and writer for the alist sparse-matrix text format.

Layout of an alist file for an m x n matrix:

    line 1: n m
    line 2: max column degree, max row degree
    line 3: the n column degrees
    line 4: the m row degrees
    next n lines: 1-based row indices of the ones in each column,
        zero-padded to the max column degree
    next m lines: 1-based column indices of the ones in each row,
        zero-padded to the max row degree

Writing then parsing then writing again is byte-identical.
"""

from __future__ import annotations

from .tanner import TannerGraph, build_graph


class AlistError(ValueError):
    """Raised when alist text is malformed; the message names the line."""


def write_alist(g: TannerGraph) -> str:
    """Serialize a TannerGraph to alist text."""
    col_deg = [g.var_degree(j) for j in range(1, g.n + 1)]
    row_deg = [g.check_degree(i) for i in range(1, g.m + 1)]
    dmax_col = max(col_deg, default=0)
    dmax_row = max(row_deg, default=0)
    lines = [
        f"{g.n} {g.m}",
        f"{dmax_col} {dmax_row}",
        " ".join(str(d) for d in col_deg),
        " ".join(str(d) for d in row_deg),
    ]
    for j in range(1, g.n + 1):
        nbrs = list(g.var_neighbors(j)) + [0] * (dmax_col - g.var_degree(j))
        lines.append(" ".join(str(i) for i in nbrs))
    for i in range(1, g.m + 1):
        nbrs = list(g.check_neighbors(i)) + [0] * (dmax_row - g.check_degree(i))
        lines.append(" ".join(str(j) for j in nbrs))
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int, expect: int = None):
    try:
        vals = [int(tok) for tok in line.split()]
    except ValueError:
        raise AlistError(f"line {lineno}: non-integer token in {line!r}")
    if expect is not None and len(vals) != expect:
        raise AlistError(f"line {lineno}: expected {expect} integers, got {len(vals)}")
    return vals


def read_alist(text: str) -> TannerGraph:
    """Parse alist text into a TannerGraph.

    Raises AlistError with the offending line number on malformed input:
    wrong counts, degree mismatches, out-of-range or duplicate indices.
    """
    lines = text.splitlines()
    if len(lines) < 4:
        raise AlistError("fewer than 4 header lines")
    n, m = _ints(lines[0], 1, 2)
    if n < 1 or m < 1:
        raise AlistError(f"line 1: dimensions must be positive, got n={n} m={m}")
    dmax_col, dmax_row = _ints(lines[1], 2, 2)
    col_deg = _ints(lines[2], 3, n)
    row_deg = _ints(lines[3], 4, m)
    if len(lines) < 4 + n + m:
        raise AlistError(f"expected {4 + n + m} lines, got {len(lines)}")
    for j, d in enumerate(col_deg, 1):
        if d < 0 or d > dmax_col:
            raise AlistError(f"line 3: column {j} degree {d} outside [0, {dmax_col}]")
    for i, d in enumerate(row_deg, 1):
        if d < 0 or d > dmax_row:
            raise AlistError(f"line 4: row {i} degree {d} outside [0, {dmax_row}]")

    ones = set()
    for j in range(1, n + 1):
        lineno = 4 + j
        vals = _ints(lines[lineno - 1], lineno)
        if len(vals) != dmax_col:
            raise AlistError(
                f"line {lineno}: expected {dmax_col} entries for column {j}"
            )
        nz = [v for v in vals if v != 0]
        if len(nz) != col_deg[j - 1]:
            raise AlistError(
                f"line {lineno}: column {j} lists {len(nz)} ones, degree says "
                f"{col_deg[j - 1]}"
            )
        for i in nz:
            if not 1 <= i <= m:
                raise AlistError(f"line {lineno}: row index {i} outside [1, {m}]")
            if (i, j) in ones:
                raise AlistError(f"line {lineno}: duplicate cell ({i}, {j})")
            ones.add((i, j))

    row_ones = set()
    for i in range(1, m + 1):
        lineno = 4 + n + i
        vals = _ints(lines[lineno - 1], lineno)
        if len(vals) != dmax_row:
            raise AlistError(f"line {lineno}: expected {dmax_row} entries for row {i}")
        nz = [v for v in vals if v != 0]
        if len(nz) != row_deg[i - 1]:
            raise AlistError(
                f"line {lineno}: row {i} lists {len(nz)} ones, degree says "
                f"{row_deg[i - 1]}"
            )
        for j in nz:
            if not 1 <= j <= n:
                raise AlistError(f"line {lineno}: column index {j} outside [1, {n}]")
            if (i, j) in row_ones:
                raise AlistError(f"line {lineno}: duplicate cell ({i}, {j})")
            row_ones.add((i, j))

    if ones != row_ones:
        raise AlistError("column lists and row lists describe different matrices")
    return build_graph(m, n, ones)
