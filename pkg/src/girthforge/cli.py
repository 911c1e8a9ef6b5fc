"""Command-line surface over the designer.

Five subcommands: design runs the branch-and-cut solver and writes the
code as an alist plus a JSON report, girth verifies a file on disk,
bounds prints the smallest dimension compatible with a girth target,
peg runs the greedy construction alone, and experiment sweeps a
mode x dimension x target grid into JSON-lines and an aligned table.

Exit codes: 0 success (design: proven optimal), 1 invalid input,
2 time limit hit with an incumbent, 3 no incumbent found.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .alist import AlistError, read_alist, write_alist
from .model import DesignSpec, ModelError
from .peg import modified_peg
from .solver import MODES, SolveConfig, solve
from .structure import StructureError, min_n_bound
from .tanner import degree_deviation, girth

DESK_DIMS = ((10, 20), (15, 30), (20, 40), (30, 60), (40, 80))
FULL_DIMS = DESK_DIMS + ((100, 200), (150, 300), (250, 500), (500, 1000))
DEFAULT_TIME_LIMIT = 3600.0
TABLE_COLUMNS = ("n", "z_l", "z", "z_u_i", "seconds", "gap", "lazy", "user")


class CliError(Exception):
    """Invalid input; the message names the offending flag."""


def _build_spec(args) -> DesignSpec:
    checks = (
        ("--m", args.m, args.m >= 1),
        ("--n", args.n, args.n >= 1),
        ("--J", args.J, args.J >= 1),
        ("--K", args.K, args.K >= 1),
        ("--girth", args.girth, args.girth >= 4 and args.girth % 2 == 0),
    )
    for flag, value, ok in checks:
        if not ok:
            raise CliError(f"{flag}={value} is invalid; see --help")
    try:
        return DesignSpec.regular(args.m, args.n, args.J, args.K, args.girth)
    except ModelError as exc:
        raise CliError(str(exc)) from exc


def _compact_trace(trace) -> list:
    """(time, z_l, z_u) checkpoints, one per change, always the last."""
    out = []
    for rec in trace:
        point = {
            "time": round(float(rec["time"]), 6),
            "z_l": float(rec["z_l"]),
            "z_u": float(rec["z_u"]),
        }
        if not out or (point["z_l"], point["z_u"]) != (
            out[-1]["z_l"], out[-1]["z_u"]
        ):
            out.append(point)
    if trace and (not out or out[-1]["time"] != round(float(trace[-1]["time"]), 6)):
        rec = trace[-1]
        out.append({
            "time": round(float(rec["time"]), 6),
            "z_l": float(rec["z_l"]),
            "z_u": float(rec["z_u"]),
        })
    return out


def report_payload(spec: DesignSpec, report) -> dict:
    incumbent = None
    if report.incumbent is not None:
        g = report.incumbent
        incumbent = {
            "entries": len(g.entries),
            "girth": girth(g),
            "deviation": degree_deviation(g, spec),
        }
    return {
        "spec": {
            "m": spec.m,
            "n": spec.n,
            "T": spec.T,
            "dv": list(spec.dv),
            "dc": list(spec.dc),
        },
        "mode": report.mode,
        "status": report.status,
        "z": report.z,
        "z_l": report.z_l,
        "z_u_i": report.z_u_i,
        "gap": report.gap,
        "lazy_cuts": report.lazy_cuts,
        "user_cuts": report.user_cuts,
        "nodes": report.nodes,
        "wall_time": report.wall_time,
        "fixing_mode": report.fixing_mode,
        "tau": report.tau,
        "guard_holds": report.guard_holds,
        "incumbent": incumbent,
        "trace": _compact_trace(report.trace),
    }


def _status_exit(report) -> int:
    if report.status == "optimal":
        return 0
    if report.status == "feasible-time-limit":
        return 2
    return 3


def cmd_design(args) -> int:
    spec = _build_spec(args)
    config = SolveConfig(
        mode=args.mode,
        time_limit=args.time_limit,
        seed=args.seed,
    )
    report = solve(spec, config)
    payload = report_payload(spec, report)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if args.out and report.incumbent is not None:
        with open(args.out, "w") as fh:
            fh.write(write_alist(report.incumbent))
    inc = payload["incumbent"]
    g_txt = "-" if inc is None else (
        "acyclic" if inc["girth"] is None else str(inc["girth"])
    )
    print(
        f"status={report.status} mode={report.mode} z={report.z} "
        f"z_l={report.z_l} z_u_i={report.z_u_i} gap={report.gap:.1f}% "
        f"girth={g_txt} fixing={report.fixing_mode} nodes={report.nodes} "
        f"wall={report.wall_time:.2f}s"
    )
    return _status_exit(report)


def cmd_girth(args) -> int:
    with open(args.infile) as fh:
        g = read_alist(fh.read())
    got = girth(g)
    print("acyclic" if got is None else got)
    return 0


def cmd_bounds(args) -> int:
    if args.J < 2 or args.K <= args.J:
        raise CliError(f"--J={args.J} --K={args.K} must satisfy 2 <= J < K")
    if args.girth < 4 or args.girth % 2:
        raise CliError(f"--girth={args.girth} must be an even number >= 4")
    bound = min_n_bound(args.J, args.K, args.girth)
    print(bound)
    if args.K == 2 * args.J:
        print(f"n = 2m (m >= {bound // 2})")
    return 0


def cmd_peg(args) -> int:
    spec = _build_spec(args)
    best = None
    restarts = max(1, args.restarts)
    base = 0 if args.seed is None else args.seed
    for k in range(restarts):
        seed = None if (args.seed is None and restarts == 1) else base + k
        g = modified_peg(spec, seed=seed)
        dev = degree_deviation(g, spec)
        if best is None or dev < best[0]:
            best = (dev, g)
        if best[0] == 0:
            break
    dev, g = best
    got = girth(g)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(write_alist(g))
    print(f"deviation={dev} girth={'acyclic' if got is None else got} "
          f"entries={len(g.entries)}")
    return 0


def _experiment_cell(dims, T, mode, time_limit, seed):
    m, n = dims
    row = {"T": T, "n": n, "m": m, "mode": mode, "status": "error",
           "z_l": None, "z": None, "z_u_i": None, "seconds": None,
           "gap": None, "lazy": None, "user": None, "error": None,
           "trace": []}
    try:
        spec = DesignSpec.regular(m, n, 3, 6, T)
        report = solve(spec, SolveConfig(mode=mode, time_limit=time_limit,
                                         seed=seed))
        row.update(
            status=report.status,
            z_l=report.z_l,
            z=report.z,
            z_u_i=report.z_u_i,
            seconds=round(report.wall_time, 3),
            gap=round(report.gap, 2),
            lazy=report.lazy_cuts,
            user=report.user_cuts,
            trace=_compact_trace(report.trace),
        )
    except Exception as exc:  # per-cell failures stay in the row
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _worker_count(args) -> int:
    requested = args.threads
    cap = os.environ.get("GIRTHFORGE_THREADS")
    if cap is not None:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            raise CliError(f"GIRTHFORGE_THREADS={cap!r} is not an integer")
    return max(1, requested)


def _format_table(rows) -> str:
    lines = []
    for key in sorted({(r["T"], r["mode"]) for r in rows}):
        T, mode = key
        block = [r for r in rows if (r["T"], r["mode"]) == key]
        block.sort(key=lambda r: r["n"])
        lines.append(f"girth target {T}, mode {mode}")
        table = [TABLE_COLUMNS]
        for r in block:
            table.append(tuple(
                "-" if r[c] is None else str(r[c]) for c in TABLE_COLUMNS
            ))
        widths = [max(len(row[i]) for row in table)
                  for i in range(len(TABLE_COLUMNS))]
        for row in table:
            lines.append("  " + "  ".join(
                cell.rjust(w) for cell, w in zip(row, widths)
            ))
        err = [r for r in block if r["error"]]
        for r in err:
            lines.append(f"  ! n={r['n']}: {r['error']}")
        lines.append("")
    return "\n".join(lines)


def cmd_experiment(args) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    if not modes:
        raise CliError("--modes must name at least one of " + ", ".join(MODES))
    for mode in modes:
        if mode not in MODES:
            raise CliError(f"--modes contains unknown mode {mode!r}")
    girths = []
    for tok in args.girths.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            girths.append(int(tok))
        except ValueError:
            raise CliError(f"--girths contains non-integer {tok!r}")
    if not girths:
        raise CliError("--girths must name at least one target")
    dims = DESK_DIMS if args.suite == "desk" else FULL_DIMS
    cells = [(d, T, mode) for T in girths for d in dims for mode in modes]
    workers = _worker_count(args)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda c: _experiment_cell(c[0], c[1], c[2],
                                           args.time_limit, args.seed),
                cells,
            ))
    else:
        rows = [_experiment_cell(d, T, mode, args.time_limit, args.seed)
                for (d, T, mode) in cells]
    os.makedirs(args.out, exist_ok=True)
    jsonl = os.path.join(args.out, "rows.jsonl")
    with open(jsonl, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    table = _format_table(rows)
    with open(os.path.join(args.out, "table.txt"), "w") as fh:
        fh.write(table)
    print(table, end="")
    failures = sum(1 for r in rows if r["status"] == "error")
    print(f"{len(rows)} cells, {failures} errors -> {jsonl}")
    return 0


def _add_spec_flags(p: argparse.ArgumentParser):
    p.add_argument("--m", type=int, required=True, help="check nodes (rows)")
    p.add_argument("--n", type=int, required=True,
                   help="variable nodes (columns)")
    p.add_argument("--J", type=int, required=True, help="column degree")
    p.add_argument("--K", type=int, required=True, help="row degree")
    p.add_argument("--girth", type=int, required=True,
                   help="even girth target >= 4")
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="girthforge",
        description="Design girth-constrained LDPC parity-check matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="run the branch-and-cut designer")
    _add_spec_flags(p)
    p.add_argument("--mode", choices=MODES, default="BC4")
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT,
                   dest="time_limit", help="seconds per solve")
    p.add_argument("--out", default=None, help="alist output path")
    p.add_argument("--report", default=None, help="JSON report path")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("girth", help="verify the girth of an alist file")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_girth)

    p = sub.add_parser("bounds", help="smallest n compatible with a target")
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--girth", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("peg", help="run the greedy construction alone")
    _add_spec_flags(p)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--out", default=None, help="alist output path")
    p.set_defaults(func=cmd_peg)

    p = sub.add_parser("experiment", help="sweep a mode x dimension grid")
    p.add_argument("--suite", choices=("desk", "full"), default="desk")
    p.add_argument("--modes", default="BC4",
                   help="comma-separated subset of " + ",".join(MODES))
    p.add_argument("--girths", default="6,8,10",
                   help="comma-separated girth targets")
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT,
                   dest="time_limit", help="seconds per cell")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads, capped by GIRTHFORGE_THREADS")
    p.add_argument("--out", default="experiments", help="output directory")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AlistError, ModelError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
