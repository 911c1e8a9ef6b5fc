"""End-to-end checks of the command line through main(argv)."""

import json
import os
from importlib import resources

import pytest
from jsonschema import validate

from girthforge.alist import read_alist, write_alist
from girthforge.cli import _worker_count, main
from girthforge.tanner import build_graph, girth


def load_schema(name):
    path = resources.files("girthforge.schemas").joinpath(name)
    return json.loads(path.read_text())


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


class TestDesign:
    def test_optimal_run_writes_files(self, tmp_path, capsys):
        alist = tmp_path / "code.alist"
        report = tmp_path / "report.json"
        rc, out, _ = run(
            capsys, "design", "--m", "15", "--n", "30", "--J", "3",
            "--K", "6", "--girth", "6", "--mode", "BC4",
            "--time-limit", "60", "--out", str(alist),
            "--report", str(report),
        )
        assert rc == 0
        assert "status=optimal" in out and "z=0" in out
        payload = json.loads(report.read_text())
        validate(payload, load_schema("report.schema.json"))
        assert payload["z"] == 0
        g = read_alist(alist.read_text())
        assert girth(g) >= 6
        assert {g.var_degree(j) for j in range(1, g.n + 1)} == {3}
        assert {g.check_degree(i) for i in range(1, g.m + 1)} == {6}

    def test_time_limit_exit_code(self, tmp_path, capsys):
        rc, out, _ = run(
            capsys, "design", "--m", "5", "--n", "10", "--J", "2",
            "--K", "4", "--girth", "8", "--mode", "BC0",
            "--time-limit", "1",
        )
        assert rc == 2
        assert "status=feasible-time-limit" in out

    def test_odd_girth_rejected(self, capsys):
        rc, _, err = run(
            capsys, "design", "--m", "10", "--n", "20", "--J", "3",
            "--K", "6", "--girth", "5",
        )
        assert rc == 1
        assert "--girth" in err

    def test_bad_dimension_rejected(self, capsys):
        rc, _, err = run(
            capsys, "design", "--m", "0", "--n", "20", "--J", "3",
            "--K", "6", "--girth", "6",
        )
        assert rc == 1
        assert "--m" in err


class TestGirthCommand:
    def test_four_cycle(self, tmp_path, capsys):
        g = build_graph(2, 2, [(1, 1), (1, 2), (2, 1), (2, 2)])
        path = tmp_path / "four.alist"
        path.write_text(write_alist(g))
        rc, out, _ = run(capsys, "girth", "--in", str(path))
        assert rc == 0
        assert out.strip() == "4"

    def test_acyclic(self, tmp_path, capsys):
        g = build_graph(2, 3, [(1, 1), (1, 2), (2, 3)])
        path = tmp_path / "tree.alist"
        path.write_text(write_alist(g))
        rc, out, _ = run(capsys, "girth", "--in", str(path))
        assert rc == 0
        assert out.strip() == "acyclic"

    def test_malformed_file(self, tmp_path, capsys):
        path = tmp_path / "bad.alist"
        path.write_text("2 2\nnot numbers\n")
        rc, _, err = run(capsys, "girth", "--in", str(path))
        assert rc == 1
        assert "error:" in err

    def test_solver_output_round_trips(self, tmp_path, capsys):
        alist = tmp_path / "code.alist"
        rc, _, _ = run(
            capsys, "design", "--m", "20", "--n", "40", "--J", "3",
            "--K", "6", "--girth", "6", "--mode", "BC4",
            "--time-limit", "60", "--out", str(alist),
        )
        assert rc == 0
        text = alist.read_text()
        g = read_alist(text)
        assert write_alist(g) == text
        rc, out, _ = run(capsys, "girth", "--in", str(alist))
        assert rc == 0
        assert int(out.strip()) >= 6


class TestBounds:
    def test_known_values(self, capsys):
        for T, want in ((6, 20), (8, 70), (10, 170)):
            rc, out, _ = run(capsys, "bounds", "--J", "3", "--K", "6",
                             "--girth", str(T))
            assert rc == 0
            assert int(out.splitlines()[0]) == want
            assert "n = 2m" in out

    def test_rate_relation_only_when_k_doubles_j(self, capsys):
        rc, out, _ = run(capsys, "bounds", "--J", "2", "--K", "5",
                         "--girth", "6")
        assert rc == 0
        assert "n = 2m" not in out

    def test_invalid_parameters(self, capsys):
        rc, _, err = run(capsys, "bounds", "--J", "6", "--K", "6",
                         "--girth", "6")
        assert rc == 1
        assert "--J" in err
        rc, _, err = run(capsys, "bounds", "--J", "3", "--K", "6",
                         "--girth", "7")
        assert rc == 1
        assert "--girth" in err


class TestPeg:
    def test_zero_deviation_instance(self, tmp_path, capsys):
        path = tmp_path / "peg.alist"
        rc, out, _ = run(
            capsys, "peg", "--m", "20", "--n", "40", "--J", "3",
            "--K", "6", "--girth", "6", "--restarts", "64",
            "--out", str(path),
        )
        assert rc == 0
        g = read_alist(path.read_text())
        assert girth(g) is None or girth(g) >= 6
        first = out.strip().split()[0]
        assert first.startswith("deviation=")
        assert int(first.split("=")[1]) % 2 == 0

    def test_deterministic_without_seed(self, tmp_path, capsys):
        a = tmp_path / "a.alist"
        b = tmp_path / "b.alist"
        for path in (a, b):
            rc, _, _ = run(
                capsys, "peg", "--m", "15", "--n", "30", "--J", "3",
                "--K", "6", "--girth", "8", "--out", str(path),
            )
            assert rc == 0
        assert a.read_text() == b.read_text()


class TestExperiment:
    def test_desk_rows_validate(self, tmp_path, capsys):
        out_dir = tmp_path / "exp"
        rc, out, _ = run(
            capsys, "experiment", "--suite", "desk", "--modes", "BC4",
            "--girths", "6", "--time-limit", "60", "--out", str(out_dir),
        )
        assert rc == 0
        schema = load_schema("experiment.schema.json")
        rows = [json.loads(line)
                for line in (out_dir / "rows.jsonl").read_text().splitlines()]
        assert len(rows) == 5
        for row in rows:
            validate(row, schema)
            assert row["status"] != "error"
            zl = [p["z_l"] for p in row["trace"]]
            zu = [p["z_u"] for p in row["trace"]]
            assert all(x <= y for x, y in zip(zl, zl[1:]))
            assert all(x >= y for x, y in zip(zu, zu[1:]))
        assert (out_dir / "table.txt").read_text() in out

    def test_empty_mode_list(self, capsys):
        rc, _, err = run(capsys, "experiment", "--modes", ",")
        assert rc == 1
        assert "--modes" in err

    def test_unknown_mode(self, capsys):
        rc, _, err = run(capsys, "experiment", "--modes", "BC7")
        assert rc == 1
        assert "BC7" in err

    def test_thread_cap_env(self, monkeypatch):
        class Args:
            threads = 8
        monkeypatch.setenv("GIRTHFORGE_THREADS", "2")
        assert _worker_count(Args()) == 2
        monkeypatch.setenv("GIRTHFORGE_THREADS", "16")
        assert _worker_count(Args()) == 8
        monkeypatch.delenv("GIRTHFORGE_THREADS")
        assert _worker_count(Args()) == 8
