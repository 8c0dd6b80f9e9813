"""End-to-end command-line behaviour: exit codes, files, determinism."""

import csv
import io
import json

import pytest

from polymis import cli
from polymis.cli import main
from polymis.instances import read_instance


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def gen_blocks(tmp_path, name="blocks.json", m=8, seed=3):
    path = tmp_path / name
    assert main(["gen", "--mode", "blocks", "--m", str(m), "--n", "8",
                 "--delta", "1/2", "--seed", str(seed),
                 "--output", str(path)]) == 0
    return path


def gen_polys(tmp_path, name="polys.json", m=6, n=40, seed=1):
    path = tmp_path / name
    assert main(["gen", "--mode", "squares", "--m", str(m), "--n", str(n),
                 "--seed", str(seed), "--output", str(path)]) == 0
    return path


class TestGen:
    def test_roundtrip_identity(self, tmp_path):
        path = gen_blocks(tmp_path)
        inst = read_instance(str(path))
        from polymis.instances import instance_to_dict, instance_from_dict
        assert instance_from_dict(instance_to_dict(inst)) == inst

    def test_same_seed_byte_identical(self, tmp_path):
        a = gen_polys(tmp_path, "a.json", seed=7)
        b = gen_polys(tmp_path, "b.json", seed=7)
        assert a.read_bytes() == b.read_bytes()

    def test_missing_delta(self, capsys):
        code, _, err = run(capsys, "gen", "--mode", "blocks", "--m", "2",
                           "--n", "8")
        assert code == 2 and "delta" in err

    def test_stdout_output(self, capsys):
        code, out, _ = run(capsys, "gen", "--mode", "squares", "--m", "2",
                           "--n", "20", "--seed", "0")
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "polygons" and len(doc["items"]) == 2


class TestSolvers:
    def test_exact(self, tmp_path, capsys):
        path = gen_polys(tmp_path)
        code, out, _ = run(capsys, "solve-exact", "--input", str(path))
        assert code == 0
        doc = json.loads(out)
        assert doc["weight"] > 0 and doc["chosen"] == sorted(doc["chosen"])

    def test_exact_caps(self, tmp_path, capsys):
        path = gen_polys(tmp_path, m=6)
        code, _, err = run(capsys, "solve-exact", "--input", str(path),
                           "--caps", "4")
        assert code == 3 and "cap" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "solve-exact", "--input", "no-such.json")
        assert code == 2

    def test_qptas_guided_matches_exact(self, tmp_path, capsys):
        path = gen_polys(tmp_path)
        _, out, _ = run(capsys, "solve-exact", "--input", str(path))
        w_exact = json.loads(out)["weight"]
        code, out, _ = run(capsys, "solve-qptas", "--input", str(path),
                           "--eps", "1/2", "--mode", "oracle-guided")
        assert code == 0
        doc = json.loads(out)
        assert doc["weight"] == w_exact     # disjoint instance: single leaf
        assert doc["total_lost"] == 0

    def test_blocks_and_caps(self, tmp_path, capsys):
        path = gen_blocks(tmp_path)
        code, out, _ = run(capsys, "solve-blocks", "--input", str(path),
                           "--eps", "1/2")
        assert code == 0 and json.loads(out)["weight"] > 0
        code, _, err = run(capsys, "solve-blocks", "--input", str(path),
                           "--eps", "1/8")
        assert code == 3 and "caps" in err.lower() or "N <= " in err

    def test_rects(self, tmp_path, capsys):
        path = tmp_path / "r.json"
        assert main(["gen", "--mode", "rectangles", "--m", "5", "--n", "8",
                     "--delta", "1/2", "--seed", "4",
                     "--output", str(path)]) == 0
        code, out, _ = run(capsys, "solve-rects", "--input", str(path),
                           "--eps", "1/2")
        assert code == 0 and json.loads(out)["weight"] > 0

    def test_kind_mismatch(self, tmp_path, capsys):
        path = gen_polys(tmp_path)
        code, _, _ = run(capsys, "solve-blocks", "--input", str(path),
                         "--eps", "1/2")
        assert code == 2


class TestStructuralCommands:
    def test_decompose(self, tmp_path, capsys):
        path = gen_polys(tmp_path)
        code, out, _ = run(capsys, "decompose", "--input", str(path))
        assert code == 0
        doc = json.loads(out)
        assert doc["within_bound"]
        assert doc["corridors"] <= doc["bound_3m_minus_3"]

    def test_cut_roundtrip(self, tmp_path, capsys):
        path = gen_polys(tmp_path)
        code, out, _ = run(capsys, "cut", "--input", str(path),
                           "--eps", "1/2")
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] in ("cut", "heavy")
        if doc["kind"] == "cut":
            assert doc["encoding_bits"] > 0

    def test_cutting(self, tmp_path, capsys):
        path = gen_polys(tmp_path)
        code, out, _ = run(capsys, "cutting", "--input", str(path),
                           "--r", "4", "--seed", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["retries"] <= 10

    def test_verify_partition(self, tmp_path, capsys):
        path = gen_blocks(tmp_path)
        code, out, _ = run(capsys, "verify-partition", "--input", str(path),
                           "--eps", "1/2")
        assert code == 0
        assert json.loads(out)["violations"] == []

    def test_violations_exit_code(self, tmp_path, capsys, monkeypatch):
        path = gen_blocks(tmp_path)
        monkeypatch.setattr(cli, "verify_partition",
                            lambda *a, **k: {"violations": ["forced"],
                                             "cut_weight": 0})
        code, out, _ = run(capsys, "verify-partition", "--input", str(path),
                           "--eps", "1/2")
        assert code == 4

    def test_decay(self, tmp_path, capsys):
        path = gen_polys(tmp_path, m=12, n=60, seed=2)
        code, out, err = run(capsys, "decay", "--input", str(path),
                             "--rho", "6", "--t", "1,2", "--trials", "5",
                             "--seed", "1")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["t"] for r in rows] == ["1", "2"]
        assert "slope" in err


class TestBench:
    def plan(self, tmp_path):
        plan = {"runs": [
            {"generator": {"kind": "blocks", "m": 6, "n": 8,
                           "delta": "1/2", "seed": 3},
             "algorithm": "blocks", "params": {"eps": "1/2"},
             "oracle": True},
            {"generator": {"kind": "squares", "m": 4, "n": 30, "seed": 1},
             "algorithm": "exact"},
        ]}
        path = tmp_path / "plan.json"
        path.write_text(json.dumps(plan))
        return path

    def test_rows_and_gap(self, tmp_path, capsys):
        path = self.plan(tmp_path)
        code, out, _ = run(capsys, "bench", "--input", str(path))
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 2
        assert rows[0]["algorithm"] == "blocks"     # plan order
        assert float(rows[0]["gap"]) >= 1.0
        assert rows[1]["oracle_weight"] == ""

    def test_rerun_identical_modulo_walltime(self, tmp_path, capsys):
        path = self.plan(tmp_path)
        _, out1, _ = run(capsys, "bench", "--input", str(path))
        _, out2, _ = run(capsys, "bench", "--input", str(path))
        rows1 = list(csv.DictReader(io.StringIO(out1)))
        rows2 = list(csv.DictReader(io.StringIO(out2)))
        for a, b in zip(rows1, rows2):
            a.pop("wall_time")
            b.pop("wall_time")
            assert a == b

    def test_unknown_algorithm_fails_before_runs(self, tmp_path, capsys):
        plan = {"runs": [
            {"generator": {"kind": "blocks", "m": 2, "n": 8,
                           "delta": "1/2", "seed": 1},
             "algorithm": "nope"}]}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(plan))
        code, _, err = run(capsys, "bench", "--input", str(path))
        assert code == 2 and "nope" in err

    def test_empty_plan(self, tmp_path, capsys):
        path = tmp_path / "empty.json"
        path.write_text(json.dumps({"runs": []}))
        code, _, _ = run(capsys, "bench", "--input", str(path))
        assert code == 2
