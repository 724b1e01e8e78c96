import csv
import io
import json
import subprocess
import sys

import pytest

from qubittree.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_circuit(tmp_path, data, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


class TestGen:
    def test_ternary(self, capsys):
        code, out, err = run(capsys, "gen", "cf-ternary:2", "--oracle")
        assert code == 0
        terms = [line.split("\t")[2] for line in out.splitlines()]
        assert terms == ["+iXXII", "+iXYII", "+iXZII", "+iYIXI", "+iYIYI", "+iYIZI", "+iZIIX", "+iZIIY", "+iZIIZ"]
        assert "PASS anticommutation (dense)" in err

    def test_binary(self, capsys):
        code, out, _ = run(capsys, "gen", "cf-binary:2", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["index", "node", "label", "term"]
        assert [r[3] for r in rows[1:]] == ["+iZII", "+iXZI", "+iYIZ", "+iXXI", "+iXYI", "+iYIX", "+iYIY"]
        assert rows[1][1:3] == ["1", "z"]

    def test_jw_single(self, capsys):
        _, out, _ = run(capsys, "gen", "jw:1")
        assert [line.split("\t")[2] for line in out.splitlines()] == ["+iX", "+iY", "+iZ"]

    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "gen", "bk:4", "--format", "json")
        data = json.loads(out)
        assert code == 0 and data["report"]["passed"]
        assert len(data["rows"]) == 9

    def test_tree_file(self, capsys, tmp_path):
        p = tmp_path / "t.json"
        p.write_text(json.dumps({"m": 3, "root": 1, "edges": [[1, 2, "x"], [2, 3, "z"]]}))
        code, out, _ = run(capsys, "gen", str(p))
        assert code == 0 and len(out.splitlines()) == 7

    def test_malformed_file(self, capsys, tmp_path):
        p = tmp_path / "t.json"
        p.write_text('{"m": 2,\n "root": 1,\n "edges": [[1, 2, "q"]]}')
        code, _, err = run(capsys, "gen", str(p))
        assert code == 2 and "bad label" in err

    def test_json_syntax_line(self, capsys, tmp_path):
        p = tmp_path / "t.json"
        p.write_text('{"m": 2,\n "root": 1\n "edges": []}')
        code, _, err = run(capsys, "gen", str(p))
        assert code == 2 and "line 3" in err

    def test_bad_spec(self, capsys):
        assert run(capsys, "gen", "cf-binary:x")[0] == 2
        assert run(capsys, "gen", "bk:6")[0] == 2
        assert run(capsys, "gen", "nonexistent")[0] == 2

    def test_oracle_cap(self, capsys):
        assert run(capsys, "gen", "cf-binary:4", "--oracle")[0] == 2


class TestTree:
    def test_json_round_trip(self, capsys, tmp_path):
        _, out, _ = run(capsys, "tree", "cf-ternary:2", "--format", "json")
        p = tmp_path / "t.json"
        p.write_text(out)
        _, out2, _ = run(capsys, "tree", str(p), "--format", "json")
        assert json.loads(out) == json.loads(out2)

    def test_output_file(self, capsys, tmp_path):
        p = tmp_path / "edges.csv"
        run(capsys, "tree", "jw:3", "--format", "csv", "--output", str(p))
        assert p.read_text().splitlines()[0] == "parent,child,label"


class TestMap:
    def test_bk_inverse_all_ones(self, capsys):
        code, out, _ = run(capsys, "map", "bk:8", "--inverse", "11111111")
        assert code == 0 and out.strip()[7] == "0"

    def test_zero(self, capsys):
        assert run(capsys, "map", "cf-binary:3", "--forward", "0000000")[1].strip() == "0000000"

    def test_binary_forward(self, capsys):
        assert run(capsys, "map", "cf-binary:2", "--forward", "110")[1].strip() == "010"

    def test_several_vectors(self, capsys):
        assert run(capsys, "map", "cf-binary:2", "--forward", "110", "001")[1].split() == ["010", "101"]

    def test_all(self, capsys):
        code, out, err = run(capsys, "map", "bk:8", "--all", "--format", "csv")
        assert code == 0 and len(out.splitlines()) == 257 and "FAIL" not in err

    def test_all_cap(self, capsys):
        assert run(capsys, "map", "cf-binary:4", "--all")[0] == 2

    def test_length_mismatch(self, capsys):
        assert run(capsys, "map", "cf-binary:2", "--forward", "10")[0] == 2

    def test_table(self, capsys):
        _, out, _ = run(capsys, "map", "bk:8", "--table", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["node", "kind", "c", "s", "D"]
        assert rows[4] == ["3", "internal", "1 2", "0 1 2 3 4 5 6", "0 1 2"]


class TestLadder:
    def test_binary(self, capsys):
        code, out, _ = run(capsys, "ladder", "cf-binary:2", "--oracle")
        assert code == 0
        assert out.splitlines()[0] == "a_1 = ½(+XZI) + ½i(+YIZ)"

    def test_dagger(self, capsys):
        _, out, _ = run(capsys, "ladder", "jw:2", "--dagger")
        assert out.splitlines()[0] == "a_1^+ = ½(+XI) - ½i(+YI)"

    def test_ternary_rejected(self, capsys):
        assert run(capsys, "ladder", "cf-ternary:2")[0] == 2


class TestSimulate:
    def test_zero_circuit(self, capsys, tmp_path):
        path = write_circuit(tmp_path, {"tree": "cf-binary:2", "basis": "spin",
                                        "steps": [{"coeffs": [[2, 3, 0.0]], "tau": 1.0}]})
        code, out, _ = run(capsys, "simulate", path, "--oracle", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0
        assert rows[0]["v1"] == "1" and rows[0]["v2"] == "0"
        assert float(rows[0]["dev_v"]) == 0 and float(rows[0]["dev_M"]) == 0

    def test_random_three_steps(self, capsys, tmp_path):
        path = str(tmp_path / "c.json")
        assert run(capsys, "random-circuit", "cf-binary:2", "--steps", "3", "--seed", "7", "-o", path)[0] == 0
        code, out, err = run(capsys, "simulate", path, "--oracle", "--occupations", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 3
        assert all(float(r[k]) < 1e-8 for r in rows for k in ("dev_v", "dev_M", "dev_nbar"))
        assert "nbar3" in rows[0]

    def test_ladder_basis(self, capsys, tmp_path):
        path = str(tmp_path / "l.json")
        run(capsys, "random-circuit", "cf-binary:2", "--basis", "ladder", "--steps", "2", "-o", path)
        code, out, err = run(capsys, "simulate", path, "--oracle", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and float(rows[-1]["dev_state"]) < 1e-8

    def test_tolerance_failure_exit(self, capsys, tmp_path):
        path = str(tmp_path / "c.json")
        run(capsys, "random-circuit", "cf-binary:2", "--steps", "2", "-o", path)
        code, _, err = run(capsys, "simulate", path, "--oracle", "--tol", "-1")
        assert code == 1 and "FAIL" in err

    def test_deterministic(self, capsys, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        run(capsys, "random-circuit", "cf-binary:3", "--seed", "3", "-o", a)
        run(capsys, "random-circuit", "cf-binary:3", "--seed", "3", "-o", b)
        assert open(a).read() == open(b).read()

    def test_oracle_too_large(self, capsys, tmp_path):
        path = write_circuit(tmp_path, {"tree": "cf-binary:4", "basis": "spin", "steps": []})
        assert run(capsys, "simulate", path, "--oracle")[0] == 2

    @pytest.mark.parametrize(
        "data",
        [
            {"tree": "cf-binary:2", "steps": []},
            {"tree": "cf-binary:2", "basis": "other", "steps": []},
            {"tree": "cf-binary:2", "basis": "spin", "steps": [{"coeffs": [[1, 9, 1.0]]}]},
            {"tree": "cf-binary:2", "basis": "spin", "steps": [{"coeffs": [[1, 1, 1.0]]}]},
            {"tree": "cf-binary:2", "basis": "spin", "steps": [{"tau": 1.0}]},
            {"tree": "cf-binary:2", "basis": "ladder", "steps": [{"coeffs": [[1, 2, 1.0]]}], "chi": [1, 0]},
        ],
    )
    def test_malformed(self, capsys, tmp_path, data):
        assert run(capsys, "simulate", write_circuit(tmp_path, data))[0] == 2

    def test_missing_file(self, capsys):
        assert run(capsys, "simulate", "/nonexistent/c.json")[0] == 2

    def test_scale_run_reports_timing(self, capsys, tmp_path):
        path = str(tmp_path / "big.json")
        run(capsys, "random-circuit", "cf-binary:10", "--brickwork", "--steps", "2", "-o", path)
        code, _, err = run(capsys, "simulate", path, "--output", str(tmp_path / "big.csv"))
        assert code == 0 and "time propagate" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qubittree", "gen", "jw:2"], capture_output=True, text=True)
    assert res.returncode == 0 and len(res.stdout.splitlines()) == 5
