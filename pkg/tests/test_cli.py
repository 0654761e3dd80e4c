import csv
import io
import json
import subprocess
import sys

import pytest

from pi_forge.cli import build_parser, main
from pi_forge.pi_models import fixture
from pi_forge.serialization import model_to_json

SUBCOMMANDS = ["generate", "sample", "learn", "verify", "k2-analysis", "repro"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestGenerate:
    def test_matches_fixture(self, tmp_path, capsys):
        out = tmp_path / "t1.json"
        assert run(capsys, "generate", "--eta", "4", "--q", "1.0", "--out", str(out))[0] == 0
        assert out.read_text() == model_to_json(fixture("table1"))
        meta = json.loads((tmp_path / "t1.json.meta.json").read_text())
        assert meta == {"generator": "theorem1", "eta": 4, "q": 1.0}

    def test_half_rejected(self, capsys):
        code, _, err = run(capsys, "generate", "--eta", "3", "--q", "0.5")
        assert code == 2 and "0.5" in err

    def test_generate_then_verify(self, tmp_path, capsys):
        out = tmp_path / "m.json"
        run(capsys, "generate", "--eta", "5", "--q", "0.3", "--out", str(out))
        code, stdout, _ = run(capsys, "verify", str(out))
        assert code == 0 and json.loads(stdout)["verdict"] == "FullPI"

    def test_byte_identical_runs(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "generate", "--eta", "6", "--q", "0.9", "--out", str(a))
        run(capsys, "generate", "--eta", "6", "--q", "0.9", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestVerify:
    def test_table3(self, capsys):
        code, out, err = run(capsys, "verify", "fixture:table3")
        report = json.loads(out)
        assert code == 0 and report["verdict"] == "PartialPI"
        assert report["independent_pair_names"] == [["X1", "X2"], ["X1", "X3"]]
        assert "PartialPI" in err

    def test_table4_embedded(self, capsys):
        _, out, _ = run(capsys, "verify", "fixture:table4", "--embedded", "--max-subset", "3")
        embedded = json.loads(out)["embedded"]
        assert {"subset": ["X1", "X2", "X3"], "verdict": "PartialPI"}.items() <= next(
            e for e in embedded if e["subset"] == ["X1", "X2", "X3"]
        ).items()

    def test_product(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"variables": [{"name": f"V{i}", "cardinality": 2} for i in range(3)],
                                    "probs": ["0.125"] * 8}))
        _, out, _ = run(capsys, "verify", str(path))
        assert json.loads(out)["verdict"] == "NonPI-Independent"

    def test_missing_file(self, tmp_path, capsys):
        assert run(capsys, "verify", str(tmp_path / "nope.json"))[0] == 2


class TestLearn:
    def test_kutato_single_link(self, capsys):
        code, out, _ = run(capsys, "learn", "--algo", "kutato", "--model", "fixture:table1", "--k", "1")
        assert code == 0 and json.loads(out)["arcs"] == []

    def test_pc_table4(self, capsys):
        _, out, _ = run(capsys, "learn", "--algo", "pc", "--model", "fixture:table4")
        links = json.loads(out)["links"]
        assert ["X1", "X2"] not in links and ["X1", "X3"] not in links
        assert ["X2", "X3"] in links

    def test_kutato_three_links(self, tmp_path, capsys):
        dot, trace = tmp_path / "g.dot", tmp_path / "t.jsonl"
        _, out, _ = run(capsys, "learn", "--algo", "kutato", "--model", "fixture:table1", "--k", "3",
                        "--dot", str(dot), "--trace", str(trace))
        arcs = json.loads(out)["arcs"]
        assert {name for arc in arcs for name in arc} == {"X1", "X2", "X3", "X4"}
        assert dot.read_text().startswith("digraph")
        assert len(trace.read_text().splitlines()) == 2

    def test_k2_with_exact_counts(self, capsys):
        _, out, _ = run(capsys, "learn", "--algo", "k2", "--model", "fixture:table1", "--m", "16",
                        "--ordering", "X4,X3,X2,X1")
        assert json.loads(out)["arcs"] == []

    def test_k2_needs_counts(self, capsys):
        assert run(capsys, "learn", "--algo", "k2", "--model", "fixture:table1")[0] == 2

    def test_from_data_file(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        run(capsys, "sample", "--model", "fixture:table3", "--m", "40", "--exact", "--out", str(data))
        _, out, _ = run(capsys, "learn", "--algo", "lam-bacchus", "--data", str(data))
        obj = json.loads(out)
        assert obj["arcs"] == [["X2", "X3"]]
        assert [pair[:2] for pair in obj["link_list"][-2:]] == [["X1", "X2"], ["X1", "X3"]]

    def test_non_realizable(self, capsys):
        assert run(capsys, "learn", "--algo", "k2", "--model", "fixture:table1", "--m", "10")[0] == 2

    def test_deterministic_sample_mode(self, capsys):
        argv = ["learn", "--algo", "k2", "--model", "fixture:table4", "--m", "500", "--dataset-mode", "sample",
                "--seed", "5", "--k", "2"]
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


class TestSampleAndAnalysis:
    def test_sample_deterministic(self, capsys):
        argv = ["sample", "--model", "fixture:table4", "--m", "100", "--seed", "3"]
        a, b = run(capsys, *argv)[1], run(capsys, *argv)[1]
        assert a == b and len(a.splitlines()) == 101

    def test_sample_json(self, capsys):
        _, out, _ = run(capsys, "sample", "--model", "fixture:table2", "--m", "1000", "--exact", "--format", "json")
        assert json.loads(out)["counts"][0] == 24

    def test_k2_analysis_csv(self, capsys):
        _, out, _ = run(capsys, "k2-analysis", "--m-range", "4..14")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [int(r["m"]) for r in rows] == list(range(4, 15))
        assert rows[0]["argmin"] == "(2,2,1,1)" and float(rows[0]["min_r"]) == pytest.approx(1.2)
        assert float(rows[8]["min_r"]) == pytest.approx(1.3846, abs=1e-4)
        assert rows[9]["min_r"] == "" and rows[9]["cells_examined"] == "0"
        assert float(rows[10]["min_r_prime"]) > 1 > float(rows[9]["min_r_prime"])

    def test_k2_analysis_parallel_matches(self, capsys, monkeypatch):
        serial = run(capsys, "k2-analysis", "--m-range", "4..24")[1]
        monkeypatch.setenv("PI_FORGE_THREADS", "2")
        assert run(capsys, "k2-analysis", "--m-range", "4..24")[1] == serial

    @pytest.mark.parametrize("bad", ["4-10", "10..4", "2..6"])
    def test_k2_analysis_bad_range(self, capsys, bad):
        assert run(capsys, "k2-analysis", "--m-range", bad)[0] == 2


class TestParser:
    @pytest.mark.parametrize("cmd", SUBCOMMANDS)
    def test_help_lists_defaults(self, cmd, capsys):
        with pytest.raises(SystemExit) as exc:
            main([cmd, "--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        sub = build_parser()._subparsers._group_actions[0].choices[cmd]
        for action in sub._actions:
            for flag in action.option_strings:
                assert flag in out
        assert out.count("(default:") >= len([a for a in sub._actions if a.option_strings and a.dest != "help"])

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["learn", "--algo", "pc", "--model", "fixture:table1", "--bogus"])
        assert exc.value.code == 2

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "pi_forge", "verify", "fixture:table1"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "FullPI"
