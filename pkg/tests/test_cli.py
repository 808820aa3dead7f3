"""End-to-end command-line checks: outputs, determinism, exit codes."""

import json

import pytest

from amenlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGrowth:
    def test_csv(self, capsys):
        code, out, _err = run(capsys, "growth", "--group", "z:1",
                              "--radius", "3")
        assert code == 0
        assert out == "0,1\n1,3\n2,5\n3,7\n"

    def test_json(self, capsys):
        code, out, _err = run(capsys, "growth", "--group", "free:2",
                              "--radius", "2", "--format", "json")
        assert code == 0
        assert json.loads(out)["values"] == [1, 5, 17]


class TestWalk:
    def test_exact_return(self, capsys):
        code, out, _err = run(capsys, "walk", "return", "--group", "z:1",
                              "--steps", "2")
        assert code == 0
        assert out.strip() == "1/2"

    def test_truncated_needs_radius(self, capsys):
        code, _out, err = run(capsys, "walk", "truncated", "--group", "z:1")
        assert code == 2
        assert "radius" in err

    def test_invorbit_needs_seed(self, capsys):
        code, _out, err = run(capsys, "walk", "invorbit", "--group", "z:1")
        assert code == 2
        assert "seed" in err

    def test_invorbit_reports_exact_mean(self, capsys):
        code, out, _err = run(capsys, "walk", "invorbit", "--group", "z:1",
                              "--steps", "2", "--trials", "50", "--seed", "1")
        assert code == 0
        assert json.loads(out)["exactMeanSize"] == "5/2"


class TestFolner:
    def test_fol_value(self, capsys):
        code, out, _err = run(capsys, "folner", "--group", "z:1",
                              "--radius", "6", "--fol", "1")
        assert code == 0
        assert json.loads(out)["fol"] == 3

    def test_anneal_determinism(self, capsys):
        args = ("folner", "--group", "z:1", "--radius", "6",
                "--mode", "anneal", "--seed", "7", "--epsilon", "1/4")
        code1, out1, _ = run(capsys, *args)
        code2, out2, _ = run(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_anneal_needs_seed(self, capsys):
        code, _out, err = run(capsys, "folner", "--group", "z:1",
                              "--radius", "4", "--mode", "anneal")
        assert code == 2
        assert "seed" in err


class TestCogrowth:
    def test_counts_csv(self, capsys):
        code, out, _err = run(capsys, "cogrowth", "counts", "--group", "z:2",
                              "--length", "4", "--format", "csv")
        assert code == 0
        assert out == "0,1\n1,0\n2,0\n3,0\n4,8\n"

    def test_series_residual(self, capsys):
        code, out, _err = run(capsys, "cogrowth", "series", "--group",
                              "zmod:5", "--length", "10")
        assert code == 0
        assert json.loads(out)["maxResidual"] == "0"


class TestCellular:
    def test_step_pattern(self, capsys, tmp_path):
        pattern = {"cells": [{"site": [x, y], "value": 1 if (x, y) in
                              {(1, 2), (2, 2), (3, 2)} else 0}
                             for x in range(5) for y in range(5)]}
        path = tmp_path / "blinker.json"
        path.write_text(json.dumps(pattern))
        code, out, _err = run(capsys, "ca", "step", "--rule", "life",
                              "--pattern", str(path))
        assert code == 0
        alive = {tuple(c["site"]) for c in json.loads(out)["cells"]
                 if c["value"] == 1}
        assert alive == {(2, 1), (2, 2), (2, 3)}

    def test_goe_and(self, capsys):
        code, out, _err = run(capsys, "ca", "goe", "--rule", "and:z",
                              "--radius", "1")
        assert code == 0
        assert json.loads(out)["found"]

    def test_mep_life(self, capsys):
        code, out, _err = run(capsys, "ca", "mep", "--rule", "life",
                              "--radius", "0")
        assert code == 0
        assert json.loads(out)["found"]

    def test_budget_exit_code(self, capsys):
        code, _out, err = run(capsys, "ca", "goe", "--rule", "life",
                              "--radius", "3", "--budget", "100")
        assert code == 3
        assert "cap" in err

    def test_unknown_rule(self, capsys):
        code, _out, err = run(capsys, "ca", "goe", "--rule", "nope")
        assert code == 2


class TestParadox:
    def test_verify(self, capsys):
        code, out, _err = run(capsys, "paradox", "verify", "--radius", "3")
        assert code == 0
        assert json.loads(out)["passed"]

    def test_map_and_preimages(self, capsys):
        code, out, _err = run(capsys, "paradox", "preimages",
                              "--word", "1", "--radius", "3")
        assert code == 0
        assert json.loads(out)["preimages"] == ["1", "x1^-1"]


class TestTopfull:
    def test_language(self, capsys):
        code, out, _err = run(capsys, "topfull", "language", "--length", "2")
        assert code == 0
        assert json.loads(out)["factors"]["2"] == ["00", "01", "10"]

    def test_search(self, capsys):
        code, out, _err = run(capsys, "topfull", "search", "--length", "3")
        assert code == 0
        payload = json.loads(out)
        assert payload["found"] and payload["bijective"]


class TestGraph:
    def test_json_output(self, capsys):
        code, out, _err = run(capsys, "graph", "--group", "z:1",
                              "--radius", "2")
        assert code == 0
        assert len(json.loads(out)["vertices"]) == 5

    def test_vertex_cap_exit_code(self, capsys):
        code, _out, err = run(capsys, "graph", "--group", "free:2",
                              "--radius", "8", "--cap-vertices", "50")
        assert code == 3

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "ball.json"
        code, out, _err = run(capsys, "graph", "--group", "z:1",
                              "--radius", "1", "--out", str(path))
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["radius"] == 1
