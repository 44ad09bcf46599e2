import json

import pytest

from nctheta.cli import main

JACOBI_1 = 1.08643481121330801


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def ok_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestEval:
    def test_theta(self, capsys):
        d = ok_json(capsys, "eval", "theta", "--n", "1", "--omega", "[[0,1]]", "--z", "[[0,0]]")
        assert abs(d["value"][0] - JACOBI_1) < 1e-12 and d["value"][1] == 0
        assert d["truncation_radius"] > 0

    def test_e_nc_at_zero_theta(self, capsys):
        common = ["--Aa", "[[1,0],[0,-4]]", "--Ab", "[[2,0],[0,-2]]", "--mu", "0,1",
                  "--z", "[[0.2,0.1],[-0.3,0.05]]"]
        a = ok_json(capsys, "eval", "e-comm", *common)
        b = ok_json(capsys, "eval", "e-nc", "--theta12", "0", *common)
        assert a["value"] == b["value"]

    def test_rational_theta(self, capsys):
        common = ["--Aa", "[[1,0],[0,-4]]", "--Ab", "[[2,0],[0,-2]]", "--z", "[0,0]"]
        a = ok_json(capsys, "eval", "e-nc", "--theta12", "3/10", *common)
        b = ok_json(capsys, "eval", "e-nc", "--theta12", "0.3", *common)
        assert a == b

    @pytest.mark.parametrize("argv,code,err", [
        (["eval", "theta", "--n", "1", "--omega", "[[0,1]", "--z", "[0]"], 2, "parse"),
        (["eval", "theta", "--n", "1", "--omega", "[[0,-1]]", "--z", "[0]"], 3, "not_siegel"),
        (["eval", "e-comm", "--Aa", "[[2]]", "--Ab", "[[1]]", "--z", "[0]"], 3, "not_positive_definite"),
        (["eval", "e-comm", "--Aa", "[[0]]", "--Ab", "[[1,0],[0,1]]", "--z", "[0]"], 2, None),
        (["frobnicate"], 2, "usage"),
    ])
    def test_errors_are_json(self, capsys, argv, code, err):
        got, out, stderr = run(capsys, *argv)
        assert got == code and out == ""
        payload = json.loads(stderr)
        assert set(payload) == {"error", "detail"}
        if err:
            assert payload["error"] == err


class TestStructure:
    def test_det4_family_commutative(self, capsys):
        d = ok_json(capsys, "structure", "--preset", "sec5", "--commutative")
        assert d["shape"] == [2, 2, 9] and len(d["tensor"]) == 36

    def test_n1(self, capsys):
        d = ok_json(capsys, "structure", "--n", "1", "--A", "0,1,3")
        assert abs(d["tensor"]["0|0|0"][0] - 1.0000000130248243) < 1e-15

    def test_incompatible(self, capsys):
        code, _, err = run(capsys, "structure", "--A", "[[[1,0],[0,-4]],[[2,0],[0,-3]],[[4,0],[0,-1]]]",
                           "--theta12", "0.3")
        assert code == 3 and json.loads(err)["error"] == "not_compatible"


class TestVerify:
    @pytest.mark.parametrize("argv", [
        ["addition", "--n", "1", "--A", "0,1,3", "--seed", "7"],
        ["mirror", "--n", "1", "--A", "0,1,3"],
        ["star", "--preset", "sec5", "--theta12", "0.3"],
        ["associativity", "--preset", "n1"],
        ["associativity", "--preset", "sec5"],
        ["dbar", "--samples", "3"],
        ["lemma23", "--n", "1", "--samples", "2"],
        ["twisted", "--n", "1", "--samples", "3"],
        ["curvature", "--modulus", "[[2]]", "--samples", "1"],
    ])
    def test_passes(self, capsys, argv):
        d = ok_json(capsys, "verify", *argv)
        assert d["passed"] is not False

    def test_vacuous_reported(self, capsys):
        d = ok_json(capsys, "verify", "associativity", "--preset", "sec5")
        assert d["status"] == "vacuous"

    def test_failure_exit_code(self, capsys):
        code, out, _ = run(capsys, "verify", "addition", "--n", "1", "--A", "0,1,3", "--tol", "0")
        assert code == 1 and json.loads(out)["passed"] is False

    def test_deterministic(self, capsys):
        argv = ["verify", "addition", "--preset", "sec5", "--seed", "3", "--samples", "4"]
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


class TestQuiver:
    def test_preset(self, capsys, tmp_path):
        dot = tmp_path / "q.dot"
        d = ok_json(capsys, "quiver", "--preset", "sec5", "--dot", str(dot))
        assert sorted(a["weight"] for a in d["arrows"]) == [2, 2, 9]
        assert dot.read_text().startswith("digraph quiver {")

    def test_empty_window(self, capsys):
        d = ok_json(capsys, "quiver", "--det", "-4", "--bound", "1")
        assert d == {"nodes": [], "arrows": []}

    def test_det_one(self, capsys):
        # diag(-1,-1) -> diag(1,1) has a positive-definite difference diag(2,2)
        d = ok_json(capsys, "quiver", "--det", "1", "--bound", "1")
        assert len(d["nodes"]) == 2
        assert d["arrows"] == [{"source": "A1", "target": "A2", "weight": 4}]

    def test_bad_flags(self, capsys):
        assert run(capsys, "quiver")[0] == 2
        assert run(capsys, "quiver", "--preset", "other")[0] == 2
