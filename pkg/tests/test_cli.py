import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

import majorsphere.configurations as cf
from majorsphere import pointfile
from majorsphere.cli import run
from majorsphere.optimize import S0


def cli(*argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def cli_json(*argv, **kw):
    code, text, err = cli(*argv, "--json", **kw)
    assert code == 0, err
    return json.loads(text)


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, X in {
        "p5": cf.polygon(5), "tet": cf.regular_simplex(3), "cross3": cf.cross_polytope(3),
        "c24": cf.cell24(), "l8": cf.lambda_n(8), "prod": cf.simplex_product([2, 2]),
    }.items():
        paths[name] = str(tmp_path / f"{name}.txt")
        pointfile.save(X, paths[name])
    return paths


class TestGen:
    def test_round_trip(self):
        code, text, _ = cli("gen", "lambda-n", "--n", "8")
        assert code == 0
        np.testing.assert_array_equal(pointfile.loads(text).points, cf.lambda_n(8).points)

    def test_output_file(self, tmp_path):
        path = tmp_path / "x.txt"
        assert cli("gen", "delta-tetra", "--a", "0", "--theta", "1.5707963267948966", "-o", str(path))[0] == 0
        assert pointfile.load(path).m == 4

    def test_dims(self):
        code, text, _ = cli("gen", "simplex-product", "--dims", "1,3")
        assert pointfile.loads(text).m == 6

    def test_errors(self):
        assert cli("gen", "polygon")[0] == 1
        assert cli("gen", "nonsense", "--m", "3")[0] == 1


class TestQueries:
    def test_profile(self, files):
        rec = cli_json("profile", files["tet"], "--rho", "r2")
        np.testing.assert_allclose(rec["values"], 8 / 3, atol=1e-14)
        code, text, _ = cli("profile", files["tet"], "--rho", "r2")
        rows = [line.split() for line in text.splitlines() if not line.startswith("#")]
        assert [r[0] for r in rows] == ["2.66666666666667"] * 6

    def test_compare(self, files, tmp_path):
        other = tmp_path / "o.txt"
        pointfile.save(cf.circle_points([0, 0.3, 1.0, 2.0, 4.0]), other)
        assert cli("compare", files["p5"], str(other), "--rho", "phi")[1].strip() == "DOMINATES"
        assert cli("compare", str(other), files["p5"], "--rho", "phi")[1].strip() == "DOMINATED"
        assert cli_json("compare", files["p5"], files["p5"], "--rho", "r")["order"] == "EQUAL"

    def test_compare_size_mismatch(self, files):
        assert cli("compare", files["p5"], files["tet"], "--rho", "r")[0] == 1

    def test_energy(self, files):
        assert cli_json("energy", files["tet"], "--t", "1")["energy"] == pytest.approx(6 / math.sqrt(8 / 3))
        rec = cli_json("energy", files["tet"], "--rho", "r2", "--potential", "riesz2:1")
        assert rec["energy"] == pytest.approx(6 / math.sqrt(8 / 3))

    def test_bounds(self):
        assert cli_json("extremal-seq", "--T", "1,3,4")["Y"] == [1, 1.5, 1.5]
        assert cli_json("lower-bound", "--T", "1,3,4", "--potential", "inv:1")["bound"] == pytest.approx(7 / 3)
        assert cli_json("simplex-bound", "--m", "6", "--potential", "riesz2:2")["bound"] == pytest.approx(6.25)
        assert cli("extremal-seq", "--T", "3,1")[0] == 1

    def test_negative_list_values(self):
        assert cli_json("extremal-seq", "--T", "-2,-1,0")["Y"] == [-2, 1, 1]

    def test_gegenbauer(self):
        rec = cli_json("gegenbauer", "--n", "5", "--f", "0,1,1")
        assert rec["exact"] == ["1/5", "1", "4/5"]
        assert cli_json("gegenbauer", "--n", "4", "--k", "2", "--t", "0.5")["value"] == pytest.approx(0.0)

    def test_moments(self, files):
        rec = cli_json("moments", files["c24"], "--kmax", "6")
        assert rec["moments"][0] == 576
        assert max(abs(v) for v in rec["moments"][1:6]) < 1e-9

    def test_design_check(self, files):
        assert cli_json("design-check", files["cross3"], "--f", "0,1,1")["passed"] is True
        rec = cli_json("design-check", files["c24"], "--f", "0,-1/4,-1/4,1,1")
        assert rec["passed"] is True and rec["coefficients"][0] == pytest.approx(1 / 16, abs=1e-12)
        assert cli_json("design-check", files["c24"], "--tau", "5")["passed"] is True
        assert cli_json("design-check", files["c24"], "--tau", "6")["passed"] is False
        assert cli_json("design-check", files["cross3"], "--harmonic-index", "1,2,3")["passed"] is True

    def test_delsarte(self):
        rec = cli_json("delsarte", "--f", "0,1,1", "--n", "3", "--T", "-1,0")
        assert rec["bound"] == pytest.approx(6) and rec["hypotheses_ok"]
        assert cli("delsarte", "--f", "-1,0,1", "--n", "3", "--T", "0")[0] == 1

    def test_two_distance(self, files):
        rec = cli_json("two-distance", files["l8"])
        assert rec["a"] == pytest.approx(5 / 14) and rec["meets_absolute"] is True

    def test_decompose(self, files):
        rec = cli_json("decompose", files["prod"])
        assert rec["is_valid"] is True and sorted(rec["dims"]) == [2, 2]

    def test_root51(self):
        assert cli_json("root51", "--s", repr(S0))["t_s"] == -1.0
        assert cli_json("root51", "--s", "4")["t_s"] == -0.5
        rec = cli_json("root51", "--s", "3.5")
        assert -1 < rec["t_s"] < -0.5 and abs(rec["residual"]) < 1e-10
        code, _, err = cli("root51", "--s", "2")
        assert code == 1 and "s_0" in err

    def test_classify(self):
        assert cli_json("classify-triangles", "--s", "1")["case"] == 1
        assert cli_json("classify-triangles", "--s", "3")["case"] == 2
        assert cli_json("classify-triangles", "--s", "4")["case"] == 3


class TestSearch:
    def test_minimize_seed_determinism(self):
        a = cli("minimize", "--n", "3", "--m", "5", "--t", "1", "--restarts", "3", "--seed", "7")
        b = cli("minimize", "--n", "3", "--m", "5", "--t", "1", "--restarts", "3", "--seed", "7", "--workers", "3")
        assert a[0] == 0 and a[1] == b[1]
        X = pointfile.loads(a[1])
        assert X.m == 5 and "# energy=" in a[1]

    def test_minimize_output(self, tmp_path):
        path = tmp_path / "min.txt"
        code, text, _ = cli("minimize", "--n", "3", "--m", "4", "--t", "1", "--restarts", "2", "-o", str(path))
        assert code == 0 and text.startswith("energy=")
        assert pointfile.load(path).m == 4

    def test_falsify(self, files, tmp_path):
        rec = cli_json("falsify", files["p5"], "--rho", "phi", "--trials", "200")
        assert rec["found"] is False
        bent = tmp_path / "bent.txt"
        ang = 2 * np.pi * np.arange(5) / 5
        ang[0] += 0.1
        pointfile.save(cf.circle_points(ang), bent)
        wit = tmp_path / "w.txt"
        rec = cli_json("falsify", str(bent), "--rho", "phi", "--trials", "1000", "-o", str(wit))
        assert rec["found"] is True and rec["witness_order"] == "DOMINATES"
        assert cli("compare", str(wit), str(bent), "--rho", "phi")[1].strip() == "DOMINATES"


class TestContract:
    def test_usage_errors_exit_2(self, capsys):
        assert cli()[0] == 2
        assert cli("energy", "-", "--t")[0] == 2
        assert cli("root51", "--s", "x")[0] == 2
        assert cli("minimize", "--n", "3", "--m", "4", "--t", "1", "--rest", "2")[0] == 2

    def test_point_file_errors(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("2 2\n1 0\n0 zz\n")
        code, _, err = cli("energy", str(bad))
        assert code == 1 and "line 3, column 3" in err
        off = tmp_path / "off.txt"
        off.write_text("2 2\n1 0\n0 2\n")
        assert cli("energy", str(off))[0] == 1
        assert cli("energy", str(off), "--normalize")[0] == 0

    def test_missing_file(self):
        assert cli("energy", "/nonexistent/file.txt")[0] == 1

    def test_json_round_trip_stable(self, files):
        for argv in (("profile", files["p5"], "--rho", "phi"), ("two-distance", files["l8"]),
                     ("design-check", files["c24"], "--f", "0,-1/4,-1/4,1,1"), ("root51", "--s", "3")):
            text = cli(*argv, "--json")[1]
            assert json.dumps(json.loads(text), indent=2) + "\n" == text

    def test_stdin_pipeline(self, monkeypatch):
        _, gen_text, _ = cli("gen", "regular-simplex", "--n", "3")
        code, text, _ = cli("energy", "-", "--t", "1", stdin=gen_text, monkeypatch=monkeypatch)
        assert code == 0 and float(text) == pytest.approx(6 / math.sqrt(8 / 3), rel=1e-14)
        # the file argument defaults to stdin
        code, text, _ = cli("profile", "--rho", "r2", stdin=gen_text, monkeypatch=monkeypatch)
        values = [line.split()[0] for line in text.splitlines() if not line.startswith("#")]
        assert code == 0 and values == ["2.66666666666667"] * 6

    def test_console_pipeline(self):
        gen = subprocess.run([sys.executable, "-m", "majorsphere", "gen", "24-cell"],
                             capture_output=True, text=True, check=True)
        chk = subprocess.run([sys.executable, "-m", "majorsphere", "design-check", "-", "--tau", "5"],
                             input=gen.stdout, capture_output=True, text=True)
        assert chk.returncode == 0 and "passed=true" in chk.stdout
