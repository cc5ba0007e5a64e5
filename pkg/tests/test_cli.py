import csv
import hashlib
import json
import math
import subprocess
import sys

import pytest

from fracscrew.cli import fmt, main, to_json


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    manifest = json.loads((tmp_path / (name + ".manifest.json")).read_text())
    return code, out, manifest


def test_no_command_prints_usage(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_option_exits_nonzero(capsys):
    assert main(["minimize1d", "--bogus"]) != 0


def test_validate_quartic(tmp_path):
    code, out, man = run(tmp_path, "validate")
    data = json.loads(out.read_text())
    assert code == 0 and data["valid"] and data["lambda_star"] == pytest.approx(math.pi)
    assert man["subcommand"] == "validate"
    assert man["outputs"][str(out)] == hashlib.sha256(out.read_bytes()).hexdigest()


def test_specfun_table(tmp_path):
    code, out, man = run(tmp_path, "specfun", "--what", "phi2", "--y", "0.5,1,2")
    rows = list(csv.reader(out.read_text().splitlines()))
    assert code == 0 and rows[0] == ["y", "phi2"]
    assert float(rows[2][1]) == pytest.approx(math.exp(-1), rel=1e-14)
    assert man["parameters"]["c_alpha"] == pytest.approx(1.0)
    assert main(["specfun", "--what", "nope", "--out", str(tmp_path / "x")]) == 1


def test_specfun_profile_grid(tmp_path):
    code, out, _ = run(tmp_path, "specfun", "--alpha", "0.5", "--ymax", "2", "--step", "0.5")
    rows = list(csv.reader(out.read_text().splitlines()))
    assert code == 0 and rows[0] == ["y", "phi1", "phi2", "residual"]
    y = [float(r[0]) for r in rows[1:]]
    assert y == [0.5, 1.0, 1.5, 2.0]
    assert float(rows[2][2]) == pytest.approx(math.exp(-1), rel=1e-14)
    assert max(abs(float(r[3])) for r in rows[1:]) < 1e-8
    assert main(["specfun", "--ymax", "1", "--step", "0", "--out", str(tmp_path / "x")]) == 1


def test_extend1d_from_modes_file(tmp_path):
    modes = tmp_path / "modes.csv"
    modes.write_text("# k,a\n1,1.0\n2,0.0\n")
    code, out, _ = run(tmp_path, "extend1d", "--modes", str(modes), "--heights", "0,1", "--ns", "4", "--lambda", "3.0")
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert code == 0 and len(rows) == 10
    mid = [r for r in rows if float(r["s"]) == 1.5 and float(r["y"]) == 1.0][0]
    assert float(mid["v"]) == pytest.approx(math.sqrt(2 / 3) * math.exp(-math.pi / 3), rel=1e-12)


def test_minimize1d_end_to_end(tmp_path):
    code, out, man = run(tmp_path, "minimize1d", "--lambda", "4", "--ns", "32", "--ny", "32")
    res = man["parameters"]["result"]
    assert code == 0
    assert res["sup"] > 0.1 and res["energy"] < res["trivial_energy"]
    assert abs(res["identity"]) <= 10 * res["residual"] + 1e-14
    assert man["tolerances"]["residual"] == 1e-8
    assert len(out.read_text().splitlines()) == 1 + 33 * 33


def test_nonconvergence_exit_code(tmp_path, capsys):
    code, _, _ = run(tmp_path, "minimize1d", "--lambda", "4", "--ns", "32", "--ny", "32", "--max-iter", "1",
                     "--tol", "1e-14")
    assert code == 2
    assert "no convergence" in capsys.readouterr().err


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nlambda = 2.5\nns = 16\nny = 16\n")
    _, _, man = run(tmp_path, "minimize1d", "--config", str(cfg), name="a")
    assert man["parameters"]["lam"] == 2.5 and man["parameters"]["ns"] == 16
    assert man["parameters"]["result"]["sup"] < 1e-3
    _, _, man = run(tmp_path, "minimize1d", "--config", str(cfg), "--lambda", "4", name="b")
    assert man["parameters"]["lam"] == 4.0 and man["parameters"]["ns"] == 16
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["minimize1d", "--config", str(bad)]) == 1


def test_runs_are_deterministic(tmp_path):
    argv = ("minimize1d", "--lambda", "4", "--ns", "16", "--ny", "16")
    _, out1, m1 = run(tmp_path, *argv, name="one")
    _, out2, m2 = run(tmp_path, *argv, name="two")
    assert out1.read_bytes() == out2.read_bytes()
    for m in (m1, m2):
        m.pop("wall_time")
        m.pop("outputs")
        m["parameters"].pop("out")
    assert m1 == m2


def test_threshold_csv(tmp_path):
    code, out, man = run(tmp_path, "threshold", "--ns", "24", "--ny", "24", "--steps", "4",
                         "--lambda-min", "2.5", "--lambda-max", "4.0")
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert code == 0 and len(rows) == 4
    assert float(rows[0]["sup"]) < 1e-3 < float(rows[-1]["sup"])
    assert man["parameters"]["result"]["bracket"] is not None


def test_minimize3d_small(tmp_path):
    code, _, man = run(tmp_path, "minimize3d", "--nr", "16", "--ns", "12", "--ny", "16")
    res = man["parameters"]["result"]
    assert code == 0 and res["sup"] > 0.1 and "decay_rate" in res


def test_barrier_and_control(tmp_path):
    code, out, _ = run(tmp_path, "barrier", "--lambda", str(math.pi), "--n", "16")
    rep = json.loads(out.read_text())
    assert code == 0 and rep["ok"] and rep["max_operator"] <= 1e-10
    assert main(["barrier", "--C", "2", "--out", str(tmp_path / "c")]) == 1
    code, out, _ = run(tmp_path, "barrier", "--C", "2", "--allow-small-C", "--n", "16", name="ctl")
    assert code == 0 and json.loads(out.read_text())["axis_sign_condition"] is False


def test_competitor_table(tmp_path):
    code, out, _ = run(tmp_path, "competitor", "--ns", "24", "--ny", "32", "--R-list", "10,20")
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert code == 0 and [float(r["R"]) for r in rows] == [10.0, 20.0]
    assert float(rows[1]["excess_over_R2"]) < float(rows[0]["excess_over_R2"])


def test_nmc_symmetrized_and_ball(tmp_path):
    code, out, _ = run(tmp_path, "nmc", "--symmetrized", "--alpha", "0.25")
    assert code == 0 and abs(json.loads(out.read_text())["value"]) <= 1e-12
    code, out, _ = run(tmp_path, "nmc", "--shape", "ball", "--alpha", "0.25", "--rmax", "40", name="ball")
    assert code == 0 and json.loads(out.read_text())["value"] < 0
    assert main(["nmc", "--shape", "ball", "--symmetrized", "--out", str(tmp_path / "z")]) == 1


def test_perimeter_ball(tmp_path):
    code, out, _ = run(tmp_path, "perimeter", "--shape", "ball", "--radius", "0.3", "--alpha", "0.25")
    assert code == 0 and json.loads(out.read_text())["value"] > 0


def test_manifest_on_stderr_without_out(capsys):
    assert main(["specfun", "--y", "1"]) == 0
    cap = capsys.readouterr()
    assert cap.out.startswith("y,phi2")
    assert json.loads(cap.err)["outputs"]["<stdout>"]


def test_entry_point_subprocess():
    res = subprocess.run([sys.executable, "-m", "fracscrew.cli", "validate", "--potential", "family=quartic c=1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["lambda_star"] == pytest.approx(math.pi / 4)


def test_formatting_helpers():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(True) == "true" and fmt(3) == "3" and fmt(float("-inf")) == "-inf"
    text = to_json({"a": [1.0, 2], "b": {"c": None}})
    assert json.loads(text) == {"a": [1.0, 2], "b": {"c": None}}
