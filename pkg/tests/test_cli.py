import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from toricgerbe.cli import main

DATA = Path(__file__).parent / "data"
FAN = str(DATA / "p1_mu3.json")


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(stdin.encode())))
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def report(capsys, *argv, **kw):
    code, out = run(capsys, *argv, **kw)
    return code, json.loads(out)


def test_validate_ok(capsys):
    code, rep = report(capsys, "validate", FAN)
    assert code == 0 and rep["ok"] and rep["outputs"]["valid"]
    assert len(rep["inputs"]["fan"]) == 64


def test_validate_malformed_json(capsys, monkeypatch):
    code, rep = report(capsys, "validate", "-", stdin="{not json", monkeypatch=monkeypatch)
    assert code == 2 and rep["diagnostics"][0]["code"] == "input"


def test_validate_missing_file(capsys):
    code, _ = report(capsys, "validate", "/nonexistent/fan.json")
    assert code == 2


def test_validate_schema_error(capsys, monkeypatch):
    code, _ = report(capsys, "validate", "-", stdin='{"N": {"rank": 1}}', monkeypatch=monkeypatch)
    assert code == 2


def test_validate_out_of_range(capsys, monkeypatch):
    fan = '{"N": {"rank": 1, "torsion": []}, "beta": [[1], [-1]], "cones": [[0], [7]]}'
    code, rep = report(capsys, "validate", "-", stdin=fan, monkeypatch=monkeypatch)
    assert code == 1
    assert rep["diagnostics"][0]["code"] == "index_out_of_range"
    assert "cone 1" in rep["diagnostics"][0]["message"]


def test_strict_flag(capsys, monkeypatch):
    fan = json.dumps({"N": {"rank": 2, "torsion": []}, "beta": [[1, 0], [0, 1], [1, 1], [-1, -1]],
                      "cones": [[0, 1], [0, 2], [3]]})
    code, _ = report(capsys, "validate", "-", stdin=fan, monkeypatch=monkeypatch)
    assert code == 0
    code, rep = report(capsys, "validate", "--strict-fan", "-", stdin=fan, monkeypatch=monkeypatch)
    assert code == 1 and rep["diagnostics"][0]["code"] == "fan_axiom"


def test_present(capsys):
    code, rep = report(capsys, "present", FAN)
    p = rep["outputs"]["presentation"]
    assert code == 0
    assert p["weight_matrix"] == [[3, 3]]
    assert p["mu"] == {"torus_rank": 0, "cyclic_orders": [3]}
    assert p["excluded_codim"] == 2 and p["ideal_generators"] == [[1], [0]]


def test_present_pretty(capsys):
    code, out = run(capsys, "present", "--pretty", FAN)
    assert code == 0
    assert "λ·(z1,z2) = (λ^3 z1, λ^3 z2)" in out
    assert "ℤ ⊕ ℤ/3" in out and "1-based" in out


def test_gerbe_and_round_trip(capsys, tmp_path):
    out = tmp_path / "gerbe.json"
    code, rep = report(capsys, "gerbe", FAN, str(DATA / "ext_mult2.json"), "--out", str(out))
    assert code == 0
    assert rep["outputs"]["stacky_fan"]["N"] == {"rank": 1, "torsion": [6]}
    assert rep["outputs"]["presentation"]["weight_matrix"] == [[6, 6]]
    assert rep["outputs"]["kernel_sequence"]["ker_alpha_order"] == 6
    code, _ = report(capsys, "validate", str(out))
    assert code == 0
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["rigidify", FAN, "--out", str(r1)]) == 0
    assert main(["rigidify", str(out), "--out", str(r2)]) == 0
    capsys.readouterr()
    assert r1.read_bytes() == r2.read_bytes()
    assert json.loads(r1.read_text()) == {"N": {"rank": 1, "torsion": []}, "beta": [[1], [-1]],
                                          "cones": [[0], [1]]}


def test_gerbe_split_writes_display_form(capsys, tmp_path):
    out = tmp_path / "split.json"
    code, _ = report(capsys, "gerbe", FAN, str(DATA / "ext_split.json"), "--out", str(out))
    assert code == 0
    fan = json.loads(out.read_text())
    assert fan["N"] == {"rank": 1, "torsion": [3, 2]}
    assert fan["beta"] == [[1, 0, 0], [-1, 1, 0]]


def test_gerbe_non_injective(capsys):
    code, rep = report(capsys, "gerbe", FAN, str(DATA / "ext_zero.json"))
    assert code == 1 and rep["diagnostics"][0]["code"] == "not_injective"


def test_gerbe_source_mismatch(capsys, monkeypatch):
    ext = '{"target": {"rank": 1, "torsion": []}, "matrix": [[1, 1]]}'
    code, rep = report(capsys, "gerbe", FAN, "-", stdin=ext, monkeypatch=monkeypatch)
    assert code == 1 and rep["diagnostics"][0]["code"] == "source_mismatch"


def test_present_reduced_and_mu(capsys, tmp_path):
    red = tmp_path / "red.json"
    main(["rigidify", FAN, "--out", str(red)])
    capsys.readouterr()
    code, rep = report(capsys, "present", str(red))
    assert rep["outputs"]["presentation"]["weight_matrix"] == [[1, 1]]
    assert rep["outputs"]["presentation"]["mu_order"] == 1
    code, rep = report(capsys, "mu", FAN)
    assert code == 0 and rep["outputs"]["mu_order"] == 3


def test_gale_dual_command(capsys):
    code, rep = report(capsys, "gale-dual", FAN)
    assert code == 0
    assert rep["outputs"]["gale_dual"]["beta_vee"] == [[3, 3]]
    assert rep["outputs"]["sequences"]["ok"]


def test_lemma(capsys):
    code, rep = report(capsys, "lemma", FAN, "--coeff", "2")
    assert code == 0 and rep["outputs"]["lemma"]["pass"] is True
    code, rep = report(capsys, "lemma", str(DATA / "p2.json"), "--coeff", "6")
    assert code == 0 and rep["outputs"]["lemma"]["codim_V"] == 3


def test_lemma_size_bound(capsys, monkeypatch):
    fan = json.dumps({"N": {"rank": 1, "torsion": []}, "beta": [[1]] * 10 + [[-1]] * 10,
                      "cones": [[i] for i in range(20)]})
    code, rep = report(capsys, "lemma", "-", stdin=fan, monkeypatch=monkeypatch)
    assert code == 1 and rep["diagnostics"][0]["code"] == "size_bound"


def test_lemma_bad_coeff():
    with pytest.raises(SystemExit) as err:
        main(["lemma", FAN, "--coeff", "1"])
    assert err.value.code == 2


@pytest.mark.parametrize("matrix,diag", [("[[3,3]]", [3]), ("[[2,0],[0,3]]", [1, 6]), ("[]", [])])
def test_snf(capsys, monkeypatch, matrix, diag):
    code, rep = report(capsys, "snf", "-", stdin=matrix, monkeypatch=monkeypatch)
    assert code == 0 and rep["outputs"]["diagonal"] == diag


def test_snf_parse_error(capsys, monkeypatch):
    code, _ = report(capsys, "snf", "-", stdin="[[1,2],[3]]", monkeypatch=monkeypatch)
    assert code == 2
    code, _ = report(capsys, "snf", "-", stdin='[["a"]]', monkeypatch=monkeypatch)
    assert code == 2


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


@pytest.mark.parametrize("argv", [
    ["present", FAN], ["gerbe", FAN, str(DATA / "ext_split.json")], ["lemma", FAN, "--coeff", "2,3"],
    ["present", "--pretty", FAN],
])
def test_byte_identical_reruns(capsys, argv):
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "toricgerbe", "present", FAN],
                          capture_output=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outputs"]["presentation"]["weight_matrix"] == [[3, 3]]
