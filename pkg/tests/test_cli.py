import json
import subprocess
import sys

import pytest

from vdcgreedy.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_generate_example(capsys):
    js = run_json(capsys, "generate", "--kernel", "logsin", "--n", "11", "--policy", "smallest")
    exact = [p["value_exact"] for p in js["points"]]
    assert exact[10] == "5/16"
    assert js["next_candidates_exact"] == ["13/16"]
    assert js["steps"][-1]["candidates_exact"] == ["5/16", "13/16"]


def test_vdc_example(capsys):
    js = run_json(capsys, "vdc", "--base", "2", "--n", "8")
    assert [p["value_exact"] for p in js["points"]] == \
        ["0/1", "1/2", "1/4", "3/4", "1/8", "5/8", "3/8", "7/8"]
    js = run_json(capsys, "vdc", "--n", "23")
    assert js["points"][22]["value_exact"] == "13/32"


def test_family_examples(capsys):
    assert run_json(capsys, "family", "--m", "2", "--enumerate")["members"] == ["0,2,1,3", "0,2,3,1"]
    assert run_json(capsys, "family", "--m", "4", "--count")["count"] == 2048
    assert run_json(capsys, "family", "--member", "0,2,3,1")["member"] is True
    assert run_json(capsys, "family", "--member", "0,1,2,3")["member"] is False
    code, out, _ = run(capsys, "family", "--m", "2", "--enumerate", "--format", "csv")
    assert out == "0,2,1,3\n0,2,3,1\n"


def test_discrepancy_methods_agree(capsys):
    geo = run_json(capsys, "discrepancy", "--vdc", "22")
    fau = run_json(capsys, "discrepancy", "--method", "faure", "--n", "22")
    assert geo["d"] == fau["d"]
    assert fau["method"] == "faure-series"
    table = run_json(capsys, "discrepancy", "--method", "faure", "--n", "3", "--table")
    assert [r["d"] for r in table["rows"]] == ["1/1", "1/2", "1/2"]


def test_psi_and_alpha(capsys):
    js = run_json(capsys, "psi", "--base", "2")
    assert js["psi"] == {"breakpoints": ["0/1", "1/2", "1/1"], "values": ["0/1", "1/2", "0/1"]}
    assert js["off_grid_local_maxima"] == []
    code, out, _ = run(capsys, "psi", "--base", "2", "--format", "csv", "--resolution", "4")
    assert out.splitlines()[0] == "x,psi_plus,psi_minus,psi" and len(out.splitlines()) == 6
    rows = run_json(capsys, "alpha", "--m-max", "4")["rows"]
    assert rows[0]["value"] == "1/2" and len(rows) == 4


def test_bound_and_energy(capsys):
    js = run_json(capsys, "bound", "--seed", "0,1/4,1/2,3/4")
    assert js["bound"] >= js["discrepancy"] == 0.25
    js = run_json(capsys, "energy", "--vdc", "16")
    assert js["lemma_holds"] is True


def test_verify_passing_and_failing_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "vdc", "--kernel", "bernoulli2", "--n", "32")
    assert code == 0 and json.loads(out)["passed"] is True
    # the one-sided family values are not invariant, so this suite reports a failure
    code, out, _ = run(capsys, "verify", "--suite", "family", "--m", "2", "--n", "16", "--workers", "1")
    js = json.loads(out)
    assert code == 2 and js["passed"] is False
    assert js["checks"][0]["details"]["violation_counts"]["d"] == 0


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["generate", "--n", "4", "--kernel", "power:1"],
    ["generate", "--n", "4", "--policy", "index:x"],
    ["vdc", "--sigma", "0,0,1"],
    ["vdc", "--base", "4", "--sigma", "0,1"],
    ["discrepancy", "--points", "/nonexistent/points.txt"],
    ["discrepancy", "--seed", "0,abc"],
    ["energy", "--kernel", "logsin", "--vdc", "4"],
])
def test_invalid_input_exits_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 1


def test_output_is_byte_identical(capsys, tmp_path):
    args = ["generate", "--n", "40", "--policy", "random:5", "--kernel", "bernoulli2"]
    a = run(capsys, *args)[1]
    b = run(capsys, *args)[1]
    assert a == b
    fam = ["verify", "--suite", "family", "--m", "3", "--n", "32"]
    one = run(capsys, *fam, "--workers", "1")[1]
    two = run(capsys, *fam, "--workers", "2")[1]
    assert one == two


def test_csv_round_trip(capsys, tmp_path):
    path = tmp_path / "pts.csv"
    assert main(["-o", str(path), "generate", "--n", "24", "--format", "csv"]) == 0
    capsys.readouterr()
    direct = run_json(capsys, "discrepancy", "--vdc", "24")
    via_file = run_json(capsys, "discrepancy", "--points", str(path))
    assert via_file == direct
    plain = tmp_path / "plain.txt"
    plain.write_text("0\n1/2\n1/4\n")
    assert run_json(capsys, "discrepancy", "--points", str(plain))["d"] == "1/2"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "vdcgreedy", "vdc", "--n", "2"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["points"][1]["value_exact"] == "1/2"
