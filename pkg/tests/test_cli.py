import csv
import io
import json
import subprocess
import sys

import pytest

from qwalkgates.cli import main
from qwalkgates.graphs import WalkGraph
from qwalkgates.synthesis import Synthesis
from qwalkgates.verify import GateReport


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_help_and_version(capsys):
    assert run(capsys, "--help")[0] == 0
    code, out, _ = run(capsys, "--version")
    assert code == 0 and out.strip()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qwalkgates", "classify", "--chain", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["returns"]["0"]["kind"] == "R0"


def test_walk_csv(capsys):
    code, out, _ = run(capsys, "walk", "--chain", "1", "--start", "0", "--samples", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5 and float(rows[-1]["p_0"]) == pytest.approx(1.0)


def test_walk_json(capsys):
    doc = run_json(capsys, "walk", "--chain", "1", "--start", "0", "--fraction", "0.5",
                   "--format", "json")
    assert doc["schema_version"] == 1 and doc["command"] == "walk"
    assert abs(complex(doc["amplitudes"][1]["re"], doc["amplitudes"][1]["im"])) == pytest.approx(1)


def test_classify(capsys):
    doc = run_json(capsys, "classify", "--chain", "3,8,3")
    assert doc["spectrum"]["parity"] == "AllOdd"
    assert doc["returns"]["0"]["kind"] == "Rpi"


def test_solve_each_family(capsys):
    for fam, extra in [("chain2", []), ("chain3", ["--n", "2"]), ("chain4", ["--n", "5", "--m", "3"]),
                       ("chain5", []), ("fan", ["--k", "3"]), ("square", []),
                       ("square", ["--target", "R0", "--n", "2"])]:
        doc = run_json(capsys, "solve", "--family", fam, *extra)
        (sol,) = doc["solutions"]
        assert sol["residual"] <= 1e-10, fam
        g = WalkGraph.from_dict(sol["graph"])
        assert g.size >= 2


def test_solve_random_reproducible(capsys):
    a = run_json(capsys, "solve", "--family", "chain5", "--random", "--count", "3", "--seed", "7")
    b = run_json(capsys, "solve", "--family", "chain5", "--random", "--count", "3", "--seed", "7")
    assert a == b and len(a["solutions"]) == 3


def test_solve_set_and_direct_chain5(capsys):
    doc = run_json(capsys, "solve", "--family", "chain4", "--n", "3", "--m", "1", "--a", "2")
    assert doc["solutions"][0]["amplitudes"][0]["re"] == pytest.approx(2.0)
    doc = run_json(capsys, "solve", "--family", "chain5", "--a", "2", "--b", "2")
    assert len(doc["solutions"][0]["amplitudes"]) == 4
    code, _, err = run(capsys, "solve", "--family", "chain3", "--set", "bogus=1")
    assert code == 2 and "bogus" in err


def test_exit_codes(capsys):
    # infeasible request
    code, _, err = run(capsys, "solve", "--family", "chain5", "--a", "9", "--b", "1")
    assert code == 1 and err.startswith("infeasible")
    # parity violation is invalid input
    code, _, err = run(capsys, "solve", "--family", "chain4", "--n", "4", "--m", "1")
    assert code == 2 and "parity" in err
    # argparse error
    assert run(capsys, "synth", "--gate", "toffoli")[0] == 2
    assert run(capsys, "verify", "--pulses", "/nonexistent.json")[0] == 2


def test_enumerate(capsys):
    doc = run_json(capsys, "enumerate", "--family", "pythagorean", "--limit", "13")
    assert {"legs": [3, 4], "hypotenuse": 5, "chain3": [6, 8], "n": 5} in doc["rows"]
    doc = run_json(capsys, "enumerate", "--family", "chain4-integer", "--limit", "5")
    assert any("rejected" in r for r in doc["rows"])
    assert {"amplitudes": [3, 8, 3], "n": 9, "m": 1} in doc["rows"]
    doc = run_json(capsys, "enumerate", "--family", "chain3", "--n", "5")
    assert {"a": 6, "b": 8} in doc["rows"]
    assert run(capsys, "enumerate", "--family", "chain3")[0] == 2


@pytest.mark.parametrize("argv", [
    ["--gate", "z"], ["--gate", "swap", "--phi", "0.4"], ["--gate", "hadamard"],
    ["--gate", "cz"], ["--gate", "cz", "--method", "chain"], ["--gate", "cz", "--method", "pi-pulses"],
    ["--gate", "cz-nn"], ["--gate", "ccz"], ["--gate", "ccz", "--method", "single-pulse"],
    ["--gate", "ccz", "--state", "010"],
])
def test_synth_then_verify(tmp_path, capsys, argv):
    path = tmp_path / "s.json"
    assert run(capsys, "synth", *argv, "-o", str(path))[0] == 0
    syn = Synthesis.from_dict(json.loads(path.read_text()))
    assert syn.sequence.pulses
    report = tmp_path / "r.json"
    code, _, err = run(capsys, "verify", "--pulses", str(path), "--strict", "-o", str(report))
    assert code == 0, err
    doc = json.loads(report.read_text())
    assert doc["passed"] and doc["closure"]["passed"]
    assert GateReport.from_dict(doc).dressed_fidelity >= 1 - 1e-9


def test_verify_wrong_target_strict(tmp_path, capsys):
    path = tmp_path / "s.json"
    run(capsys, "synth", "--gate", "cz", "-o", str(path))
    code, out, _ = run(capsys, "verify", "--pulses", str(path), "--target", "cz",
                       "--minus", "00,11", "--strict")
    assert code == 1
    assert json.loads(out)["passed"] is False
    # without --strict a failed check still exits 0
    code, out, _ = run(capsys, "verify", "--pulses", str(path), "--target", "cz", "--minus", "00,11")
    assert code == 0
    # a CZ on another state is the same gate up to Z dressing
    code, out, _ = run(capsys, "verify", "--pulses", str(path), "--target", "cz",
                       "--minus", "00", "--strict")
    assert code == 0 and json.loads(out)["dressing"]


def test_verify_separate_graph(tmp_path, capsys):
    path = tmp_path / "s.json"
    run(capsys, "synth", "--gate", "ccz", "-o", str(path))
    doc = json.loads(path.read_text())
    (tmp_path / "g.json").write_text(json.dumps(doc["graph"]))
    (tmp_path / "p.json").write_text(json.dumps(doc["sequence"]))
    out = run_json(capsys, "verify", "--pulses", str(tmp_path / "p.json"),
                   "--graph", str(tmp_path / "g.json"), "--target", "ccz")
    assert out["passed"]


def test_walk_synthesis_file(tmp_path, capsys):
    path = tmp_path / "s.json"
    run(capsys, "synth", "--gate", "cz", "-o", str(path))
    doc = run_json(capsys, "classify", "--graph", str(path), "--start", "11")
    assert doc["returns"]["11"]["kind"] == "Rpi"
    assert run(capsys, "classify", "--graph", str(path), "--pulse", "3")[0] == 2


def test_pretty_output(capsys):
    code, out, _ = run(capsys, "classify", "--chain", "2", "--format", "pretty")
    assert code == 0 and "parity: AllEven" in out


def test_spectrum(capsys):
    doc = run_json(capsys, "spectrum", "--truncation", "2")
    assert doc["spectrum"]["kind"] == "spectrum"
    code, out, _ = run(capsys, "spectrum", "--truncation", "2", "--format", "csv")
    assert out.startswith("energy,label,overlap")
    doc = run_json(capsys, "spectrum", "--groups", "--truncation", "3")
    assert set(doc["summary"]) == {"group_i_max", "group_ii_min", "group_iii_min"}
    doc = run_json(capsys, "spectrum", "--preset", "four-dot", "--truncation", "2", "--splitting")
    assert doc["translation_splitting"] > 0


def test_spectrum_dimension_cap(capsys, monkeypatch):
    monkeypatch.setenv("QWALKGATES_DIM_CAP", "10")
    code, _, err = run(capsys, "spectrum")
    assert code == 2 and "cap" in err


def test_sweep_writes_manifest(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, _, err = run(capsys, "sweep", "--truncation", "3", "--points", "3", "-o", str(out))
    assert code == 0, err
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 3
    man = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
    assert man["kind"] == "cavity_sweep"
    assert [c["name"] for c in man["columns"]] == list(rows[0])


def test_sweep_three_dot_json(capsys):
    doc = run_json(capsys, "sweep", "--preset", "three-dot", "--truncation", "2",
                   "--values", "10020", "--format", "json")
    assert doc["rows"][0]["omega_c2"] == pytest.approx(9990.0)
