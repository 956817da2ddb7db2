import csv
import json
import subprocess
import sys

import pytest

from powerseq.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_and_density(capsys):
    code, out, _ = run(capsys, "classify-set", "factshift(1)")
    doc = json.loads(out)
    assert code == 0 and doc["finite"] is False and doc["density"]["value"] == "0"
    code, out, _ = run(capsys, "density", "mult(3)")
    assert json.loads(out)["density"]["value"] == "1/3"


def test_filter_member(capsys):
    code, out, _ = run(capsys, "filter-member", "niceF", "factshift(1)")
    assert code == 0 and json.loads(out)["membership"]["status"] == "member"
    code, out, _ = run(capsys, "filter-member", "niceF", "factshift(1, mult(2))")
    assert json.loads(out)["membership"]["status"] == "nonmember"


def test_converge(capsys):
    code, out, _ = run(capsys, "converge", "1/5", "niceF")
    assert code == 0 and json.loads(out)["verdict"]["status"] == "diverges_exact"
    code, out, _ = run(capsys, "converge", "1/6", "factorial")
    assert json.loads(out)["verdict"]["status"] == "converges_exact"


def test_usage_errors(capsys):
    code, _, err = run(capsys, "classify-set", "explicit[3,1]")
    assert code == 2 and "position 0" in err
    code, _, err = run(capsys, "experiment", "no-such-experiment")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


def test_resource_failure_exit_code(capsys):
    code, _, err = run(capsys, "cover", "--max-order", "6", "--k-max", "2", "--horizon", "1")
    assert code == 1 and "no n below 1" in err


def test_measure_plot_data(capsys, tmp_path):
    code, out, _ = run(capsys, "measure", "factshift(1)", "--m", "3", "--plot-data", str(tmp_path))
    assert code == 0
    rows = list(csv.reader((tmp_path / "measure.csv").open()))
    assert rows[0] == ["m", "constraint", "exact_measure"] and len(rows) == 4
    assert json.loads(out)["exact_sequence"][0] == ["1", "5"]


def test_global_flags_before_subcommand(capsys, tmp_path):
    code, out, err = run(capsys, "--timing", "--threads", "2", "density", "mult(2)")
    assert code == 0 and "elapsed" in err


def test_experiment_list(capsys):
    code, out, _ = run(capsys, "experiment", "--list")
    names = [e["name"] for e in json.loads(out)]
    assert code == 0 and "hadamard-counterexample" in names and names == sorted(names)


def test_experiment_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("POWERSEQ_SEED", "5")
    _, out, _ = run(capsys, "experiment", "o2-half-measure", "--param", "samples=2000")
    assert json.loads(out)["seed"] == 5
    _, out, _ = run(capsys, "experiment", "o2-half-measure", "--param", "samples=2000", "--seed", "7")
    assert json.loads(out)["seed"] == 7
    monkeypatch.setenv("POWERSEQ_SEED", "x")
    code, _, _ = run(capsys, "experiment", "o2-half-measure")
    assert code == 2


def test_experiment_param_override(capsys):
    code, out, _ = run(capsys, "experiment", "hadamard-counterexample", "--param", "q_max=16")
    doc = json.loads(out)
    assert code == 0 and doc["params"]["q_max"] == 16 and doc["passed"]


def test_solenoid_and_cover(capsys):
    code, out, _ = run(capsys, "solenoid-build", "--set", "tail(factorial,1)", "--stages", "4")
    assert code == 0 and json.loads(out)["certificate"]["ok"]
    code, out, _ = run(capsys, "cover", "--max-order", "4", "--k-max", "2")
    assert code == 0 and json.loads(out)["verification"]["ok"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "powerseq", "density", "factorial"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["density"]["value"] == "0"
