import csv
import io
import json
import subprocess
import sys

import pytest

from ordered_turan.cli import SweepSpec, main, parse_range
from ordered_turan.core import OrderedHypergraph, ParameterError
from ordered_turan.labeling import Labeling, cost, odd_construction
from ordered_turan.lp import EdgeWeighting


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_transversal(capsys):
    code, out, _ = run(capsys, "construct", "transversal", "--n", "6", "--r", "3", "--s", "5")
    assert code == 0
    payload = json.loads(out)
    g = OrderedHypergraph.from_dict(payload["hypergraph"])
    assert len(g) == 2 and g.edges == {(1, 2, 3), (4, 5, 6)}
    assert all(c["verified"] for c in payload["certificates"])


def test_exact_f(capsys):
    code, out, _ = run(capsys, "exact", "f", "--n", "4", "--k", "2")
    assert code == 0
    d = json.loads(out)
    assert d["value"] == 3 and d["status"] == "optimal"


def test_exact_tau_pattern_flag(capsys):
    code, out, _ = run(capsys, "exact", "tau", "--n", "6", "--pattern", "natural:3:4")
    assert code == 0 and json.loads(out)["value"] == 7


def test_sweep_grid_order(capsys, caplog):
    code, out, _ = run(capsys, "sweep", "--grid", "n=4..8:2,r=3,s=4..5", "--quantity", "tau,nu,lp")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["n"], r["s"]) for r in rows] == [("4", "4"), ("6", "4"), ("6", "5"), ("8", "4"), ("8", "5")]
    assert all(r["tau"] == r["nu"] == r["lp"] for r in rows)
    assert any("skipping {'n': 4, 'r': 3, 's': 5}" in m for m in caplog.messages)


@pytest.mark.slow
def test_sweep_documented_grid(tmp_path, capsys):
    code, _, _ = run(capsys, "--out", str(tmp_path), "sweep", "--grid", "n=4..10:2,r=3,s=4..5",
                     "--quantity", "tau,nu,lp")
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "sweep.csv").open()))
    # n=4, s=5 has no copies on 4 vertices and is skipped
    assert len(rows) == 7 and all(r["tau"] == r["nu"] == r["lp"] for r in rows)
    skipped = json.loads((tmp_path / "sweep_skipped.json").read_text())
    assert skipped[0]["point"] == {"n": 4, "r": 3, "s": 5}


def test_sweep_workers_keep_order(tmp_path, capsys):
    args = ["sweep", "--grid", "n=4..8,r=2,s=3", "--quantity", "construct,verify,lp"]
    _, serial, _ = run(capsys, *args)
    _, pooled, _ = run(capsys, *args, "--workers", "3")
    assert serial == pooled
    rows = list(csv.DictReader(io.StringIO(serial)))
    assert [r["n"] for r in rows] == ["4", "6", "8"]
    assert all(r["transversal"] == r["packing"] == r["expected"] for r in rows)
    assert all(r["transversal_ok"] == "True" for r in rows)


def test_sweep_labels(capsys):
    code, out, _ = run(capsys, "sweep", "--grid", "n=4..6,k=2..3", "--quantity", "f,label-density")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    first = rows[0]
    assert first["f"] == "3" and first["bad"] == "1" and first["construction"] == "even"


def test_grid_parsing():
    spec = SweepSpec.parse("n=4..10:2,r=3,s=4..5", "tau")
    assert spec.grid == {"n": [4, 6, 8, 10], "r": [3], "s": [4, 5]}
    assert len(spec.points) == 8 and spec.points[1] == {"n": 4, "r": 3, "s": 5}
    assert parse_range("1;5..7") == [1, 5, 6, 7]
    with pytest.raises(ParameterError):
        SweepSpec.parse("q=1", "tau")
    with pytest.raises(ParameterError):
        SweepSpec.parse("n=4", "bogus")


def test_label_files_round_trip(tmp_path, capsys):
    code, _, _ = run(capsys, "label", "odd", "--n", "9", "--k", "3", "--out", str(tmp_path))
    assert code == 0
    phi = Labeling.from_files((tmp_path / "odd_n9_k3.csv").read_text(), (tmp_path / "odd_n9_k3.json").read_text())
    assert phi == odd_construction(9, 3)
    code, out, _ = run(capsys, "label", "cost", "--input", str(tmp_path / "odd_n9_k3.csv"),
                       "--sidecar", str(tmp_path / "odd_n9_k3.json"))
    assert json.loads(out)["bad"] == cost(phi)[1]


def test_label_density(capsys):
    code, out, _ = run(capsys, "label", "density", "--k", "3", "--ns", "120")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["limit"] == "1/4" and abs(float(rows[0]["bad_fraction_float"]) - 0.2436) < 5e-4


def test_weights_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "construct", "weights", "--n", "8", "--r", "2", "--s", "4")
    assert code == 0
    path = tmp_path / "w.json"
    path.write_text(out)
    w = EdgeWeighting.from_dict(json.loads(out)["weights"])
    assert w.total() == 6
    code, out, _ = run(capsys, "verify", "weights", "--input", str(path), "--pattern", "natural:2:4")
    assert code == 0 and json.loads(out)["verified"]


def test_verify_detects_bad_transversal(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(OrderedHypergraph.from_edges(6, 3, [(1, 2, 3)]).to_json())
    code, out, err = run(capsys, "verify", "transversal", "--input", str(path), "--r", "3", "--s", "5")
    assert code == 1
    assert json.loads(out)["counterexample"] == [1, 2, 4, 5, 6]
    assert json.loads(err)["error"]["type"] == "check-failed"


def test_lp_outputs(capsys):
    code, out, _ = run(capsys, "lp", "--n", "8", "--r", "2", "--s", "4")
    assert code == 0 and json.loads(out)["value"] == "6"
    code, out, _ = run(capsys, "lp", "--n", "6", "--pattern", "natural:3:5", "--format", "lp")
    assert code == 0 and out.count(">= 1") == 6


@pytest.mark.parametrize("argv,needle", [
    (["construct", "transversal", "--n", "7", "--r", "3", "--s", "4"], "even"),
    (["exact", "tau", "--n", "6", "--pattern", "loose:3:3"], "loose path"),
    (["label", "density", "--construction", "odd", "--k", "2", "--ns", "10"], "odd"),
    (["reproduce", "12"], "criterion"),
])
def test_precondition_errors(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == 2
    msg = json.loads(err)["error"]
    assert needle in msg["message"]


def test_budget_exit_code(capsys):
    code, out, err = run(capsys, "exact", "nu", "--n", "10", "--r", "3", "--s", "4", "--node-limit", "5")
    assert code == 3
    assert json.loads(out)["status"] == "bounded"
    assert json.loads(err)["error"]["type"] == "budget"


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_reproduce_writes_artifacts(tmp_path, capsys):
    code, out, _ = run(capsys, "reproduce", "2", "--out", str(tmp_path))
    assert code == 0 and "[PASS] criterion 2" in out
    d = json.loads((tmp_path / "criterion_2.json").read_text())
    assert d["passed"] and {r["tau"] for r in d["rows"]} == {7, 2}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ordered_turan", "exact", "f", "--n", "4", "--k", "2"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["value"] == 3
