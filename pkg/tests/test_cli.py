import csv
import json

import numpy as np
import pytest

from geomean import cli, io
from geomean.riccati import solve_yayc


def save(tmp_path, name, M, **extra):
    doc = io.matrix_to_json(np.asarray(M))
    doc.update(extra)
    path = tmp_path / name
    io.write_json(doc, path)
    return str(path)


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = cli.dispatch(argv + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


A = np.array([[2.0, 1.0], [1.0, 3.0]]) / 4
C = np.array([[1.0, -0.5], [-0.5, 2.0]]) / 2.5


def test_geomean_writes_y(tmp_path):
    a, c = save(tmp_path, "a.json", A), save(tmp_path, "c.json", C)
    code, doc = run(["geomean", "--a", a, "--c", c, "--t", "0.5"], tmp_path)
    assert code == 0
    assert {"schema_version", "command", "seed", "config", "provenance", "result"} <= set(doc)
    assert doc["config"]["args"]["t"] == 0.5


def test_riccati_matches_module(tmp_path):
    a, c = save(tmp_path, "a.json", A), save(tmp_path, "c.json", C)
    code, doc = run(["riccati", "--a", a, "--c", c], tmp_path)
    assert code == 0
    Y = io.matrix_from_json(doc["result"]["y_plus"] if "y_plus" in doc["result"] else doc["result"]["Y"])
    assert np.linalg.norm(Y - solve_yayc(A, C)) <= 1e-10


def test_exit_codes(tmp_path):
    a = save(tmp_path, "a.json", A)
    assert cli.dispatch(["geomean", "--a", a, "--c", str(tmp_path / "missing.json")]) == 2
    assert cli.dispatch(["no-such-command"]) == 2
    rho = save(tmp_path, "r.json", np.diag([0.6, 0.4]))
    code, _ = run(["renyi", "--rho", rho, "--sigma", rho, "--alpha", "1.0", "--mode", "exact"], tmp_path)
    assert code == 1


def test_newer_schema_refused(tmp_path):
    a = save(tmp_path, "a.json", A, schema_version="99.0")
    c = save(tmp_path, "c.json", C)
    assert cli.dispatch(["geomean", "--a", a, "--c", c]) == 1


def test_fidelity_deterministic(tmp_path):
    r = save(tmp_path, "r.json", np.diag([0.6, 0.4]))
    s = save(tmp_path, "s.json", np.diag([0.7, 0.3]))
    argv = ["fidelity", "--rho", r, "--sigma", s, "--eps", "0.05", "--seed", "3"]
    cli.dispatch(argv + ["--out", str(tmp_path / "f1.json")])
    cli.dispatch(argv + ["--out", str(tmp_path / "f2.json")])
    docs = [json.loads((tmp_path / f).read_text()) for f in ("f1.json", "f2.json")]
    for d in docs:
        d["config"]["args"].pop("out")
    assert json.dumps(docs[0]) == json.dumps(docs[1])
    doc = docs[0]
    assert doc["seed"] == 3
    assert abs(doc["result"]["value"] - (np.sqrt(0.42) + np.sqrt(0.12))) <= 0.05


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("GEOMEAN_SEED", "17")
    r = save(tmp_path, "r.json", np.diag([0.6, 0.4]))
    code, doc = run(["fidelity", "--rho", r, "--sigma", r, "--eps", "0.05"], tmp_path)
    assert code == 0 and doc["seed"] == 17


def test_polyfit_and_blockenc(tmp_path):
    code, doc = run(["polyfit", "--c", "0.5", "--delta", "0.25", "--eps", "1e-4"], tmp_path)
    assert code == 0
    m = save(tmp_path, "m.json", np.eye(4))
    code, doc = run(["blockenc", "verify", "--matrix", m, "--sparsity", "1", "--eps", "1e-3"], tmp_path, "b.json")
    assert code == 0
    assert json.dumps(doc["result"]).count("1e-3") or doc["result"]


def test_pipeline_command(tmp_path):
    a, c = save(tmp_path, "a.json", A), save(tmp_path, "c.json", C)
    code, doc = run(["pipeline", "geomean", "--a", a, "--c", c, "--eps", "1e-2"], tmp_path)
    assert code == 0
    assert doc["result"]["measured_error_vs_oracle"] <= 1e-2


def test_gmml_roundtrip(tmp_path):
    data = tmp_path / "pairs.csv"
    assert cli.dispatch(["gmml", "gen", "--dim", "4", "--pairs", "50", "--seed", "1", "--out", str(data)]) == 0
    code, doc = run(["gmml", "fit", "--data", str(data)], tmp_path, "model.json")
    assert code == 0 and doc["result"]["train_accuracy"] >= 0.8
    scores = tmp_path / "scores.csv"
    assert cli.dispatch(["gmml", "score", "--model", str(tmp_path / "model.json"),
                         "--data", str(data), "--out", str(scores)]) == 0
    rows = list(csv.reader(scores.open()))
    assert rows[0] == ["id", "score", "decision"]
    assert {r[2] for r in rows[1:]} <= {"S", "D"}


def test_anomaly_command(tmp_path):
    r = save(tmp_path, "r.json", np.diag([0.8, 0.2]))
    s = save(tmp_path, "s.json", np.diag([0.2, 0.8]))
    out = tmp_path / "an.csv"
    assert cli.dispatch(["anomaly", "score", "--rho", r, "--sigma", s, "--xi", r, s, "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert float(rows[1][1]) == pytest.approx(1.7)
    assert rows[1][2] == "anomalous"


def test_bqp_commands(tmp_path):
    code, doc = run(["bqp", "gen", "--n", "1", "--label", "yes", "--seed", "2"], tmp_path, "inst.json")
    assert code == 0
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps(doc["result"]))
    code, doc = run(["bqp", "solve", "--instance", str(inst), "--mode", "pipeline", "--seed", "0"], tmp_path)
    assert code == 0 and doc["result"]["decision"] == "yes"
    a = save(tmp_path, "qa.json", np.diag([1.0, 0.5]))
    code, doc = run(["bqp", "reduce", "--a", a], tmp_path, "red.json")
    assert code == 0
