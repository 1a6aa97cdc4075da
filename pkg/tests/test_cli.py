import csv
import os
import json
import shutil

import numpy as np
import pandas as pd
import pytest

from conftest import COUNTEREXAMPLE_PATH, FIXTURES_DIR
from contrast.config import SEED_ENV, SweepConfig, resolve_seed
from contrast.data import load_problem, read_problem_file, save_problem, thm2_family
from contrast.main import aggregate_rows, load_problem_source, main, replay_row, run_sweep, trend_violations

SWEEP = {
    "problem": {"synthetic": {"n_points": 20, "n_hypotheses": 8}},
    "betas": [1, 10],
    "psis": [0.5, 1.0],
    "constraints": ["C+F"],
    "seed": 0,
}
SWEEP_SYNTHETIC = os.path.join(os.path.dirname(FIXTURES_DIR), "config_example", "sweep_synthetic.json")


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def _config(tmp_path, data, name):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_resolve_seed_order(monkeypatch):
    assert resolve_seed(None, {"seed": 5}) == 5
    assert resolve_seed(None) == 0
    monkeypatch.setenv(SEED_ENV, "9")
    assert resolve_seed(None, {"seed": 5}) == 9
    assert resolve_seed(3, {"seed": 5}) == 3


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig.from_dict({"problem": {}, "betas": [0.5]}, seed=0)
    with pytest.raises(ValueError):
        SweepConfig.from_dict({"problem": {}, "psis": []}, seed=0)
    config = SweepConfig.from_dict({"problem": {}}, seed=1, n_jobs=2)
    assert config.betas == [1, 5, 10, 100, 1000]
    assert config.n_jobs == 2


def test_sweep_outputs(tmp_path):
    cfg = _config(tmp_path, SWEEP, "smoke.json")
    out = tmp_path / "results"
    assert main(["sweep", cfg, "--out", str(out)]) == 0

    runs = pd.read_csv(out / "smoke_runs.csv", keep_default_na=False)
    assert len(runs) == 2 * 8 * 4
    assert list(runs.columns) == ["beta", "psi", "constraint", "target", "rounds", "labels_total",
                                  "terminated", "alpha", "seed", "learner"]
    assert (runs[runs.constraint == "Unconstrained"].alpha.astype(float) == 1.0).all()
    assert set(runs.constraint) == {"AL", "Unconstrained", "C+F"}

    aggregate = pd.read_csv(out / "smoke_aggregate.csv")
    assert len(aggregate) == 2 * 2 * 1 + 2 * 2
    assert (aggregate.n == 8).all()
    assert {"labels_mean", "labels_sem", "rounds_mean", "alpha_mean", "terminated_frac"} <= set(aggregate.columns)


def test_sweep_is_byte_identical(tmp_path):
    cfg = _config(tmp_path, SWEEP, "smoke.json")
    outputs = []
    for name, jobs in (("first", "1"), ("second", "1"), ("parallel", "2")):
        out = tmp_path / name
        assert main(["sweep", cfg, "--out", str(out), "--jobs", jobs]) == 0
        outputs.append(((out / "smoke_runs.csv").read_bytes(), (out / "smoke_aggregate.csv").read_bytes()))
    assert outputs[0] == outputs[1] == outputs[2]


def test_sweep_rows_replay(tmp_path):
    cfg = _config(tmp_path, SWEEP, "smoke.json")
    out = tmp_path / "results"
    assert main(["sweep", cfg, "--out", str(out)]) == 0
    problem = load_problem_source(SWEEP["problem"], 0)
    with open(out / "smoke_runs.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    for row in rows[::7]:
        transcript = replay_row(problem, row)
        assert transcript.total_examples == int(row["labels_total"])
        assert len(transcript.rounds) == int(row["rounds"])


def test_trend_violations_flags_each_trend():
    cells = [
        (1.0, "AL", "", 6.0, 1.0),
        (1.0, "Unconstrained", "", 4.0, 1.0),
        (1.0, "C+F", "0.1", 5.5, 1.5),
        (1.0, "C+F", "1.0", 4.0, 1.0),
        (5.0, "AL", "", 6.0, 1.0),
        (5.0, "Unconstrained", "", 7.0, 1.0),
        (5.0, "C+F", "0.1", 4.0, 1.0),
        (5.0, "C+F", "0.5", 4.5, 1.2),
        (5.0, "C+F", "0.75", 4.5, 1.1),
        (5.0, "C+F", "1.0", 5.0, 1.3),
    ]
    frame = pd.DataFrame(cells, columns=["beta", "constraint", "psi", "labels_mean", "alpha_mean"])
    violations = trend_violations(frame)
    assert len(violations) == 3
    assert all(v.startswith("beta=5.0") for v in violations)


@pytest.mark.slow
def test_synthetic_sweep_trends():
    with open(SWEEP_SYNTHETIC) as f:
        config_data = json.load(f)
    rows = []
    for seed in range(5):
        config = SweepConfig.from_dict(config_data, seed, n_jobs=4)
        rows.extend(run_sweep(load_problem_source(config.problem, seed), config))
    assert trend_violations(aggregate_rows(rows)) == []


def test_run_writes_transcript(tmp_path, capsys):
    cfg = _config(tmp_path, {"problem": {"path": COUNTEREXAMPLE_PATH}, "learner": {"kind": "GBS"}}, "remark.json")
    assert main(["run", cfg]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["total_examples"] == 4
    assert data["cost"] == 4.0
    assert data["terminated"]


def test_run_keeps_learner_seed(tmp_path, capsys, monkeypatch):
    learner = {"kind": "BetaGreedy", "beta": 5, "seed": 42}
    seeded = {"problem": {"path": COUNTEREXAMPLE_PATH}, "learner": learner, "seed": 7}
    cfg = _config(tmp_path, seeded, "seeded.json")
    assert main(["run", cfg]) == 0
    assert json.loads(capsys.readouterr().out)["learner"]["seed"] == 42

    top = {"problem": {"path": COUNTEREXAMPLE_PATH}, "learner": {"kind": "Random"}, "seed": 7}
    cfg = _config(tmp_path, top, "top.json")
    assert main(["run", cfg]) == 0
    assert json.loads(capsys.readouterr().out)["learner"]["seed"] == 7

    monkeypatch.setenv(SEED_ENV, "11")
    cfg = _config(tmp_path, {"problem": {"path": COUNTEREXAMPLE_PATH}, "learner": learner}, "env.json")
    assert main(["run", cfg]) == 0
    assert json.loads(capsys.readouterr().out)["learner"]["seed"] == 11
    assert main(["run", cfg, "--seed", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["learner"]["seed"] == 3


def test_run_with_costs(tmp_path, p0):
    problem_path = tmp_path / "p0.json"
    save_problem(p0, problem_path)
    cfg = _config(tmp_path, {"problem": {"path": str(problem_path)}, "costs": [1, 10, 1]}, "costly.json")
    out = tmp_path / "transcript.json"
    assert main(["run", cfg, "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["rounds"][0]["contrastive"]["instance"] == 2


def test_diagnose_report(tmp_path, p0):
    problem_path = tmp_path / "p0.json"
    save_problem(p0, problem_path)
    distances = tmp_path / "dist" / "p0_distances.csv"
    cfg = _config(tmp_path, {"problem": {"path": str(problem_path)}, "depth_cap": None,
                             "distances_csv": str(distances)}, "diag.json")
    out = tmp_path / "report.json"
    assert main(["diagnose", cfg, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["opt_t"] == 2
    assert report["opt_t_al"] == 2
    assert report["k_min"] == 1
    frame = pd.read_csv(distances, index_col=0)
    assert frame.loc["x0", "x2"] == 1


def test_gen_writes_problem(tmp_path):
    cfg = _config(tmp_path, {"synthetic": {"n_points": 20, "n_hypotheses": 8}}, "gen.json")
    out = tmp_path / "gen" / "problem.json"
    assert main(["gen", cfg, "--seed", "4", "--out", str(out)]) == 0
    problem, meta = read_problem_file(out)
    assert problem.labels.shape == (8, 20)
    assert meta["seed"] == 4


def test_verify_fixtures_suite(tmp_path):
    out = tmp_path / "verify.json"
    assert main(["verify", "fixtures", "--fixtures-dir", FIXTURES_DIR, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"]
    searched = next(c for c in report["checks"] if c["name"] == "counterexample search finds an instance")
    assert (searched["al_alone_labels"], searched["al_teacher_labels"]) == (3, 4)


@pytest.mark.slow
def test_fixtures_search_pins_counterexample(tmp_path):
    shutil.copy(COUNTEREXAMPLE_PATH, tmp_path)
    assert main(["fixtures", "--fixtures-dir", str(tmp_path), "--search", "--seed", "0"]) == 0
    _, meta = read_problem_file(tmp_path / "remark_gbs_counterexample.json")
    assert (meta["al_alone_labels"], meta["al_teacher_labels"]) == (3, 4)
    assert meta["search"]["seed"] == 0
    assert {"trials", "max_instances", "max_hypotheses"} <= set(meta["search"])

    out = tmp_path / "verify.json"
    assert main(["verify", "fixtures", "--fixtures-dir", str(tmp_path), "--out", str(out)]) == 0
    names = [c["name"] for c in json.loads(out.read_text())["checks"]]
    assert "searched counterexample matches pinned file" in names



def test_verify_missing_fixtures(tmp_path, capsys):
    assert main(["verify", "fixtures", "--fixtures-dir", str(tmp_path)]) == 1
    assert "ERROR:" in capsys.readouterr().err


@pytest.mark.slow
def test_verify_lemmas_suite(tmp_path):
    assert main(["verify", "lemmas", "--seed", "1", "--out", str(tmp_path / "lemmas.json")]) == 0


def test_fixtures_command_pins_family(tmp_path):
    assert main(["fixtures", "--fixtures-dir", str(tmp_path), "--k", "1"]) == 0
    pinned = load_problem(tmp_path / "thm2_k1.json")
    np.testing.assert_array_equal(pinned.labels, thm2_family(1)[0].labels)


def test_missing_config_exits():
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "does_not_exist.json"])
    assert excinfo.value.code == 1


def test_bad_problem_source(tmp_path, capsys):
    cfg = _config(tmp_path, {"problem": {"url": "x"}}, "bad.json")
    assert main(["run", cfg]) == 1
    assert "ERROR:" in capsys.readouterr().err
