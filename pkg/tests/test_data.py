import json

import numpy as np
import pytest

from contrast.core import preflight_teachable
from contrast.data import (
    SyntheticConfig,
    gen_synthetic,
    load_problem,
    random_small_problem,
    read_problem_file,
    save_problem,
    thm2_family,
)
from contrast.diagnostics import alpha_of_run
from contrast.errors import DuplicateHypothesisError, ProblemFormatError
from contrast.learners import LearnerSpec
from contrast.oracles import opt_teaching_with_learner
from contrast.teaching import UNCONSTRAINED, run_session

SMALL = {"n_points": 40, "n_hypotheses": 16, "seed": 3}


def test_gen_synthetic_is_deterministic(tmp_path):
    paths = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        save_problem(gen_synthetic(SyntheticConfig.from_dict(SMALL)), path)
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_gen_synthetic_rows_distinct():
    problem = gen_synthetic(SyntheticConfig.from_dict(SMALL))
    assert problem.labels.shape == (16, 40)
    assert problem.features.shape == (40, 2)
    assert preflight_teachable(problem) is None


def test_synthetic_config_defaults():
    config = SyntheticConfig()
    assert config.n_points == 200
    assert config.n_hypotheses == 64
    assert config.hypothesis_means[2] == pytest.approx([np.pi / 2, 0.0])
    with pytest.raises(ValueError):
        SyntheticConfig(n_hypotheses=60)
    with pytest.raises(ValueError):
        SyntheticConfig(hypothesis_covariance=[[1.0, 0.0], [0.0, -1.0]])


def test_thm2_family_k1():
    problem, constraint = thm2_family(1)
    assert problem.labels.shape == (144, 15)
    assert constraint.short_name == "Chain1"
    gbs = LearnerSpec.gbs()
    run = run_session(problem, gbs, constraint)
    assert run.terminated
    assert run.total_examples == 15
    assert alpha_of_run(run) == pytest.approx(6.5)
    assert opt_teaching_with_learner(problem, gbs, UNCONSTRAINED).value == 2


def test_thm2_family_rejects_bad_parameter():
    with pytest.raises(ValueError):
        thm2_family(0)


def test_save_load_round_trip(p0, tmp_path):
    path = tmp_path / "p0.json"
    save_problem(p0, path, meta={"note": "P0"})
    loaded, meta = read_problem_file(path)
    np.testing.assert_array_equal(loaded.labels, p0.labels)
    assert loaded.target == p0.target
    assert meta == {"note": "P0"}


def _write(tmp_path, data, name="problem.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


def test_load_rejects_duplicate_rows(tmp_path):
    path = _write(tmp_path, {"labels": [[1, -1], [-1, 1], [1, -1]], "target": 0})
    with pytest.raises(DuplicateHypothesisError) as excinfo:
        load_problem(path)
    assert excinfo.value.pair == (0, 2)
    assert str(path) in str(excinfo.value)


def test_load_rejects_missing_target(tmp_path):
    path = _write(tmp_path, {"labels": [[1, -1], [-1, 1]]})
    with pytest.raises(ProblemFormatError) as excinfo:
        load_problem(path)
    assert excinfo.value.field == "target"


def test_load_names_the_bad_entry(tmp_path):
    path = _write(tmp_path, {"labels": [[1, -1], [-1, 0]], "target": 0})
    with pytest.raises(ProblemFormatError, match=r"labels\[1\]\[1\]"):
        load_problem(path)


def test_load_reports_json_line(tmp_path):
    path = _write(tmp_path, '{\n  "labels": [[1, -1]],\n  "target": 0,,\n}')
    with pytest.raises(ProblemFormatError) as excinfo:
        load_problem(path)
    assert excinfo.value.line == 3


def test_load_missing_file(tmp_path):
    with pytest.raises(ProblemFormatError):
        load_problem(tmp_path / "absent.json")


def test_random_small_problem_bounds(rng):
    for _ in range(50):
        problem = random_small_problem(rng, 5, 7)
        assert 2 <= problem.instance_count <= 5
        assert 2 <= problem.hypothesis_count <= 7
        assert preflight_teachable(problem) is None
