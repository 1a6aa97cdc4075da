"""
/*
 * Software Name : CONTRAST
 * SPDX-License-Identifier: MIT
 *
 * This software is distributed under the MIT license,
 * see the "LICENSE" file for more details
 *
 * Authors: see CONTRIBUTORS.md
 * Software description: CONTRAST: teaching active version-space learners with contrastive examples.
 */
"""

import json
import math
import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from contrast.core import TeachingProblem, require_teachable
from contrast.errors import ConstructionError, ProblemFormatError
from contrast.learners import LearnerSpec, choose_query
from contrast.teaching import ConstraintSpec, run_session

logger = logging.getLogger(__name__)


@dataclass
class SyntheticConfig:
    """
    Generative parameters of the two-class synthetic dataset.

    Class Gaussians are package defaults. The hypothesis mixture has eight
    components with angle means pi/4 apart and covariance diag(2, 5e-3).
    """
    n_points: int = 200
    class_means: list = field(default_factory=lambda: [[-1.0, 0.5], [1.0, -0.5]])
    class_covariances: list = field(default_factory=lambda: [[[0.25, 0.0], [0.0, 0.25]]] * 2)
    n_hypotheses: int = 64
    n_components: int = 8
    hypothesis_covariance: list = field(default_factory=lambda: [[2.0, 0.0], [0.0, 5e-3]])
    seed: int = 0
    max_retries: int = 10000

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError(f"n_points must be at least 2, got {self.n_points}")
        if self.n_hypotheses % self.n_components:
            raise ValueError(
                f"n_hypotheses ({self.n_hypotheses}) must be divisible by n_components ({self.n_components})"
            )
        for cov in list(self.class_covariances) + [self.hypothesis_covariance]:
            cov = np.asarray(cov, dtype=float)
            if not np.allclose(cov, cov.T) or np.linalg.eigvalsh(cov).min() < -1e-12:
                raise ValueError(f"covariance {cov.tolist()} is not positive semi-definite")

    @property
    def hypothesis_means(self) -> list:
        return [[math.pi / 4 * i, 0.0] for i in range(self.n_components)]

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


def _linear_labels(features: np.ndarray, theta: float, offset: float) -> np.ndarray:
    score = features[:, 0] * math.cos(theta) + features[:, 1] * math.sin(theta) - offset
    # sign(0) = +1
    return np.where(score >= 0, 1, -1).astype(np.int8)


def gen_synthetic(config: SyntheticConfig) -> TeachingProblem:
    """
    Two Gaussian feature clusters and linear-threshold hypotheses drawn from
    an eight-component mixture over (theta, b). Duplicate label rows are
    redrawn from the same component. The returned problem uses hypothesis 0
    as a placeholder target; experiments iterate over targets themselves.
    """
    rng = np.random.default_rng(config.seed)
    half = config.n_points // 2
    features = np.vstack([
        rng.multivariate_normal(config.class_means[0], config.class_covariances[0], half),
        rng.multivariate_normal(config.class_means[1], config.class_covariances[1], config.n_points - half),
    ])

    per_component = config.n_hypotheses // config.n_components
    rows, seen, retries = [], set(), 0
    for mean in config.hypothesis_means:
        drawn = 0
        while drawn < per_component:
            theta, offset = rng.multivariate_normal(mean, config.hypothesis_covariance)
            row = _linear_labels(features, theta, offset)
            key = row.tobytes()
            if key in seen:
                retries += 1
                if retries > config.max_retries:
                    raise ConstructionError(
                        f"could not draw {config.n_hypotheses} distinct hypotheses within "
                        f"{config.max_retries} retries"
                    )
                continue
            seen.add(key)
            rows.append(row)
            drawn += 1
    logger.info("generated %d points, %d hypotheses (%d redraws)", config.n_points, len(rows), retries)
    return TeachingProblem(np.array(rows), 0, features)


def _subsets(pool):
    """Subsets of ``pool`` by increasing size, lexicographic within a size."""
    for size in range(len(pool) + 1):
        for combo in combinations(pool, size):
            yield combo


def thm2_family(k_param: int):
    """
    Adversarial problem on which the greedy teacher under NeighborChain(1)
    needs sqrt(m) + 3 labels while one contrastive example suffices.

    m = (6k + 6)^2 hypotheses and n = sqrt(m) + 3 instances x_1..x_n (indices
    0..n-1). The learner's first query x_2 splits H exactly in half; the
    chain x_3..x_{n-1} then removes one hypothesis per instance, two per round,
    while x_n covers every hypothesis outside S(x_2). Every row is made
    distinct by spreading the hypotheses removed in the first round over
    subsets of the chain.
    """
    if k_param < 1:
        raise ValueError(f"k_param must be >= 1, got {k_param}")
    side = 6 * k_param + 6
    m, n = side * side, side + 3
    last = n - 1
    chain = list(range(2, last))

    signatures = []
    first_half = _subsets(chain + [last])
    signatures += [{1, *next(first_half)} for _ in range(m // 2)]
    opposite = _subsets(chain)
    signatures += [{0, last, *next(opposite)} for _ in range(m // 2 - side - 2)]
    for x in chain:
        signatures.append({x, last})
    signatures.append({last})

    labels = np.ones((m, n), dtype=np.int8)
    for row, sig in enumerate(signatures, start=1):
        labels[row, sorted(sig)] = -1
    problem = TeachingProblem(labels, 0)
    constraint = ConstraintSpec("NeighborChain", radius=1)
    _verify_thm2(problem, constraint, side)
    return problem, constraint


def _verify_thm2(problem: TeachingProblem, constraint: ConstraintSpec, side: int):
    require_teachable(problem)
    learner = LearnerSpec.gbs()
    run = run_session(problem, learner, constraint, with_teacher=True)
    if not run.terminated or run.total_examples != side + 3:
        raise ConstructionError(
            f"greedy run used {run.total_examples} labels (terminated={run.terminated}), expected {side + 3}"
        )
    first = run.rounds[0]
    if first.query.instance != 1 or first.contrastive is None or first.contrastive.instance != 0:
        raise ConstructionError("first round does not query x_2 and answer with x_1")

    query = choose_query(learner, problem, problem.full_mask, 0)
    after = problem.full_mask & ~problem.coverage_mask(query)
    finishers = [x for x in range(problem.instance_count)
                 if after & ~problem.coverage_mask(x) == problem.target_mask]
    if after == problem.target_mask or not finishers:
        raise ConstructionError("unconstrained optimum is not a single round with one contrastive example")


def _dump(data: dict) -> str:
    items = []
    for key in ("labels", "target", "features", "names", "meta"):
        if key not in data:
            continue
        if key in ("labels", "features"):
            rows = ",\n".join("    " + json.dumps(row) for row in data[key])
            items.append(f'  "{key}": [\n{rows}\n  ]')
        else:
            items.append(f"  {json.dumps(key)}: {json.dumps(data[key], sort_keys=True)}")
    return "{\n" + ",\n".join(items) + "\n}\n"


def save_problem(problem: TeachingProblem, path, meta: dict = None):
    data = problem.to_dict()
    if meta:
        data["meta"] = meta
    with open(path, "w", encoding="utf-8") as f:
        f.write(_dump(data))


def read_problem_file(path):
    """Load a problem file, returning ``(problem, meta)``; errors name the line or field at fault."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ProblemFormatError(f"cannot read problem file ({e.strerror})", path=path) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFormatError(f"{e.msg} (column {e.colno})", path=path, line=e.lineno) from e

    if not isinstance(data, dict):
        raise ProblemFormatError("expected a JSON object", path=path)
    for key in ("labels", "target"):
        if key not in data:
            raise ProblemFormatError("missing required field", path=path, field=key)
    target = data["target"]
    if isinstance(target, bool) or not isinstance(target, int):
        raise ProblemFormatError(f"expected an integer, got {target!r}", path=path, field="target")

    labels = data["labels"]
    if not isinstance(labels, list) or not labels or not all(isinstance(r, list) for r in labels):
        raise ProblemFormatError("expected a non-empty array of arrays", path=path, field="labels")
    width = len(labels[0])
    for h, row in enumerate(labels):
        if len(row) != width:
            raise ProblemFormatError(f"expected {width} entries, got {len(row)}", path=path, field=f"labels[{h}]")
        for x, value in enumerate(row):
            if isinstance(value, bool) or value not in (1, -1):
                raise ProblemFormatError(f"expected +1 or -1, got {value!r}", path=path, field=f"labels[{h}][{x}]")

    features = data.get("features")
    if features is not None:
        if not isinstance(features, list) or len(features) != width:
            raise ProblemFormatError(f"expected {width} feature vectors", path=path, field="features")
        dims = {len(v) if isinstance(v, list) else -1 for v in features}
        if len(dims) != 1 or -1 in dims:
            raise ProblemFormatError("feature vectors must share one dimension", path=path, field="features")

    try:
        problem = TeachingProblem(labels, target, features, data.get("names"))
    except ProblemFormatError as e:
        raise ProblemFormatError(str(e), path=path) from e
    require_teachable(problem, path=path)
    return problem, data.get("meta", {})


def load_problem(path) -> TeachingProblem:
    return read_problem_file(path)[0]


def random_small_problem(rng: np.random.Generator, max_instances: int = 8, max_hypotheses: int = 12,
                         min_instances: int = 2) -> TeachingProblem:
    """Random problem with distinct rows and a random target, for property checks."""
    n = int(rng.integers(min_instances, max_instances + 1))
    count = int(rng.integers(2, min(max_hypotheses, 2 ** n) + 1))
    codes = rng.choice(2 ** n, size=count, replace=False)
    labels = np.where((codes[:, None] >> np.arange(n)) & 1, 1, -1).astype(np.int8)
    return TeachingProblem(labels, int(rng.integers(count)))
