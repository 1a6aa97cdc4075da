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

import math
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from contrast.core import TeachingProblem, VersionSpace, mask_of
from contrast.errors import NoQueryAvailableError

logger = logging.getLogger(__name__)

LEARNER_KINDS = ("GBS", "BetaGreedy", "Random")


@dataclass(frozen=True)
class LearnerSpec:
    kind: str = "GBS"
    beta: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in LEARNER_KINDS:
            raise ValueError(f"Unknown learner kind {self.kind!r}, expected one of {LEARNER_KINDS}")
        if not self.beta >= 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")

    @classmethod
    def gbs(cls):
        return cls("GBS")

    @classmethod
    def beta_greedy(cls, beta, seed=0):
        return cls("BetaGreedy", float(beta), int(seed))

    @classmethod
    def random(cls, seed=0):
        return cls("Random", 1.0, int(seed))

    @property
    def deterministic(self) -> bool:
        return self.kind == "GBS"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "beta": self.beta, "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "LearnerSpec":
        return cls(data.get("kind", "GBS"), float(data.get("beta", 1.0)), int(data.get("seed", 0)))


def _split_product(problem: TeachingProblem, vs_mask: int, x: int) -> int:
    # members disagreeing with the target on x predict one label, the rest the other
    covered = (vs_mask & problem.coverage_mask(x)).bit_count()
    return covered * (vs_mask.bit_count() - covered)


def gbs_utility(problem: TeachingProblem, vs: VersionSpace, x: int) -> float:
    """(2/|vs|) * n_minus(x) * n_plus(x), in [0, |vs|/2]."""
    size = len(vs)
    if size == 0:
        raise ValueError("GBS utility is undefined on an empty version space")
    return 2.0 * _split_product(problem, vs.mask, x) / size


def choose_query(learner: LearnerSpec, problem: TeachingProblem, vs_mask: int, labeled_mask: int) -> Optional[int]:
    """Learner's next query given the version space and labeled-instance bitsets; None when nothing is left."""
    unlabeled = [x for x in range(problem.instance_count) if not labeled_mask >> x & 1]
    if not unlabeled:
        return None
    if learner.kind == "Random":
        rng = np.random.default_rng(np.random.SeedSequence([learner.seed, labeled_mask]))
        return unlabeled[int(rng.integers(len(unlabeled)))]

    products = [_split_product(problem, vs_mask, x) for x in unlabeled]
    best = max(products)
    if learner.kind == "GBS":
        return unlabeled[products.index(best)]

    if math.isinf(learner.beta):
        satisfying = unlabeled
    else:
        satisfying = [x for x, p in zip(unlabeled, products) if p * learner.beta >= best]
    rng = np.random.default_rng(np.random.SeedSequence([learner.seed, labeled_mask]))
    return satisfying[int(rng.integers(len(satisfying)))]


def select_query(learner: LearnerSpec, problem: TeachingProblem, vs: VersionSpace, already_queried) -> int:
    labeled_mask = already_queried if isinstance(already_queried, int) else mask_of(already_queried)
    query = choose_query(learner, problem, vs.mask, labeled_mask)
    if query is None:
        raise NoQueryAvailableError("every instance has already been labeled")
    logger.debug("%s query %d on |vs|=%d", learner.kind, query, len(vs))
    return query


def satisfies_beta(problem: TeachingProblem, vs_mask: int, labeled_mask: int, query: int, beta: float) -> bool:
    """Post-hoc check that ``query`` reaches 1/beta of the best utility among unlabeled instances."""
    candidates = [x for x in range(problem.instance_count) if not labeled_mask >> x & 1]
    if not candidates:
        raise NoQueryAvailableError("every instance has already been labeled")
    best = max(_split_product(problem, vs_mask, x) for x in candidates)
    if math.isinf(beta):
        return True
    return _split_product(problem, vs_mask, query) * beta >= best


