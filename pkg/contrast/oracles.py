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
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from contrast.core import Example, TeachingProblem, iter_bits, require_teachable
from contrast.errors import SolverCapError
from contrast.learners import LearnerSpec, choose_query
from contrast.teaching import UNCONSTRAINED, ConstraintSpec, Transcript, constrained_set, replay_moves, run_session

logger = logging.getLogger(__name__)

EXACT_SOLVE_CAP = 20


@dataclass
class OptResult:
    value: int
    witness: List[Example]
    explored_states: int
    # one entry per round for the interactive oracle (None = teacher silent);
    # the chosen instances for the classical teaching set
    teaching_sequence: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": [{"instance": e.instance, "label": e.label} for e in self.witness],
            "explored_states": self.explored_states,
            "teaching_sequence": list(self.teaching_sequence),
        }


def _check_cap(problem: TeachingProblem, cap: int):
    if problem.instance_count > cap:
        raise SolverCapError(
            f"{problem.instance_count} instances exceed the exact-solve cap of {cap}; "
            f"use oracles.greedy_cover for an upper bound instead"
        )


def teaching_dimension(problem: TeachingProblem, cap: int = EXACT_SOLVE_CAP) -> OptResult:
    """
    Smallest set of instances whose coverage sets jointly cover H minus the target.

    Branches on the instances covering the lowest uncovered hypothesis (one of
    them must be in any cover), memoized on the uncovered bitset. A branch is
    skipped when its cover-size lower bound, ceil(|uncovered| / max coverage),
    cannot beat the best branch already found for the same state.
    """
    require_teachable(problem)
    _check_cap(problem, cap)
    covering = [
        sorted((x for x in range(problem.instance_count) if problem.coverage_mask(x) >> h & 1),
               key=lambda x: -problem.coverage_mask(x).bit_count())
        for h in range(problem.hypothesis_count)
    ]
    max_cover = max(problem.coverage_mask(x).bit_count() for x in range(problem.instance_count))
    memo = {}

    def solve(uncovered: int):
        if uncovered == 0:
            return 0, ()
        if uncovered in memo:
            return memo[uncovered]
        h = (uncovered & -uncovered).bit_length() - 1
        best = None
        for x in covering[h]:
            rest = uncovered & ~problem.coverage_mask(x)
            if best is not None and 1 + math.ceil(rest.bit_count() / max_cover) >= best[0]:
                continue
            count, chosen = solve(rest)
            if best is None or count + 1 < best[0]:
                best = (count + 1, (x,) + chosen)
                if best[0] == 1:
                    break
        memo[uncovered] = best
        return best

    value, chosen = solve(problem.full_mask & ~problem.target_mask)
    chosen = sorted(chosen)
    logger.info("teaching dimension %d (%d states)", value, len(memo))
    return OptResult(value, [Example.truthful(problem, x) for x in chosen], len(memo), chosen)


def greedy_cover(problem: TeachingProblem) -> OptResult:
    """Classical greedy set cover; an upper bound on the teaching dimension at any scale."""
    require_teachable(problem)
    uncovered = problem.full_mask & ~problem.target_mask
    chosen = []
    while uncovered:
        gains = [(uncovered & problem.coverage_mask(x)).bit_count() for x in range(problem.instance_count)]
        x = int(np.argmax(gains))
        chosen.append(x)
        uncovered &= ~problem.coverage_mask(x)
    return OptResult(len(chosen), [Example.truthful(problem, x) for x in chosen], len(chosen), chosen)


def opt_teaching_with_learner(
    problem: TeachingProblem,
    learner: LearnerSpec,
    constraint: ConstraintSpec = UNCONSTRAINED,
    cap: int = EXACT_SOLVE_CAP,
) -> OptResult:
    """
    Fewest labeled examples any teacher restricted to ``constraint`` needs
    against ``learner``.

    The learner's query is forced in every state; the teacher branches over
    the admissible set and a silent move. Iterative deepening on the label
    budget, with a memo of the largest budget known to fail for each
    (version space, labeled instances) state.
    """
    require_teachable(problem)
    _check_cap(problem, cap)
    goal = problem.target_mask
    admissible = {}
    failed = {}
    explored = 0

    def candidates(query: int, vs: int):
        if query not in admissible:
            admissible[query] = sorted(constrained_set(constraint, problem, query))
        return sorted(admissible[query],
                      key=lambda x: (-(vs & problem.coverage_mask(x)).bit_count(), x))

    def search(vs: int, labeled: int, budget: int):
        nonlocal explored
        if vs == goal:
            return []
        if budget <= 0 or failed.get((vs, labeled), -1) >= budget:
            return None
        explored += 1
        query = choose_query(learner, problem, vs, labeled)
        if query is None:
            failed[(vs, labeled)] = budget
            return None
        after = vs & ~problem.coverage_mask(query)
        labeled_after = labeled | 1 << query
        if after == goal:
            return [(query, None)]
        if budget >= 2:
            for x in candidates(query, after):
                rest = search(after & ~problem.coverage_mask(x), labeled_after | 1 << x, budget - 2)
                if rest is not None:
                    return [(query, x)] + rest
        rest = search(after, labeled_after, budget - 1)
        if rest is not None:
            return [(query, None)] + rest
        failed[(vs, labeled)] = budget
        return None

    if problem.full_mask == goal:
        return OptResult(0, [], 0, [])
    for budget in range(1, 2 * problem.instance_count + 1):
        rounds = search(problem.full_mask, 0, budget)
        if rounds is not None:
            break
    else:
        raise RuntimeError("no teaching sequence found; the learner ran out of queries")

    witness = []
    for query, move in rounds:
        witness.append(Example.truthful(problem, query))
        if move is not None:
            witness.append(Example.truthful(problem, move))
    logger.info("interactive optimum %d against %s (%d states)", len(witness), learner.kind, explored)
    return OptResult(len(witness), witness, explored, [move for _, move in rounds])


def replay_witness(problem: TeachingProblem, learner: LearnerSpec, result: OptResult) -> int:
    """Label count of an interactive OptResult when replayed; raises if it does not isolate the target."""
    vs, _, queries = replay_moves(problem, learner, result.teaching_sequence)
    if vs != problem.target_mask:
        raise AssertionError("witness does not isolate the target")
    return sum(q is not None for q in queries) + sum(m is not None for m in result.teaching_sequence)


@dataclass
class SearchReport:
    seed: int
    trials: int
    found: bool
    al_alone: Optional[Transcript] = None
    al_teacher: Optional[Transcript] = None
    max_instances: int = 6
    max_hypotheses: int = 16

    def search_params(self) -> dict:
        """Arguments that make search_gbs_counterexample stop on this same instance."""
        return {"seed": self.seed, "trials": self.trials, "max_instances": self.max_instances,
                "max_hypotheses": self.max_hypotheses}

    def to_dict(self) -> dict:
        return {
            **self.search_params(),
            "found": self.found,
            "al_alone_labels": None if self.al_alone is None else self.al_alone.total_examples,
            "al_teacher_labels": None if self.al_teacher is None else self.al_teacher.total_examples,
        }


def _signature_problem(n_instances: int, signatures) -> TeachingProblem:
    # target is all +1; every other hypothesis is -1 exactly on its signature
    labels = np.ones((len(signatures) + 1, n_instances), dtype=np.int8)
    for row, sig in enumerate(signatures, start=1):
        for x in iter_bits(int(sig)):
            labels[row, x] = -1
    return TeachingProblem(labels, 0)


def search_gbs_counterexample(max_instances: int = 6, max_hypotheses: int = 16, seed: int = 0,
                              trials: int = 20000):
    """
    Randomly sample small problems until GBS alone needs fewer labels than
    GBS with the unconstrained greedy teacher.

    Returns ``(problem, report)``; ``problem`` is None when the trial budget
    runs out.
    """
    rng = np.random.default_rng(seed)
    learner = LearnerSpec.gbs()
    for trial in range(1, trials + 1):
        n = int(rng.integers(3, max_instances + 1))
        count = min(int(rng.integers(3, max_hypotheses + 1)), 2 ** n)
        signatures = rng.choice(np.arange(1, 2 ** n), size=count - 1, replace=False)
        problem = _signature_problem(n, sorted(signatures.tolist()))
        alone = run_session(problem, learner, with_teacher=False)
        taught = run_session(problem, learner, UNCONSTRAINED, with_teacher=True)
        if alone.terminated and taught.terminated and alone.total_examples < taught.total_examples:
            logger.info("counterexample after %d trials: %d vs %d labels", trial,
                        alone.total_examples, taught.total_examples)
            return problem, SearchReport(seed, trial, True, alone, taught, max_instances, max_hypotheses)
    logger.info("no counterexample in %d trials", trials)
    return None, SearchReport(seed, trials, False, max_instances=max_instances, max_hypotheses=max_hypotheses)
