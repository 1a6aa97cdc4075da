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
from typing import Callable, List, NamedTuple, Optional, Sequence

from scipy.spatial.distance import cdist

from contrast.core import Example, TeachingProblem, VersionSpace, require_teachable
from contrast.errors import InvalidPrefixError, MissingFeaturesError
from contrast.learners import LearnerSpec, choose_query

logger = logging.getLogger(__name__)

CONSTRAINT_KINDS = ("Unconstrained", "CloseOpposite", "FarSame", "CloseOppositeOrFarSame", "NeighborChain")
CONSTRAINT_ALIASES = {
    "none": "Unconstrained",
    "unconstrained": "Unconstrained",
    "c": "CloseOpposite",
    "f": "FarSame",
    "c+f": "CloseOppositeOrFarSame",
    "chain": "NeighborChain",
}
DISTANCE_KINDS = ("CloseOpposite", "FarSame", "CloseOppositeOrFarSame")


@dataclass(frozen=True)
class ConstraintSpec:
    kind: str = "Unconstrained"
    psi: float = 1.0
    radius: int = 1

    def __post_init__(self):
        if self.kind not in CONSTRAINT_KINDS:
            raise ValueError(f"Unknown constraint kind {self.kind!r}, expected one of {CONSTRAINT_KINDS}")
        if self.kind in DISTANCE_KINDS and not 0 < self.psi <= 1:
            raise ValueError(f"psi must lie in (0, 1], got {self.psi}")
        if self.kind == "NeighborChain" and self.radius < 1:
            raise ValueError(f"radius must be a positive integer, got {self.radius}")

    @classmethod
    def parse(cls, kind: str, psi: float = 1.0, radius: int = 1) -> "ConstraintSpec":
        kind = CONSTRAINT_ALIASES.get(kind.strip().lower(), kind)
        return cls(kind, float(psi), int(radius))

    @property
    def short_name(self) -> str:
        return {
            "Unconstrained": "Unconstrained",
            "CloseOpposite": "C",
            "FarSame": "F",
            "CloseOppositeOrFarSame": "C+F",
            "NeighborChain": f"Chain{self.radius}",
        }[self.kind]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "psi": self.psi, "radius": self.radius}

    @classmethod
    def from_dict(cls, data: dict) -> "ConstraintSpec":
        return cls.parse(data.get("kind", "Unconstrained"), data.get("psi", 1.0), data.get("radius", 1))


UNCONSTRAINED = ConstraintSpec()


def _portion(psi: float, pool_size: int) -> int:
    if pool_size == 0:
        return 0
    # tolerance keeps e.g. 0.4 * 5 from rounding up to 3
    return max(1, math.ceil(psi * pool_size - 1e-9))


def _query_distances(problem: TeachingProblem, query: int):
    return cdist(problem.features[query:query + 1], problem.features)[0]


def constrained_set(spec: ConstraintSpec, problem: TeachingProblem, query: int) -> set:
    """Admissible contrastive instances for ``query``; the query itself is never included."""
    query = problem.check_instance(query)
    n = problem.instance_count
    if spec.kind == "Unconstrained":
        return set(range(n)) - {query}
    if spec.kind == "NeighborChain":
        return set(range(max(0, query - spec.radius), min(n, query + spec.radius + 1))) - {query}

    if problem.features is None:
        raise MissingFeaturesError(f"constraint {spec.kind} needs instance features")
    dist = _query_distances(problem, query)
    target_row = problem.labels[problem.target]
    chosen = set()
    if spec.kind in ("CloseOpposite", "CloseOppositeOrFarSame"):
        pool = [x for x in range(n) if target_row[x] != target_row[query]]
        pool.sort(key=lambda x: (dist[x], x))
        chosen.update(pool[:_portion(spec.psi, len(pool))])
    if spec.kind in ("FarSame", "CloseOppositeOrFarSame"):
        pool = [x for x in range(n) if target_row[x] == target_row[query] and x != query]
        pool.sort(key=lambda x: (-dist[x], x))
        chosen.update(pool[:_portion(spec.psi, len(pool))])
    return chosen


def _gain(problem: TeachingProblem, vs_mask: int, query: int, candidate: int) -> int:
    return (vs_mask & (problem.coverage_mask(query) | problem.coverage_mask(candidate))).bit_count()


def marginal_gain(problem: TeachingProblem, vs_before_round: VersionSpace, query: int, candidate: int) -> int:
    """Hypotheses the round removes when the teacher answers ``query`` with ``candidate``."""
    return _gain(problem, vs_before_round.mask, query, candidate)


class Pick(NamedTuple):
    instance: Optional[int]
    best_constrained_gain: int
    best_unconstrained_gain: int


def _check_costs(costs, problem: TeachingProblem):
    if costs is None:
        return None
    if len(costs) != problem.instance_count:
        raise ValueError(f"expected {problem.instance_count} costs, got {len(costs)}")
    for x, c in enumerate(costs):
        if not c > 0:
            raise ValueError(f"cost of instance {x} must be positive, got {c}")
    return costs


def greedy_pick(problem: TeachingProblem, vs: VersionSpace, query: int, candidates, costs=None) -> Pick:
    """
    Greedy contrastive choice for one round.

    Maximizes marginal gain (or gain per unit cost when ``costs`` is given)
    over ``candidates``, lowest index on ties. The best unit gain over all
    instances is reported alongside for approximation bookkeeping.
    """
    costs = _check_costs(costs, problem)
    return _greedy_pick(problem, vs.mask, query, candidates, costs)


def _greedy_pick(problem, vs_mask, query, candidates, costs) -> Pick:
    best_unconstrained = max(_gain(problem, vs_mask, query, x) for x in range(problem.instance_count))
    choice, best_score = None, None
    best_constrained = (vs_mask & problem.coverage_mask(query)).bit_count()
    for x in sorted(candidates):
        gain = _gain(problem, vs_mask, query, x)
        best_constrained = max(best_constrained, gain)
        score = gain if costs is None else gain / costs[x]
        if best_score is None or score > best_score:
            choice, best_score = x, score
    return Pick(choice, best_constrained, best_unconstrained)


@dataclass
class Round:
    t: int
    query: Example
    contrastive: Optional[Example]
    vs_size_after: int
    best_unconstrained_gain: int
    best_constrained_gain: int

    @property
    def examples(self) -> int:
        return 1 if self.contrastive is None else 2

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "query": {"instance": self.query.instance, "label": self.query.label},
            "contrastive": None if self.contrastive is None
            else {"instance": self.contrastive.instance, "label": self.contrastive.label},
            "vs_size_after": self.vs_size_after,
            "best_unconstrained_gain": self.best_unconstrained_gain,
            "best_constrained_gain": self.best_constrained_gain,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Round":
        contrastive = data.get("contrastive")
        return cls(
            t=int(data["t"]),
            query=Example(**data["query"]),
            contrastive=None if contrastive is None else Example(**contrastive),
            vs_size_after=int(data["vs_size_after"]),
            best_unconstrained_gain=int(data["best_unconstrained_gain"]),
            best_constrained_gain=int(data["best_constrained_gain"]),
        )


@dataclass
class Transcript:
    rounds: List[Round] = field(default_factory=list)
    terminated: bool = False
    budget: int = 0
    with_teacher: bool = True

    @property
    def total_examples(self) -> int:
        return sum(r.examples for r in self.rounds)

    @property
    def queries(self) -> list:
        return [r.query.instance for r in self.rounds]

    @property
    def teaching_sequence(self) -> list:
        """Contrastive moves per round, ``None`` where the teacher stayed silent."""
        return [None if r.contrastive is None else r.contrastive.instance for r in self.rounds]

    def to_dict(self) -> dict:
        return {
            "rounds": [r.to_dict() for r in self.rounds],
            "terminated": self.terminated,
            "total_examples": self.total_examples,
            "budget": self.budget,
            "with_teacher": self.with_teacher,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Transcript":
        return cls(
            rounds=[Round.from_dict(r) for r in data.get("rounds", [])],
            terminated=bool(data.get("terminated", False)),
            budget=int(data.get("budget", 0)),
            with_teacher=bool(data.get("with_teacher", True)),
        )


def default_budget(problem: TeachingProblem) -> int:
    return 4 * problem.hypothesis_count


def run_session(
    problem: TeachingProblem,
    learner: LearnerSpec,
    constraint: ConstraintSpec = UNCONSTRAINED,
    budget: Optional[int] = None,
    with_teacher: bool = True,
    costs: Optional[Sequence[float]] = None,
    callback: Optional[Callable[[Round], None]] = None,
) -> Transcript:
    """
    Run the query / contrastive-example protocol until the version space is
    the target alone or ``budget`` rounds have been played.
    """
    require_teachable(problem)
    costs = _check_costs(costs, problem)
    if budget is None:
        budget = default_budget(problem)
        logger.debug("no budget given, using default of %d rounds (4|H|)", budget)
    if budget < 1:
        raise ValueError(f"budget must be at least 1 round, got {budget}")

    transcript = Transcript(budget=budget, with_teacher=with_teacher)
    vs, labeled = problem.full_mask, 0
    for t in range(1, budget + 1):
        if vs == problem.target_mask:
            break
        query = choose_query(learner, problem, vs, labeled)
        if query is None:
            break
        labeled |= 1 << query
        after_query = vs & ~problem.coverage_mask(query)
        query_gain = (vs & problem.coverage_mask(query)).bit_count()

        pick = Pick(None, query_gain, query_gain)
        if with_teacher and after_query != problem.target_mask:
            pick = _greedy_pick(problem, vs, query, constrained_set(constraint, problem, query), costs)

        vs = after_query
        contrastive = None
        if pick.instance is not None:
            vs &= ~problem.coverage_mask(pick.instance)
            labeled |= 1 << pick.instance
            contrastive = Example.truthful(problem, pick.instance)

        record = Round(
            t=t,
            query=Example.truthful(problem, query),
            contrastive=contrastive,
            vs_size_after=vs.bit_count(),
            best_unconstrained_gain=pick.best_unconstrained_gain,
            best_constrained_gain=pick.best_constrained_gain,
        )
        transcript.rounds.append(record)
        logger.debug("round %d: query %d contrastive %s |vs|=%d", t, query,
                     pick.instance, record.vs_size_after)
        if callback is not None:
            callback(record)

    transcript.terminated = vs == problem.target_mask
    if not transcript.terminated:
        logger.info("run stopped after %d rounds without isolating the target", len(transcript.rounds))
    return transcript


def cost_of(transcript: Transcript, costs: Optional[Sequence[float]] = None) -> float:
    if costs is None:
        return float(transcript.total_examples)
    total = 0.0
    for r in transcript.rounds:
        total += costs[r.query.instance]
        if r.contrastive is not None:
            total += costs[r.contrastive.instance]
    return total


def replay_moves(problem: TeachingProblem, learner: LearnerSpec, moves, expected_queries=None):
    """
    Replay a teacher-move sequence against the learner.

    Each entry is one round: the learner queries, then the move (an instance
    or ``None`` for silence) is labeled. Returns the final version-space and
    labeled bitsets together with the induced queries.
    """
    vs, labeled, queries = problem.full_mask, 0, []
    for i, move in enumerate(moves):
        if move is not None and not 0 <= move < problem.instance_count:
            raise InvalidPrefixError(f"move {i}: instance {move} out of range")
        query = choose_query(learner, problem, vs, labeled)
        if expected_queries is not None:
            if i >= len(expected_queries) or expected_queries[i] != query:
                raise InvalidPrefixError(
                    f"round {i + 1}: learner queries {query}, sequence expects "
                    f"{expected_queries[i] if i < len(expected_queries) else 'nothing'}"
                )
        queries.append(query)
        if query is not None:
            vs &= ~problem.coverage_mask(query)
            labeled |= 1 << query
        if move is not None:
            vs &= ~problem.coverage_mask(move)
            labeled |= 1 << move
    return vs, labeled, queries


def sequence_value(problem: TeachingProblem, learner: LearnerSpec, moves, expected_queries=None) -> int:
    """f of a teacher-move sequence, induced queries included."""
    vs, _, _ = replay_moves(problem, learner, moves, expected_queries)
    return problem.hypothesis_count - vs.bit_count()
