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

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from contrast.errors import DuplicateHypothesisError, ProblemFormatError

logger = logging.getLogger(__name__)


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << int(i)
    return mask


class TeachingProblem:
    """
    Finite teaching problem: a +1/-1 label matrix (hypotheses x instances),
    a target hypothesis and optional instance features.

    Coverage sets S(x) are precomputed as integer bitsets over hypotheses,
    bit h set when labels[h][x] differs from the target's label on x.
    Instances are immutable once built and safe to share across workers.
    """

    def __init__(self, labels, target: int, features=None, names: Optional[Sequence[str]] = None):
        labels = np.asarray(labels)
        if labels.ndim != 2 or labels.shape[0] < 1 or labels.shape[1] < 1:
            raise ProblemFormatError(
                f"expected a non-empty hypotheses x instances matrix, got shape {labels.shape}",
                field="labels",
            )
        if not np.isin(labels, (-1, 1)).all():
            h, x = np.argwhere(~np.isin(labels, (-1, 1)))[0]
            raise ProblemFormatError("expected +1 or -1", field=f"labels[{h}][{x}]")
        self.labels = labels.astype(np.int8)
        self.labels.setflags(write=False)

        target = int(target)
        if not 0 <= target < self.labels.shape[0]:
            raise ProblemFormatError(
                f"target {target} out of range for {self.labels.shape[0]} hypotheses", field="target"
            )
        self.target = target

        if features is not None:
            features = np.asarray(features, dtype=float)
            if features.ndim != 2 or features.shape[0] != self.instance_count:
                raise ProblemFormatError(
                    f"expected one feature vector of fixed dimension per instance, got shape {features.shape}",
                    field="features",
                )
            features.setflags(write=False)
        self.features = features

        if names is not None and len(names) != self.instance_count:
            raise ProblemFormatError(
                f"expected {self.instance_count} names, got {len(names)}", field="names"
            )
        self.names = list(names) if names is not None else None

        disagree = self.labels != self.labels[self.target]
        self._cover = tuple(mask_of(np.flatnonzero(disagree[:, x])) for x in range(self.instance_count))
        self.full_mask = (1 << self.hypothesis_count) - 1
        self.target_mask = 1 << self.target

    @property
    def instance_count(self) -> int:
        return self.labels.shape[1]

    @property
    def hypothesis_count(self) -> int:
        return self.labels.shape[0]

    def check_instance(self, x: int) -> int:
        if not 0 <= x < self.instance_count:
            raise IndexError(f"instance index {x} out of range [0, {self.instance_count})")
        return int(x)

    def coverage_mask(self, x: int) -> int:
        return self._cover[self.check_instance(x)]

    def target_label(self, x: int) -> int:
        return int(self.labels[self.target, self.check_instance(x)])

    def with_target(self, target: int) -> "TeachingProblem":
        return TeachingProblem(self.labels, target, self.features, self.names)

    def restrict(self, members: int) -> "TeachingProblem":
        """Sub-class problem keeping only the hypotheses in the ``members`` bitset."""
        if not members & self.target_mask:
            raise ValueError("restricted class must contain the target")
        rows = list(iter_bits(members))
        return TeachingProblem(self.labels[rows], rows.index(self.target), self.features, self.names)

    def to_dict(self) -> dict:
        data = {"labels": self.labels.tolist(), "target": self.target}
        if self.features is not None:
            data["features"] = self.features.tolist()
        if self.names is not None:
            data["names"] = list(self.names)
        return data

    def __repr__(self):
        return (
            f"TeachingProblem(hypotheses={self.hypothesis_count}, "
            f"instances={self.instance_count}, target={self.target})"
        )


@dataclass(frozen=True)
class VersionSpace:
    mask: int

    @classmethod
    def full(cls, problem: TeachingProblem) -> "VersionSpace":
        return cls(problem.full_mask)

    def members(self) -> list:
        return list(iter_bits(self.mask))

    def __len__(self):
        return self.mask.bit_count()

    def __contains__(self, h):
        return bool(self.mask >> h & 1)


@dataclass(frozen=True)
class Example:
    instance: int
    label: int

    @classmethod
    def truthful(cls, problem: TeachingProblem, x: int) -> "Example":
        return cls(int(x), problem.target_label(x))


def coverage_set(problem: TeachingProblem, x: int) -> set:
    return set(iter_bits(problem.coverage_mask(x)))


def update_version_space(vs: VersionSpace, problem: TeachingProblem, x: int) -> VersionSpace:
    return VersionSpace(vs.mask & ~problem.coverage_mask(x))


def remaining_after(problem: TeachingProblem, instances: Iterable[Optional[int]]) -> int:
    """Version-space bitset after labeling ``instances`` (``None`` entries ignored)."""
    mask = problem.full_mask
    for x in instances:
        if x is not None:
            mask &= ~problem.coverage_mask(x)
    return mask


def objective_f(problem: TeachingProblem, teaching_seq, induced_queries) -> int:
    """Hypotheses removed from H by the queries and contrastive examples together."""
    remaining = remaining_after(problem, list(induced_queries) + list(teaching_seq))
    return problem.hypothesis_count - remaining.bit_count()


def preflight_teachable(problem: TeachingProblem) -> Optional[tuple]:
    """Return the first pair of identical hypothesis rows, or None when every row is distinct."""
    seen = {}
    for h, row in enumerate(problem.labels):
        key = row.tobytes()
        if key in seen:
            return seen[key], h
        seen[key] = h
    return None


def require_teachable(problem: TeachingProblem, path=None) -> TeachingProblem:
    pair = preflight_teachable(problem)
    if pair is not None:
        raise DuplicateHypothesisError(*pair, path=path)
    return problem
