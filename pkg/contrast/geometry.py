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

import numpy as np
import pandas as pd
from scipy.optimize import linprog

from contrast.core import TeachingProblem
from contrast.errors import ConvergenceError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6


def hypothesis_distance(problem: TeachingProblem, x: int, x_prime: int) -> int:
    """Number of hypotheses in H labeling ``x`` and ``x_prime`` differently."""
    x, x_prime = problem.check_instance(x), problem.check_instance(x_prime)
    return int(np.count_nonzero(problem.labels[:, x] != problem.labels[:, x_prime]))


def distance_matrix(problem: TeachingProblem) -> np.ndarray:
    # for +1/-1 columns, agreements minus disagreements is the inner product
    labels = problem.labels.astype(np.int64)
    return (problem.hypothesis_count - labels.T @ labels) // 2


def distance_frame(problem: TeachingProblem) -> pd.DataFrame:
    names = problem.names or [f"x{i}" for i in range(problem.instance_count)]
    return pd.DataFrame(distance_matrix(problem), index=names, columns=names)


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.components = n

    def find(self, element: int) -> int:
        root = element
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[element] != root:
            self.parent[element], element = root, self.parent[element]
        return root

    def union(self, a: int, b: int) -> bool:
        root_a, root_b = self.find(a), self.find(b)
        if root_a == root_b:
            return False
        if self.rank[root_a] < self.rank[root_b]:
            root_a, root_b = root_b, root_a
        self.parent[root_b] = root_a
        if self.rank[root_a] == self.rank[root_b]:
            self.rank[root_a] += 1
        self.components -= 1
        return True


@dataclass
class NeighborlyGraph:
    distances: np.ndarray
    k_min: int


def min_neighborly_k(problem: TeachingProblem) -> int:
    """
    Smallest k for which linking instances at distance <= k connects X.

    Kruskal over edges sorted by distance; the answer is the bottleneck edge
    of the spanning tree, reported as at least 1.
    """
    n = problem.instance_count
    if n < 2:
        logger.info("single instance: neighborly structure is trivial, k_min reported as 0")
        return 0
    dist = distance_matrix(problem)
    rows, cols = np.triu_indices(n, k=1)
    order = np.lexsort((cols, rows, dist[rows, cols]))
    uf = UnionFind(n)
    for e in order:
        if uf.union(int(rows[e]), int(cols[e])) and uf.components == 1:
            return max(1, int(dist[rows[e], cols[e]]))
    raise AssertionError("complete graph must connect")


def neighborly_graph(problem: TeachingProblem) -> NeighborlyGraph:
    return NeighborlyGraph(distance_matrix(problem), min_neighborly_k(problem))


@dataclass
class CoherenceResult:
    value: float
    distribution: np.ndarray
    lower_bound: float
    upper_bound: float
    tolerance: float


def solve_coherence(problem: TeachingProblem, tolerance: float = DEFAULT_TOLERANCE) -> CoherenceResult:
    """
    c* = min over distributions P on X of max_h |sum_x h(x) P(x)|.

    Solved as the LP  min t  s.t. -t <= A p <= t, sum p = 1, p >= 0.
    The primal distribution gives an upper bound, the HiGHS duals give a
    hypothesis mixture and hence a lower bound; the two must agree within
    ``tolerance``.
    """
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    A = problem.labels.astype(float)
    n_h, n_x = A.shape
    ones = np.ones((n_h, 1))
    A_ub = np.vstack([np.hstack([A, -ones]), np.hstack([-A, -ones])])
    b_ub = np.zeros(2 * n_h)
    A_eq = np.hstack([np.ones((1, n_x)), np.zeros((1, 1))])
    c = np.zeros(n_x + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * (n_x + 1), method="highs")
    if res.status != 0:
        raise ConvergenceError(f"coherence LP failed: {res.message}")

    p = np.clip(res.x[:n_x], 0.0, None)
    p /= p.sum()
    upper = float(np.max(np.abs(A @ p)))

    y = np.clip(-np.asarray(res.ineqlin.marginals), 0.0, None)
    weight = y.sum()
    lower = 0.0
    if weight > 0:
        mixture = (y[:n_h] - y[n_h:]) / weight
        lower = max(0.0, float(np.min(mixture @ A)))
    if upper - lower > tolerance:
        raise ConvergenceError(
            f"coherence duality gap {upper - lower:.3g} exceeds tolerance {tolerance:g}"
        )
    logger.debug("coherence %.6f (gap %.2g)", upper, upper - lower)
    return CoherenceResult(upper, p, lower, upper, tolerance)


def coherence(problem: TeachingProblem, tolerance: float = DEFAULT_TOLERANCE) -> float:
    return solve_coherence(problem, tolerance).value
