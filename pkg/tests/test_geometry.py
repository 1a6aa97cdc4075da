import numpy as np
import pytest

from contrast.core import TeachingProblem
from contrast.data import random_small_problem
from contrast.geometry import (
    UnionFind,
    coherence,
    distance_frame,
    distance_matrix,
    hypothesis_distance,
    min_neighborly_k,
    neighborly_graph,
    solve_coherence,
)


def simplex_points(n, total):
    """Integer points of the (n-1)-simplex scaled to ``total``, one per row."""
    if n == 1:
        return np.array([[total]])
    axes = np.indices((total + 1,) * (n - 1)).reshape(n - 1, -1)
    axes = axes[:, axes.sum(axis=0) <= total]
    return np.vstack([axes, total - axes.sum(axis=0)]).T


def grid_coherence(problem, steps=1000):
    """Coherence minimised over the 1/steps simplex grid, one slice of the first coordinate at a time."""
    labels = problem.labels.astype(float)
    best = np.inf
    for first in range(steps + 1):
        tail = simplex_points(problem.instance_count - 1, steps - first)
        margins = labels[:, :1] * first + labels[:, 1:] @ tail.T
        best = min(best, np.abs(margins).max(axis=0).min())
    return best / steps


def test_hypothesis_distance_p0(p0):
    assert hypothesis_distance(p0, 0, 2) == 1
    assert hypothesis_distance(p0, 0, 1) == 2
    assert hypothesis_distance(p0, 1, 1) == 0


def test_distance_matrix_matches_pairwise(rng):
    for _ in range(10):
        problem = random_small_problem(rng)
        dist = distance_matrix(problem)
        n = problem.instance_count
        expected = [[hypothesis_distance(problem, a, b) for b in range(n)] for a in range(n)]
        np.testing.assert_array_equal(dist, expected)
        assert (np.diag(dist) == 0).all()
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    assert dist[a, c] <= dist[a, b] + dist[b, c]


def test_distance_frame_uses_names():
    problem = TeachingProblem([[1, 1], [-1, 1]], 0, names=["cat", "dog"])
    frame = distance_frame(problem)
    assert list(frame.columns) == ["cat", "dog"]
    assert frame.loc["cat", "dog"] == 1


def test_union_find():
    uf = UnionFind(4)
    assert uf.union(0, 1)
    assert not uf.union(1, 0)
    assert uf.union(2, 3)
    assert uf.components == 2
    assert uf.find(0) != uf.find(3)
    uf.union(1, 3)
    assert uf.components == 1


def test_min_neighborly_k_p0(p0):
    assert min_neighborly_k(p0) == 1
    assert neighborly_graph(p0).k_min == 1


def test_min_neighborly_k_identical_columns():
    assert min_neighborly_k(TeachingProblem([[1, 1], [-1, -1]], 0)) == 1


def test_min_neighborly_k_thresholds():
    # h_j(x_i) = +1 iff i >= j; adjacent columns differ on one hypothesis
    labels = [[1 if i >= j else -1 for i in range(5)] for j in range(6)]
    assert min_neighborly_k(TeachingProblem(labels, 2)) == 1


def test_min_neighborly_k_single_instance():
    assert min_neighborly_k(TeachingProblem([[1], [-1]], 0)) == 0


def test_min_neighborly_k_is_the_bottleneck(rng):
    for _ in range(10):
        problem = random_small_problem(rng)
        k = min_neighborly_k(problem)
        dist = distance_matrix(problem)
        n = problem.instance_count
        for threshold, connected in ((k, True), (k - 1, False)):
            if threshold < 1:
                continue
            uf = UnionFind(n)
            for a in range(n):
                for b in range(a + 1, n):
                    if dist[a, b] <= threshold:
                        uf.union(a, b)
            assert (uf.components == 1) == connected


def test_coherence_symmetric_pair():
    assert coherence(TeachingProblem([[1, -1], [-1, 1]], 0)) == pytest.approx(0.0, abs=1e-6)


def test_coherence_with_all_positive_hypothesis(p0):
    assert coherence(p0) == pytest.approx(1.0, abs=1e-6)


def test_coherence_duality_bracket(rng):
    for _ in range(10):
        result = solve_coherence(random_small_problem(rng))
        assert result.lower_bound - 1e-9 <= result.value <= result.upper_bound + 1e-9
        assert 0.0 <= result.value <= 1.0 + 1e-9
        assert result.distribution.sum() == pytest.approx(1.0)


def test_coherence_permutation_invariant(rng):
    problem = random_small_problem(rng, 6, 10)
    cols = rng.permutation(problem.instance_count)
    rows = rng.permutation(problem.hypothesis_count)
    shuffled = TeachingProblem(problem.labels[rows][:, cols], int(np.flatnonzero(rows == problem.target)[0]))
    assert coherence(shuffled) == pytest.approx(coherence(problem), abs=1e-6)


def test_coherence_matches_grid_search():
    rng = np.random.default_rng(11)
    for _ in range(20):
        problem = random_small_problem(rng, 3, 6)
        assert abs(grid_coherence(problem) - coherence(problem)) <= 1e-3


@pytest.mark.slow
def test_coherence_matches_grid_search_four_instances():
    rng = np.random.default_rng(12)
    for _ in range(4):
        problem = random_small_problem(rng, 4, 6, min_instances=4)
        assert abs(grid_coherence(problem) - coherence(problem)) <= 1e-3


def test_coherence_rejects_bad_tolerance(p0):
    with pytest.raises(ValueError):
        coherence(p0, tolerance=0)
