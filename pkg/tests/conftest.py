import os

import numpy as np
import pytest

from contrast.core import TeachingProblem

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")
COUNTEREXAMPLE_PATH = os.path.join(FIXTURES_DIR, "small_gbs_counterexample.json")


@pytest.fixture
def p0():
    # h0 is the target; S(x0) = {h1, h3}, S(x1) = {h2, h3}, S(x2) = {h3}
    labels = [
        [1, 1, 1],
        [-1, 1, 1],
        [1, -1, 1],
        [-1, -1, -1],
    ]
    return TeachingProblem(labels, 0)


@pytest.fixture
def collinear():
    """Five points at positions 0..4; target labels (+, +, -, -, -)."""
    labels = [
        [1, 1, -1, -1, -1],
        [1, 1, 1, -1, -1],
        [-1, -1, -1, -1, -1],
    ]
    features = [[0.0], [1.0], [2.0], [3.0], [4.0]]
    return TeachingProblem(labels, 0, features)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
