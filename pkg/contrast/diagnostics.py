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
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from contrast.core import TeachingProblem
from contrast.geometry import DEFAULT_TOLERANCE, coherence, min_neighborly_k
from contrast.learners import LearnerSpec, choose_query
from contrast.oracles import EXACT_SOLVE_CAP, opt_teaching_with_learner, teaching_dimension
from contrast.teaching import UNCONSTRAINED, ConstraintSpec, Transcript, run_session, sequence_value

logger = logging.getLogger(__name__)

DEFAULT_DEPTH_CAP = 3
DEFAULT_STATE_CAP = 2000


def alpha_of_run(transcript: Transcript) -> float:
    """Worst round ratio of best unconstrained gain to best admissible gain; inf when a round is blocked."""
    alpha = 1.0
    for r in transcript.rounds:
        if r.best_constrained_gain == 0:
            if r.best_unconstrained_gain > 0:
                return math.inf
            continue
        alpha = max(alpha, r.best_unconstrained_gain / r.best_constrained_gain)
    return alpha


class SequenceValue:
    """Cached f over teacher-move sequences for one (problem, learner) pair."""

    def __init__(self, problem: TeachingProblem, learner: LearnerSpec):
        self.problem = problem
        self.learner = learner
        self._cache = {}

    def __call__(self, moves) -> int:
        key = tuple(moves)
        if key not in self._cache:
            self._cache[key] = sequence_value(self.problem, self.learner, key)
        return self._cache[key]


def _rho(f: SequenceValue, sigma, sigma_prime) -> float:
    sigma, combined = list(sigma), list(sigma) + list(sigma_prime)
    base, base_combined = f(sigma), f(combined)
    ratio = 1.0
    for x in range(f.problem.instance_count):
        denominator = f(combined + [x]) - base_combined
        if denominator > 0:
            ratio = min(ratio, (f(sigma + [x]) - base) / denominator)
    return ratio


def _gamma(f: SequenceValue, sigma, sigma_prime) -> Optional[float]:
    reference = f(sigma_prime)
    if reference == 0:
        return None
    return 1.0 - (f(list(sigma_prime) + list(sigma)) - f(sigma)) / reference


def submodularity_ratio(problem: TeachingProblem, learner: LearnerSpec, sigma, sigma_prime) -> float:
    """
    min over x with positive Delta(x | sigma + sigma') of
    Delta(x | sigma) / Delta(x | sigma + sigma'); 1 when no x qualifies.
    """
    return _rho(SequenceValue(problem, learner), sigma, sigma_prime)


def backward_curvature(problem: TeachingProblem, learner: LearnerSpec, sigma, sigma_prime) -> Optional[float]:
    """1 - (f(sigma' + sigma) - f(sigma)) / f(sigma'); None when f(sigma') is 0."""
    return _gamma(SequenceValue(problem, learner), sigma, sigma_prime)


def _children(problem: TeachingProblem, learner: LearnerSpec, vs: int, labeled: int):
    query = choose_query(learner, problem, vs, labeled)
    if query is None:
        return []
    after = vs & ~problem.coverage_mask(query)
    labeled |= 1 << query
    out = [(after, labeled)]
    for x in range(problem.instance_count):
        if x != query:
            out.append((after & ~problem.coverage_mask(x), labeled | 1 << x))
    return out


def reachable_version_spaces(problem, learner, depth_cap=DEFAULT_DEPTH_CAP, state_cap=DEFAULT_STATE_CAP,
                             sample=None, seed=0):
    """
    Version spaces (bitsets, |H'| >= 2) reachable under any teacher behaviour.

    Breadth-first over rounds up to ``depth_cap`` (None = unbounded) and at
    most ``state_cap`` states, or ``sample`` random teacher walks. Returns
    ``(spaces, capped)``.
    """
    root = (problem.full_mask, 0)
    spaces = set()
    capped = False
    if sample is not None:
        rng = np.random.default_rng(seed)
        for _ in range(sample):
            state, depth = root, 0
            while state[0] != problem.target_mask and (depth_cap is None or depth <= depth_cap):
                spaces.add(state[0])
                children = _children(problem, learner, *state)
                if not children:
                    break
                state = children[int(rng.integers(len(children)))]
                depth += 1
        return sorted(spaces), True

    seen = {root}
    queue = deque([(root, 0)])
    while queue:
        (vs, labeled), depth = queue.popleft()
        if vs.bit_count() < 2:
            continue
        spaces.add(vs)
        if depth_cap is not None and depth >= depth_cap:
            capped = True
            continue
        for child in _children(problem, learner, vs, labeled):
            if child in seen:
                continue
            if len(seen) >= state_cap:
                capped = True
                break
            seen.add(child)
            queue.append((child, depth + 1))
    return sorted(spaces), capped


@dataclass
class RhoGamma:
    rho_g: float
    gamma_g: float
    depth_capped: bool
    classes: int
    mode: str = "exact"


def rho_gamma_star(problem: TeachingProblem, learner: LearnerSpec, depth_cap=DEFAULT_DEPTH_CAP,
                   state_cap=DEFAULT_STATE_CAP, cap=EXACT_SOLVE_CAP, sample=None, seed=0) -> RhoGamma:
    """
    Worst-case ratio and curvature over reachable sub-classes H'.

    For each H' the unconstrained greedy sequence x and an optimal sequence
    sigma are computed on the restricted problem; gamma_H is the max over
    non-empty greedy prefixes of gamma(sigma, x_1:i) and rho_H the min over
    all prefix pairs of rho(x_1:i, sigma_1:j).
    """
    spaces, capped = reachable_version_spaces(problem, learner, depth_cap, state_cap, sample, seed)
    rho_g, gamma_g = 1.0, 1.0
    for members in spaces:
        sub = problem.restrict(members)
        f = SequenceValue(sub, learner)
        greedy = run_session(sub, learner, UNCONSTRAINED, with_teacher=True).teaching_sequence
        optimal = opt_teaching_with_learner(sub, learner, UNCONSTRAINED, cap=cap).teaching_sequence
        for i in range(1, len(greedy) + 1):
            gamma = _gamma(f, optimal, greedy[:i])
            if gamma is not None:
                gamma_g = max(gamma_g, gamma)
        for i in range(len(greedy) + 1):
            for j in range(len(optimal) + 1):
                rho_g = min(rho_g, _rho(f, greedy[:i], optimal[:j]))
    logger.info("rho_g=%.4f gamma_g=%.4f over %d sub-classes%s", rho_g, gamma_g, len(spaces),
                " (capped)" if capped else "")
    return RhoGamma(rho_g, gamma_g, capped, len(spaces), "sampled" if sample is not None else "exact")


@dataclass
class Thm1Bound:
    value: float
    first_term: float
    second_term: float


def bound_thm1(alpha: float, rho_g: float, gamma_g: float, h_count: int, opt_t_al: int) -> Thm1Bound:
    """Indicative value of the general greedy bound, constants set to 1 and natural logs."""
    if gamma_g < 1:
        raise ValueError(f"gamma_g must be >= 1, got {gamma_g}")
    if rho_g <= 0:
        raise ValueError(f"rho_g must be positive, got {rho_g}")
    log_h = math.log(h_count)
    second = alpha * math.log(h_count / gamma_g) / (rho_g * gamma_g)
    first = 0.0
    if gamma_g > 1:
        first = (alpha * log_h * math.log(h_count / gamma_g)
                 / (rho_g * gamma_g * math.log(gamma_g / (gamma_g - 1))))
    return Thm1Bound((first + second) * opt_t_al, first * opt_t_al, second * opt_t_al)


@dataclass
class Thm3Bound:
    bound: float
    epsilon: float
    alpha_cap: float
    degenerate: bool = False


def lemma3_floor(k: int, c_star: float) -> float:
    """min{(1-c*)/(1+c*), c*/(k-c*)}, the GBS lower bound on rho_g (0 when degenerate)."""
    if c_star <= 0 or c_star >= 1 or k - c_star <= 0:
        return 0.0
    return min((1 - c_star) / (1 + c_star), c_star / (k - c_star))


def bound_thm3(k: int, c_star: float, h_count: int, opt_t_al: int) -> Thm3Bound:
    if not 0 < c_star < 1 or k < 1:
        logger.warning("degenerate coherence c*=%s or k=%s; constrained bound not evaluated", c_star, k)
        return Thm3Bound(math.nan, math.nan, math.nan, True)
    epsilon = lemma3_floor(k, c_star)
    alpha_cap = max(k / c_star, 2 / (1 - c_star))
    return Thm3Bound(alpha_cap / epsilon * math.log(h_count) ** 2 * opt_t_al, epsilon, alpha_cap)


def bound_gbs_alone(k: int, c_star: float, h_count: int) -> float:
    """ln|H| / ln(1/eta) with eta = max{(1+c*)/2, (k+1)/(k+2)}; inf when eta >= 1."""
    if h_count <= 1:
        return 0.0
    eta = max((1 + c_star) / 2, (k + 1) / (k + 2))
    if eta >= 1:
        logger.warning("degenerate eta=%s; GBS bound is unbounded", eta)
        return math.inf
    return math.log(h_count) / math.log(1 / eta)


@dataclass
class DichotomyReport:
    checked: int
    violations: List[dict] = field(default_factory=list)
    capped: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_gbs_dichotomy(problem: TeachingProblem, k: int, c_star: float, tolerance: float = DEFAULT_TOLERANCE,
                         state_cap: int = 20000) -> DichotomyReport:
    """
    For every reachable version space H', the GBS query x must satisfy
    |sum_h h(x)| <= c*|H'| or |H'| <= k/c*.
    """
    learner = LearnerSpec.gbs()
    report = DichotomyReport(0)
    seen = {(problem.full_mask, 0)}
    queue = deque(seen)
    while queue:
        vs, labeled = queue.popleft()
        size = vs.bit_count()
        if size < 2:
            continue
        query = choose_query(learner, problem, vs, labeled)
        covered = (vs & problem.coverage_mask(query)).bit_count()
        balance = abs(size - 2 * covered)
        report.checked += 1
        balanced = balance <= (c_star + tolerance) * size
        small = c_star <= tolerance or size <= k / (c_star - tolerance)
        if not (balanced or small):
            report.violations.append({"version_space": vs, "query": query, "size": size, "balance": balance})
        for child in _children(problem, learner, vs, labeled):
            if child in seen:
                continue
            if len(seen) >= state_cap:
                report.capped = True
                break
            seen.add(child)
            queue.append(child)
    return report


@dataclass
class DiagnosticsReport:
    alpha: float
    rho_g: Optional[float]
    gamma_g: Optional[float]
    c_star: float
    k_min: int
    opt_t: Optional[int]
    opt_t_al: Optional[int]
    bound_thm1: Optional[float]
    bound_thm3: Optional[float]
    bound_gbs_alone: float
    depth_capped: bool
    greedy_labels: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    mode: str = "exact"
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, float) and not math.isfinite(value):
                data[key] = str(value)
        return data


def probe_thm3(problem: TeachingProblem, constraint: ConstraintSpec, k: int, c_star: float, opt_t_al: int) -> dict:
    """Compare the greedy GBS run's label count with the indicative constrained bound."""
    run = run_session(problem, LearnerSpec.gbs(), constraint, with_teacher=True)
    bound = bound_thm3(k, c_star, problem.hypothesis_count, opt_t_al)
    finding = {"greedy_labels": run.total_examples, "bound": bound.bound, "degenerate": bound.degenerate}
    finding["within_bound"] = bound.degenerate or run.total_examples <= bound.bound
    if not finding["within_bound"]:
        logger.warning("greedy cost %d exceeds indicative bound %.3f", run.total_examples, bound.bound)
    return finding


def diagnose(problem: TeachingProblem, learner: LearnerSpec, constraint: ConstraintSpec = UNCONSTRAINED,
             depth_cap=DEFAULT_DEPTH_CAP, cap=EXACT_SOLVE_CAP, tolerance=DEFAULT_TOLERANCE,
             sample=None, seed=0) -> DiagnosticsReport:
    """All problem-dependent parameters and bounds for one problem; bounds are indicative (constants = 1)."""
    notes = ["bounds use constant 1 and natural logarithms; indicative only"]
    run = run_session(problem, learner, constraint, with_teacher=True)
    alpha = alpha_of_run(run)
    c_star = coherence(problem, tolerance)
    k_min = max(1, min_neighborly_k(problem))
    h_count = problem.hypothesis_count

    opt_t = opt_t_al = None
    rho_g = gamma_g = None
    capped = False
    mode = "exact" if sample is None else "sampled"
    if problem.instance_count <= cap:
        opt_t = teaching_dimension(problem, cap).value
        opt_t_al = opt_teaching_with_learner(problem, learner, UNCONSTRAINED, cap).value
        rg = rho_gamma_star(problem, learner, depth_cap, cap=cap, sample=sample, seed=seed)
        rho_g, gamma_g, capped = rg.rho_g, rg.gamma_g, rg.depth_capped
        if capped:
            notes.append(f"reachable sub-classes truncated at depth {depth_cap}")
    else:
        notes.append(f"{problem.instance_count} instances exceed exact cap {cap}: OPT, rho_g, gamma_g not computed")

    thm1 = None
    if opt_t_al is not None and rho_g is not None and h_count > 1:
        thm1 = bound_thm1(alpha, rho_g, gamma_g, h_count, opt_t_al).value
    thm3 = None
    if opt_t_al is not None and h_count > 1:
        result = bound_thm3(k_min, c_star, h_count, opt_t_al)
        thm3 = None if result.degenerate else result.bound
        if result.degenerate:
            notes.append("c* is 0 or 1: constrained bound flagged as degenerate")
    return DiagnosticsReport(
        alpha=alpha, rho_g=rho_g, gamma_g=gamma_g, c_star=c_star, k_min=k_min,
        opt_t=opt_t, opt_t_al=opt_t_al, bound_thm1=thm1, bound_thm3=thm3,
        bound_gbs_alone=bound_gbs_alone(k_min, c_star, h_count), depth_capped=capped,
        greedy_labels=run.total_examples, tolerance=tolerance, mode=mode, notes=notes,
    )
