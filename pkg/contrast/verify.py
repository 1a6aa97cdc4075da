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

import os
import json
import math
import logging
from dataclasses import dataclass, field

import numpy as np

from contrast.core import TeachingProblem
from contrast.data import random_small_problem, read_problem_file, thm2_family
from contrast.diagnostics import (
    alpha_of_run,
    lemma3_floor,
    probe_thm3,
    rho_gamma_star,
    verify_gbs_dichotomy,
)
from contrast.errors import ContrastError
from contrast.geometry import coherence, min_neighborly_k
from contrast.learners import LearnerSpec
from contrast.oracles import opt_teaching_with_learner, search_gbs_counterexample, teaching_dimension
from contrast.teaching import UNCONSTRAINED, run_session

logger = logging.getLogger(__name__)

REMARK_FIXTURE = "remark_gbs_counterexample.json"
SMALL_FIXTURE = "small_gbs_counterexample.json"
PINNED_SEARCH = {"seed": 0, "trials": 4000, "max_instances": 6, "max_hypotheses": 16}
SLACK = 1e-6


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)
    findings: list = field(default_factory=list)

    def record(self, name: str, passed: bool, **detail):
        self.checks.append({"name": name, "passed": bool(passed), **detail})
        log = logger.info if passed else logger.error
        log("%s: %s", name, "ok" if passed else f"FAILED {detail}")

    def finding(self, name: str, **detail):
        """Informational record; never fails the suite."""
        self.findings.append({"name": name, **detail})
        logger.info("%s: %s", name, detail)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": self.checks, "findings": self.findings}


def _counterexample_record(problem: TeachingProblem, meta: dict, name: str, report: VerifyReport):
    gbs = LearnerSpec.gbs()
    alone = run_session(problem, gbs, with_teacher=False).total_examples
    taught = run_session(problem, gbs, UNCONSTRAINED, with_teacher=True).total_examples
    report.record(name, alone < taught and alone == meta.get("al_alone_labels", alone)
                  and taught == meta.get("al_teacher_labels", taught),
                  al_alone=alone, al_teacher=taught)


def verify_searched_counterexample(fixtures_dir: str, report: VerifyReport):
    """Re-run the pinned counterexample search; compare with the pinned file when one exists."""
    path = os.path.join(fixtures_dir, REMARK_FIXTURE)
    stored, meta = read_problem_file(path) if os.path.isfile(path) else (None, {})
    params = meta.get("search", PINNED_SEARCH)
    found, search = search_gbs_counterexample(**params)
    report.record("counterexample search finds an instance", found is not None, **search.to_dict())
    if found is None:
        return
    _counterexample_record(found, meta, "searched counterexample: GBS alone beats GBS with greedy teacher", report)
    if stored is not None:
        report.record("searched counterexample matches pinned file",
                      json.dumps(found.labels.tolist()) == json.dumps(stored.labels.tolist())
                      and found.target == stored.target, path=path)


def verify_fixtures(fixtures_dir: str, report: VerifyReport):
    path = os.path.join(fixtures_dir, SMALL_FIXTURE)
    if not os.path.isfile(path):
        raise ContrastError(f"missing fixture file {path}; restore it from version control")
    problem, meta = read_problem_file(path)
    _counterexample_record(problem, meta, "counterexample fixture: GBS alone beats GBS with greedy teacher", report)
    verify_searched_counterexample(fixtures_dir, report)

    gbs = LearnerSpec.gbs()
    family, constraint = thm2_family(1)
    run = run_session(family, gbs, constraint, with_teacher=True)
    opt = opt_teaching_with_learner(family, gbs, UNCONSTRAINED).value
    alpha = alpha_of_run(run)
    side = math.isqrt(family.hypothesis_count)
    report.record("adversarial family k=1", run.total_examples == side + 3 and opt == 2
                  and side / 2 <= alpha <= 2 * side,
                  greedy_labels=run.total_examples, opt=opt, alpha=alpha)

    pinned = os.path.join(fixtures_dir, "thm2_k1.json")
    if os.path.isfile(pinned):
        stored, _ = read_problem_file(pinned)
        report.record("adversarial family matches pinned file",
                      np.array_equal(stored.labels, family.labels) and stored.target == family.target)


def verify_lemmas(seed: int, report: VerifyReport, count: int = 200):
    """Teaching dimension <= interactive optimum <= 2 x teaching dimension, and the optimum never loses to greedy."""
    rng = np.random.default_rng(seed)
    gbs = LearnerSpec.gbs()
    sandwich_failures, dominance_failures = [], []
    for i in range(count):
        problem = random_small_problem(rng, 8, 12)
        opt_t = teaching_dimension(problem).value
        opt_al = opt_teaching_with_learner(problem, gbs).value
        if not opt_t <= opt_al <= 2 * opt_t:
            sandwich_failures.append({"instance": i, "opt_t": opt_t, "opt_t_al": opt_al})
        greedy = run_session(problem, gbs, UNCONSTRAINED, with_teacher=True).total_examples
        if opt_al > greedy:
            dominance_failures.append({"instance": i, "opt_t_al": opt_al, "greedy": greedy})
    report.record(f"interactive optimum sandwich on {count} problems", not sandwich_failures,
                  failures=sandwich_failures)
    report.record(f"optimum never above greedy on {count} problems", not dominance_failures,
                  failures=dominance_failures)


def check_bounds_instance(problem: TeachingProblem) -> list:
    """Range, dichotomy and ratio-floor violations on one enumerable problem."""
    gbs = LearnerSpec.gbs()
    problems = []
    run = run_session(problem, gbs, UNCONSTRAINED, with_teacher=True)
    if alpha_of_run(run) != 1.0:
        problems.append(f"alpha {alpha_of_run(run)} on an unconstrained run")
    rg = rho_gamma_star(problem, gbs, depth_cap=None)
    h_count = problem.hypothesis_count
    if not 1 - SLACK <= rg.gamma_g <= max(1, h_count - 1) + SLACK:
        problems.append(f"gamma_g {rg.gamma_g} outside [1, {h_count - 1}]")
    if not 0 < rg.rho_g <= 1 + SLACK:
        problems.append(f"rho_g {rg.rho_g} outside (0, 1]")
    k = max(1, min_neighborly_k(problem))
    c_star = coherence(problem)
    dichotomy = verify_gbs_dichotomy(problem, k, c_star)
    if not dichotomy.ok:
        problems.append(f"dichotomy violated {dichotomy.violations[:3]}")
    floor = lemma3_floor(k, c_star)
    if rg.rho_g < floor - SLACK:
        problems.append(f"rho_g {rg.rho_g} below floor {floor} (k={k}, c*={c_star})")
    return problems


def soundness_outcome(problem: TeachingProblem) -> str:
    """'within', 'exceeds' or 'degenerate' for the greedy run against the indicative constrained bound."""
    gbs = LearnerSpec.gbs()
    opt = opt_teaching_with_learner(problem, gbs).value
    finding = probe_thm3(problem, UNCONSTRAINED, max(1, min_neighborly_k(problem)), coherence(problem), opt)
    if finding["degenerate"]:
        return "degenerate"
    return "within" if finding["within_bound"] else "exceeds"


def verify_bounds(seed: int, report: VerifyReport, count: int = 50):
    rng = np.random.default_rng(seed)
    failures = []
    outcomes = {"within": 0, "exceeds": 0, "degenerate": 0}
    for i in range(count):
        problem = random_small_problem(rng, 6, 8)
        found = check_bounds_instance(problem)
        if found:
            failures.append({"instance": i, "problems": found})
        outcomes[soundness_outcome(problem)] += 1
    report.record(f"diagnostic ranges, dichotomy and ratio floor on {count} problems", not failures,
                  failures=failures)
    report.finding(f"greedy cost against indicative constrained bound on {count} problems", **outcomes)


def run_suite(suite: str, fixtures_dir: str, seed: int) -> VerifyReport:
    report = VerifyReport()
    if suite in ("fixtures", "all"):
        verify_fixtures(fixtures_dir, report)
    if suite in ("lemmas", "all"):
        verify_lemmas(seed, report)
    if suite in ("bounds", "all"):
        verify_bounds(seed, report)
    return report
