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
import sys
import json
import logging
import argparse
from dataclasses import dataclass, field
from typing import Optional

SEED_ENV = "TEACH_SEED"
LOG_FORMAT = "%(asctime)s [%(name)s] %(levelname)s %(message)s"


def parse_arguments(argv=None):
    parser = argparse.ArgumentParser(description="Teaching active version-space learners with contrastive examples")
    parser.add_argument("--debug", action="store_true", help="Verbose per-round logging")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a synthetic problem file")
    gen.add_argument("config_path", help="Path to JSON generator config file")
    gen.add_argument("--seed", type=int, help=f"Generator seed (overrides ${SEED_ENV} and the config)")
    gen.add_argument("--out", help="Output problem file")

    run = sub.add_parser("run", help="Run one session and write its transcript")
    run.add_argument("config_path", help="Path to JSON run config file")
    run.add_argument("--seed", type=int, help="Learner seed")
    run.add_argument("--out", help="Output transcript file (stdout when omitted)")

    sweep = sub.add_parser("sweep", help="Run a beta / psi / constraint sweep over all targets")
    sweep.add_argument("config_path", help="Path to JSON sweep config file")
    sweep.add_argument("--seed", type=int, help="Master seed")
    sweep.add_argument("--jobs", type=int, help="Worker processes")
    sweep.add_argument("--out", help="Output directory")

    diagnose = sub.add_parser("diagnose", help="Compute alpha, rho_g, gamma_g, c*, k and bounds")
    diagnose.add_argument("config_path", help="Path to JSON diagnose config file")
    diagnose.add_argument("--seed", type=int, help="Seed for sampled mode and learners")
    diagnose.add_argument("--out", help="Output report file (stdout when omitted)")

    verify = sub.add_parser("verify", help="Replay fixtures and check the optimum sandwich and bound properties")
    verify.add_argument("suite", choices=["fixtures", "lemmas", "bounds", "all"])
    verify.add_argument("--fixtures-dir", default="fixtures")
    verify.add_argument("--seed", type=int, help="Seed of the random property instances")
    verify.add_argument("--out", help="Output report file")

    fixtures = sub.add_parser("fixtures", help="Write pinned fixture files")
    fixtures.add_argument("--fixtures-dir", default="fixtures")
    fixtures.add_argument("--k", type=int, default=1, help="Adversarial family parameter")
    fixtures.add_argument("--search", action="store_true", help="Also run the GBS counterexample search")
    fixtures.add_argument("--seed", type=int, help="Search seed")
    return parser.parse_args(argv)


def load_config(config_path):
    if not os.path.isfile(config_path):
        print(f"ERROR: Config file not found: {config_path}", file=sys.stderr)
        sys.exit(1)
    with open(config_path, "r") as f:
        return json.load(f)


def setup_logging(debug=False):
    logging.basicConfig(level=logging.DEBUG if debug else logging.INFO, format=LOG_FORMAT, stream=sys.stderr)


def resolve_seed(flag_seed: Optional[int], config_data: Optional[dict] = None) -> int:
    """--seed flag, then $TEACH_SEED, then the config's ``seed``, then 0."""
    if flag_seed is not None:
        return int(flag_seed)
    env = os.environ.get(SEED_ENV)
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError:
            print(f"ERROR: {SEED_ENV} must be an integer, got {env!r}", file=sys.stderr)
            sys.exit(1)
    return int((config_data or {}).get("seed", 0))


def resolve_learner_seed(flag_seed: Optional[int], config_data: dict) -> int:
    """Like resolve_seed, but ``learner.seed`` wins over the top-level ``seed``."""
    learner = config_data.get("learner") or {}
    if "seed" in learner:
        return resolve_seed(flag_seed, {"seed": learner["seed"]})
    return resolve_seed(flag_seed, config_data)


@dataclass
class SweepConfig:
    problem: dict
    betas: list = field(default_factory=lambda: [1, 5, 10, 100, 1000])
    psis: list = field(default_factory=lambda: [0.1, 0.25, 0.5, 0.75, 1.0])
    constraints: list = field(default_factory=lambda: ["C", "F", "C+F"])
    learner: str = "BetaGreedy"
    budget: Optional[int] = None
    seed: int = 0
    n_jobs: int = 1
    output_dir: str = "exp_results"

    def __post_init__(self):
        if not self.betas or not self.psis or not self.constraints:
            raise ValueError("betas, psis and constraints must be non-empty")
        if any(b < 1 for b in self.betas):
            raise ValueError(f"every beta must be >= 1, got {self.betas}")
        if any(not 0 < p <= 1 for p in self.psis):
            raise ValueError(f"every psi must lie in (0, 1], got {self.psis}")
        if self.n_jobs < 1:
            raise ValueError(f"n_jobs must be >= 1, got {self.n_jobs}")

    @classmethod
    def from_dict(cls, config_data: dict, seed: int, n_jobs: Optional[int] = None, output_dir: Optional[str] = None):
        return cls(
            problem=config_data["problem"],
            betas=[float(b) for b in config_data.get("betas", [1, 5, 10, 100, 1000])],
            psis=[float(p) for p in config_data.get("psis", [0.1, 0.25, 0.5, 0.75, 1.0])],
            constraints=list(config_data.get("constraints", ["C", "F", "C+F"])),
            learner=config_data.get("learner", "BetaGreedy"),
            budget=config_data.get("budget"),
            seed=seed,
            n_jobs=int(n_jobs if n_jobs is not None else config_data.get("n_jobs", 1)),
            output_dir=output_dir or config_data.get("output_dir", "exp_results"),
        )
