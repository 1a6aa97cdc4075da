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
from functools import partial
from multiprocessing import Pool

import numpy as np
import pandas as pd

from contrast.callbacks import SweepRowWriter
from contrast.config import (
    SweepConfig,
    load_config,
    parse_arguments,
    resolve_learner_seed,
    resolve_seed,
    setup_logging,
)
from contrast.core import TeachingProblem
from contrast.data import SyntheticConfig, gen_synthetic, load_problem, save_problem, thm2_family
from contrast.diagnostics import DEFAULT_DEPTH_CAP, alpha_of_run, diagnose
from contrast.errors import ContrastError
from contrast.geometry import distance_frame
from contrast.learners import LearnerSpec
from contrast.oracles import EXACT_SOLVE_CAP, search_gbs_counterexample
from contrast.teaching import UNCONSTRAINED, ConstraintSpec, cost_of, run_session
from contrast.verify import REMARK_FIXTURE, run_suite

logger = logging.getLogger(__name__)

SWEEP_FIELDS = ["beta", "psi", "constraint", "target", "rounds", "labels_total", "terminated", "alpha",
                "seed", "learner"]
AL_ALONE = "AL"


def write_json(data: dict, out=None):
    text = json.dumps(data, indent=2, sort_keys=True)
    if out is None:
        print(text)
        return
    parent = os.path.dirname(out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        f.write(text + "\n")
    logger.info("wrote %s", out)


def load_problem_source(source: dict, seed: int) -> TeachingProblem:
    """Problem from ``{"path": ...}``, ``{"synthetic": {...}}`` or ``{"thm2": {"k_param": k}}``."""
    if "path" in source:
        problem = load_problem(source["path"])
    elif "synthetic" in source:
        generator = dict(source["synthetic"])
        generator.setdefault("seed", seed)
        problem = gen_synthetic(SyntheticConfig.from_dict(generator))
    elif "thm2" in source:
        problem, _ = thm2_family(int(source["thm2"].get("k_param", 1)))
    else:
        raise ContrastError(f"problem source needs one of 'path', 'synthetic' or 'thm2', got {sorted(source)}")
    if "target" in source:
        problem = problem.with_target(int(source["target"]))
    return problem


def make_learner(kind: str, beta: float = 1.0, seed: int = 0) -> LearnerSpec:
    if kind == "GBS":
        return LearnerSpec.gbs()
    if kind == "Random":
        return LearnerSpec.random(seed)
    return LearnerSpec.beta_greedy(beta, seed)


def task_seed(master: int, target: int, beta_index: int) -> int:
    return int(np.random.SeedSequence([master, target, beta_index]).generate_state(1, np.uint64)[0])


def _row(beta, psi, constraint_name, target, transcript, seed, learner_kind) -> dict:
    return {
        "beta": beta,
        "psi": psi,
        "constraint": constraint_name,
        "target": target,
        "rounds": len(transcript.rounds),
        "labels_total": transcript.total_examples,
        "terminated": transcript.terminated,
        "alpha": alpha_of_run(transcript),
        "seed": seed,
        "learner": learner_kind,
    }


def run_sweep_task(problem: TeachingProblem, config: SweepConfig, task) -> list:
    """All rows of one (beta, target) pair: AL alone, unconstrained teacher, then every constraint x psi cell."""
    beta_index, target = task
    beta = config.betas[beta_index]
    seed = task_seed(config.seed, target, beta_index)
    sub = problem.with_target(target)
    learner = make_learner(config.learner, beta, seed)

    rows = []
    alone = run_session(sub, learner, budget=config.budget, with_teacher=False)
    rows.append(_row(beta, "", AL_ALONE, target, alone, seed, config.learner))
    taught = run_session(sub, learner, UNCONSTRAINED, budget=config.budget)
    rows.append(_row(beta, "", UNCONSTRAINED.short_name, target, taught, seed, config.learner))
    for kind in config.constraints:
        for psi in config.psis:
            constraint = ConstraintSpec.parse(kind, psi)
            transcript = run_session(sub, learner, constraint, budget=config.budget)
            rows.append(_row(beta, psi, constraint.short_name, target, transcript, seed, config.learner))
    return rows


def run_sweep(problem: TeachingProblem, config: SweepConfig, writer=None) -> list:
    tasks = [(b, t) for b in range(len(config.betas)) for t in range(problem.hypothesis_count)]
    worker = partial(run_sweep_task, problem, config)
    logger.info("sweep: %d betas x %d targets on %d workers", len(config.betas), problem.hypothesis_count,
                config.n_jobs)
    if config.n_jobs == 1:
        results = [worker(task) for task in tasks]
    else:
        with Pool(config.n_jobs) as p:
            results = p.map(worker, tasks)

    rows = []
    for task_rows in results:
        for row in task_rows:
            if writer is not None:
                writer(row)
            rows.append(row)
    unfinished = sum(not r["terminated"] for r in rows)
    if unfinished:
        logger.warning("%d of %d runs hit the budget without isolating the target", unfinished, len(rows))
    return rows


def aggregate_rows(rows: list) -> pd.DataFrame:
    """Mean and standard error of the cost per (beta, constraint, psi) cell, over targets."""
    frame = pd.DataFrame(rows, columns=SWEEP_FIELDS)
    frame["psi"] = frame["psi"].astype(str)
    frame["terminated"] = frame["terminated"].astype(float)
    grouped = frame.groupby(["beta", "constraint", "psi"], sort=False)
    return grouped.agg(
        labels_mean=("labels_total", "mean"),
        labels_sem=("labels_total", "sem"),
        rounds_mean=("rounds", "mean"),
        rounds_sem=("rounds", "sem"),
        alpha_mean=("alpha", "mean"),
        terminated_frac=("terminated", "mean"),
        n=("target", "count"),
    ).reset_index()


def trend_violations(aggregate: pd.DataFrame, constraint: str = "C+F") -> list:
    """
    Per beta: the unconstrained teacher must not cost more than the learner
    alone, ``constraint`` must not cost more at the largest psi than at the
    smallest, and mean alpha may rise with psi at most once per constraint.
    """
    violations = []
    for beta, cells in aggregate.groupby("beta", sort=False):
        cost = cells[cells.psi == ""].set_index("constraint")["labels_mean"]
        if cost[UNCONSTRAINED.short_name] > cost[AL_ALONE]:
            violations.append(f"beta={beta}: teacher {cost[UNCONSTRAINED.short_name]:.3f} "
                              f"> learner alone {cost[AL_ALONE]:.3f}")
        for name, row in cells[cells.psi != ""].groupby("constraint", sort=False):
            row = row.assign(psi=row.psi.astype(float)).sort_values("psi")
            if name == constraint and row.labels_mean.iloc[-1] > row.labels_mean.iloc[0]:
                violations.append(f"beta={beta}: {name} costs {row.labels_mean.iloc[-1]:.3f} at psi="
                                  f"{row.psi.iloc[-1]} > {row.labels_mean.iloc[0]:.3f} at psi={row.psi.iloc[0]}")
            inversions = int((row.alpha_mean.diff() > 1e-9).sum())
            if inversions > 1:
                violations.append(f"beta={beta}: {name} alpha rises with psi {inversions} times")
    return violations


def replay_row(problem: TeachingProblem, row: dict):
    """Re-run the session a sweep row describes; returns the transcript."""
    sub = problem.with_target(int(row["target"]))
    learner = make_learner(row["learner"], float(row["beta"]), int(row["seed"]))
    if row["constraint"] == AL_ALONE:
        return run_session(sub, learner, with_teacher=False)
    if row["constraint"] == UNCONSTRAINED.short_name:
        return run_session(sub, learner, UNCONSTRAINED)
    name = row["constraint"]
    if name.startswith("Chain"):
        return run_session(sub, learner, ConstraintSpec("NeighborChain", radius=int(name[len("Chain"):])))
    return run_session(sub, learner, ConstraintSpec.parse(name, float(row["psi"])))


def setup_output_dir(config_path, out=None, default="exp_results"):
    cfg_name = os.path.splitext(os.path.basename(config_path))[0]
    results_dir = out or default
    os.makedirs(results_dir, exist_ok=True)
    return cfg_name, results_dir


def cmd_gen(args):
    config_data = load_config(args.config_path)
    seed = resolve_seed(args.seed, config_data)
    generator = dict(config_data.get("synthetic", config_data))
    generator["seed"] = seed
    problem = gen_synthetic(SyntheticConfig.from_dict(generator))
    out = args.out or config_data.get("out") or os.path.join(
        "exp_results", os.path.splitext(os.path.basename(args.config_path))[0] + "_problem.json")
    parent = os.path.dirname(out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    save_problem(problem, out, meta={"generator": "synthetic", "seed": seed})
    logger.info("wrote %s", out)
    return 0


def cmd_run(args):
    config_data = load_config(args.config_path)
    seed = resolve_seed(args.seed, config_data)
    problem = load_problem_source(config_data["problem"], seed)
    learner = LearnerSpec.from_dict({**config_data.get("learner", {}),
                                     "seed": resolve_learner_seed(args.seed, config_data)})
    constraint = ConstraintSpec.from_dict(config_data.get("constraint", {}))
    costs = config_data.get("costs")
    transcript = run_session(
        problem, learner, constraint,
        budget=config_data.get("budget"),
        with_teacher=config_data.get("with_teacher", True),
        costs=costs,
    )
    data = transcript.to_dict()
    data["cost"] = cost_of(transcript, costs)
    data["learner"] = learner.to_dict()
    data["constraint"] = constraint.to_dict()
    data["target"] = problem.target
    write_json(data, args.out)
    return 0


def cmd_sweep(args):
    config_data = load_config(args.config_path)
    seed = resolve_seed(args.seed, config_data)
    config = SweepConfig.from_dict(config_data, seed, n_jobs=args.jobs, output_dir=args.out)
    problem = load_problem_source(config.problem, seed)
    cfg_name, results_dir = setup_output_dir(args.config_path, config.output_dir)

    runs_csv = os.path.join(results_dir, f"{cfg_name}_runs.csv")
    writer = SweepRowWriter(runs_csv, SWEEP_FIELDS)
    rows = run_sweep(problem, config, writer)
    aggregate = aggregate_rows(rows)
    aggregate_csv = os.path.join(results_dir, f"{cfg_name}_aggregate.csv")
    aggregate.to_csv(aggregate_csv, index=False, float_format="%.6f")
    logger.info("wrote %d runs to %s and %d cells to %s", writer.rows_written, runs_csv, len(aggregate),
                aggregate_csv)
    for violation in trend_violations(aggregate):
        logger.warning("trend: %s", violation)
    return 0


def cmd_diagnose(args):
    config_data = load_config(args.config_path)
    seed = resolve_seed(args.seed, config_data)
    problem = load_problem_source(config_data["problem"], seed)
    learner = LearnerSpec.from_dict({**config_data.get("learner", {}),
                                     "seed": resolve_learner_seed(args.seed, config_data)})
    constraint = ConstraintSpec.from_dict(config_data.get("constraint", {}))
    report = diagnose(
        problem, learner, constraint,
        depth_cap=config_data.get("depth_cap", DEFAULT_DEPTH_CAP),
        cap=config_data.get("exact_cap", EXACT_SOLVE_CAP),
        sample=config_data.get("sample"),
        seed=seed,
    )
    table = pd.Series({k: v for k, v in report.to_dict().items() if k != "notes"}, name="value")
    print(table.to_string(), file=sys.stderr)
    write_json(report.to_dict(), args.out)

    distances_csv = config_data.get("distances_csv")
    if distances_csv:
        if os.path.dirname(distances_csv):
            os.makedirs(os.path.dirname(distances_csv), exist_ok=True)
        distance_frame(problem).to_csv(distances_csv)
        logger.info("wrote %s", distances_csv)
    return 0


def cmd_verify(args):
    seed = resolve_seed(args.seed)
    report = run_suite(args.suite, args.fixtures_dir, seed)
    write_json(report.to_dict(), args.out)
    if not report.passed:
        failed = [c["name"] for c in report.checks if not c["passed"]]
        print(f"ERROR: verify {args.suite} failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_fixtures(args):
    os.makedirs(args.fixtures_dir, exist_ok=True)
    problem, constraint = thm2_family(args.k)
    path = os.path.join(args.fixtures_dir, f"thm2_k{args.k}.json")
    save_problem(problem, path, meta={"k_param": args.k, "constraint": constraint.to_dict()})
    logger.info("wrote %s", path)

    if args.search:
        seed = resolve_seed(args.seed)
        found, report = search_gbs_counterexample(seed=seed)
        if found is None:
            logger.warning("counterexample search exhausted after %d trials", report.trials)
            return 1
        meta = {"learner": "GBS", "al_alone_labels": report.al_alone.total_examples,
                "al_teacher_labels": report.al_teacher.total_examples, "search": report.search_params()}
        path = os.path.join(args.fixtures_dir, REMARK_FIXTURE)
        save_problem(found, path, meta=meta)
        logger.info("wrote %s", path)
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "diagnose": cmd_diagnose,
    "verify": cmd_verify,
    "fixtures": cmd_fixtures,
}


def main(argv=None):
    args = parse_arguments(argv)
    setup_logging(args.debug)
    try:
        return COMMANDS[args.command](args)
    except ContrastError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
