"""Boost-sensitivity sweep: resample one boost multiplier log-uniformly,
rerun the adjustment stage, and record the area under the return curve."""

import csv
import logging
import os
import time
from dataclasses import replace

import numpy as np

from medoe import rng as medoe_rng
from medoe.envs.base import ConfigError
from medoe.harness.experiment import (
    build_tasks,
    compose_team,
    ensure_sources,
    expert_classifiers,
    list_teams,
)
from medoe.harness.runlog import compute_auc
from medoe.medoe import adjustment_train

log = logging.getLogger("medoe")

# log-uniform sampling ranges per sweepable multiplier
SWEEP_RANGES = {
    "temperature_boost": (0.5, 10.0),
    "entropy_boost": (1.0, 1000.0),
    "clip_boost": (1.0, 1000.0),
    "kl_boost": (1.0, 1000.0),
}


def sweep_values(parameter, num_samples, g):
    """Log-uniform draws from the parameter's range."""
    if parameter not in SWEEP_RANGES:
        raise ConfigError(
            f"unknown sweep parameter: {parameter}; choose from {sorted(SWEEP_RANGES)}"
        )
    lo, hi = SWEEP_RANGES[parameter]
    return np.exp(g.uniform(np.log(lo), np.log(hi), size=num_samples))


def sweep_sample(fixed_boosts, parameter, num_samples, g):
    """Boost configs equal to fixed_boosts except for one resampled multiplier."""
    values = sweep_values(parameter, num_samples, g)
    return [replace(fixed_boosts, **{parameter: float(v)}) for v in values]


def _sweep_arm(cfg, boost_cfg, team, seed):
    """Short adjustment run; returns the AUC of its return curve."""
    target, _ = build_tasks(cfg)
    policies, critics, source_steps, _ = compose_team(cfg, team)
    priors = [p.clone() for p in policies]
    classifiers = expert_classifiers(cfg, target, team)
    budget = cfg.adjustment.total_budget - source_steps
    if budget <= 0:
        raise ConfigError(
            f"total_budget {cfg.adjustment.total_budget} does not cover the "
            f"{source_steps} source steps"
        )
    steps, values = [], []

    def on_eval(point):
        steps.append(point.total_step)
        values.append(point.mean_return)
        return False

    adjustment_train(
        target, policies, critics, priors, classifiers, cfg.ppo, boost_cfg,
        budget, seed, f"sweep-{team.team_id}",
        cfg.adjustment.eval_every, cfg.adjustment.eval_episodes,
        on_eval=on_eval, step_offset=source_steps,
    )
    return compute_auc(np.asarray(steps, dtype=np.float64), np.asarray(values, dtype=np.float64))


def run_sweep(cfg, parameter, samples, force=False):
    """Sample the multiplier `samples` times and write one CSV of AUCs."""
    if parameter not in SWEEP_RANGES:
        # fail before any training happens, not after
        raise ConfigError(
            f"unknown sweep parameter: {parameter}; choose from {sorted(SWEEP_RANGES)}"
        )
    out = os.path.join(cfg.out_dir, "sweep")
    path = os.path.join(out, f"{parameter}.csv")
    if os.path.exists(path) and not force:
        raise ConfigError(f"{path} already exists; pass --force to overwrite")
    ensure_sources(cfg)
    os.makedirs(out, exist_ok=True)
    team = list_teams(cfg)[0]
    rows = []
    for i in range(samples):
        g = medoe_rng.stream(cfg.seed, "sweep", parameter, i)
        value = float(sweep_values(parameter, 1, g)[0])
        seed = cfg.adjustment.seeds[i % len(cfg.adjustment.seeds)]
        boost_cfg = replace(cfg.boosts, **{parameter: value})
        t0 = time.time()
        auc = _sweep_arm(cfg, boost_cfg, team, seed)
        rows.append((parameter, value, seed, auc))
        log.info(
            "sweep %s[%d/%d] value %.5g auc %.4f (%.1fs)",
            parameter, i + 1, samples, value, auc, time.time() - t0,
        )
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["parameter", "value", "seed", "auc"])
        for row in rows:
            writer.writerow([row[0], repr(row[1]), row[2], repr(row[3])])
    os.replace(tmp, path)
    return path
