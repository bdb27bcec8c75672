"""Experiment orchestration: source stages, team composition, adjustment
runs, and forgetting evaluation.

Artifact layout under the config's out_dir:

    sources/<variant>-s<seed>/agent<k>.{actor,critic,buffer}.ckpt + meta.json
    classifiers/<variant>-s<seed>/agent<k>.classifier.ckpt + meta.json
    runs/<baseline>/<team_id>-s<seed>/log.csv + manifest.json + final ckpts

Teams are the cross product of the source seeds of the two sub-team
variants; each team is fine-tuned once per adjustment seed. Every baseline
gets the same total-step budget: composed baselines start their logs at the
summed source step count and train for the remainder.
"""

import json
import logging
import os
import shutil
import time

import numpy as np

from medoe import checkpoint
from medoe import rng as medoe_rng
from medoe.boosts import BoostConfig, constant_boosts
from medoe.doe import (
    ConstantDoE,
    ExpertChainballDoE,
    ExpertKitchenDoE,
    LearnedDoE,
    build_dataset,
    train_classifier,
)
from medoe.envs import chainball as cb
from medoe.envs import kitchen as kt
from medoe.envs.base import ConfigError
from medoe.funcapprox import Critic, Policy
from medoe.harness.runlog import RunRow, write_run_log
from medoe.medoe import adjustment_train
from medoe.ppo import build_team, mean_ci95, train_source_stage
from medoe.rollout import evaluate_team

log = logging.getLogger("medoe")


# ── tasks ──

def build_tasks(cfg):
    """Target task plus the two sub-team source tasks, keyed by variant."""
    env = cfg.env
    if env.name == "chainball":
        tables = cb.generate_target_tables(
            env.n_states, medoe_rng.stream(env.instance_seed, "chainball-tables")
        )
        target = cb.make_target_task(tables, horizon=env.horizon)
        sources = {
            "def": cb.make_source_task(
                tables, "def", medoe_rng.stream(env.instance_seed, "chainball-tables", "def"),
                horizon=env.horizon, s_def=env.s_def, s_att=env.s_att,
            ),
            "att": cb.make_source_task(
                tables, "att", medoe_rng.stream(env.instance_seed, "chainball-tables", "att"),
                horizon=env.horizon, s_def=env.s_def, s_att=env.s_att,
            ),
        }
        return target, sources
    target = kt.make_kitchen_task("target", horizon=env.horizon)
    sources = {
        "left": kt.make_kitchen_task("left", horizon=env.horizon),
        "right": kt.make_kitchen_task("right", horizon=env.horizon),
    }
    return target, sources


def subteam_variants(cfg):
    return ("def", "att") if cfg.env.name == "chainball" else ("left", "right")


def subteam_slots(cfg, variant):
    """Target seats filled by this sub-team's agents."""
    if cfg.env.name == "chainball":
        return (0, 1) if variant == "def" else (2, 3)
    return (0,) if variant == "left" else (1,)


def known_source_max(cfg, task):
    if cfg.env.name == "chainball":
        return cb.optimal_policy_value(task)
    return 1.0  # scripted play banks the full source reward


# ── source stage ──

def source_dir(cfg, variant, seed):
    return os.path.join(cfg.out_dir, "sources", f"{variant}-s{seed}")


def train_one_source(cfg, variant, seed, force=False, budget_cap=None):
    out = source_dir(cfg, variant, seed)
    meta_path = os.path.join(out, "meta.json")
    if os.path.exists(meta_path):
        if not force:
            return out
        shutil.rmtree(out)
    _, sources = build_tasks(cfg)
    task = sources[variant]
    scope = f"source-{variant}"
    known_max = known_source_max(cfg, task)
    t0 = time.time()
    # kl is zero here: sources train fresh, so there is no prior to anchor to
    source_boosts = constant_boosts(
        cfg.boosts.temperature_base, cfg.ppo.entropy_coef, cfg.ppo.clip_coef, 0.0
    )
    result = train_source_stage(
        task,
        cfg.ppo,
        source_boosts,
        seed,
        scope,
        budget_cap if budget_cap is not None else cfg.sources.budget_cap,
        cfg.sources.eval_every,
        cfg.sources.buffer_capacity,
        known_max,
        eval_episodes=cfg.sources.eval_episodes,
    )
    # the reference eval reused by every later forgetting check
    final_returns, _ = evaluate_team(
        task, result.policies, cfg.sources.eval_episodes,
        cfg.boosts.temperature_base, seed, scope, "eval-final",
    )
    final_mean, final_ci = mean_ci95(final_returns)
    os.makedirs(out, exist_ok=True)
    for k in range(task.spec.num_agents):
        checkpoint.save_net(os.path.join(out, f"agent{k}.actor.ckpt"), result.policies[k].net, "actor")
        checkpoint.save_net(os.path.join(out, f"agent{k}.critic.ckpt"), result.critics[k].net, "critic")
        checkpoint.save_checkpoint(
            os.path.join(out, f"agent{k}.buffer.ckpt"),
            "buffer",
            {"obs": result.buffers[k].view()},
            {"capacity": cfg.sources.buffer_capacity},
        )
    meta = {
        "variant": variant,
        "seed": seed,
        "steps": result.total_steps,
        "converged": result.converged,
        "known_max": known_max,
        "final_return": final_mean,
        "final_ci95": final_ci,
        "wall_seconds": round(time.time() - t0, 3),
        "history": [[p.total_step, p.mean_return, p.ci95] for p in result.history],
    }
    with open(meta_path, "w") as f:
        json.dump(meta, f, indent=1, sort_keys=True)
    log.info("source %s seed %s: %s steps, final %.4f", variant, seed, result.total_steps, final_mean)
    return out


def ensure_sources(cfg, force=False):
    for variant in subteam_variants(cfg):
        for seed in cfg.sources.seeds:
            train_one_source(cfg, variant, seed, force=force)


def load_source(cfg, variant, seed):
    out = source_dir(cfg, variant, seed)
    meta_path = os.path.join(out, "meta.json")
    if not os.path.exists(meta_path):
        raise ConfigError(f"missing source checkpoint {out}; run train-source first")
    with open(meta_path) as f:
        meta = json.load(f)
    _, sources = build_tasks(cfg)
    task = sources[variant]
    policies, critics, buffers = [], [], []
    for k in range(task.spec.num_agents):
        actor_net, _ = checkpoint.load_net(os.path.join(out, f"agent{k}.actor.ckpt"), "actor")
        critic_net, _ = checkpoint.load_net(os.path.join(out, f"agent{k}.critic.ckpt"), "critic")
        policies.append(Policy(actor_net, task.spec.num_actions))
        critics.append(Critic(critic_net))
        _, arrays, _ = checkpoint.load_checkpoint(os.path.join(out, f"agent{k}.buffer.ckpt"))
        buffers.append(arrays["obs"])
    return policies, critics, buffers, meta


# ── classifier stage ──

def classifier_dir(cfg, variant, seed):
    return os.path.join(cfg.out_dir, "classifiers", f"{variant}-s{seed}")


def train_classifiers_for(cfg, variant, seed, force=False):
    """Fit one expertise classifier per agent of this source, using the other
    variant's buffers (matched seed) as negatives."""
    out = classifier_dir(cfg, variant, seed)
    meta_path = os.path.join(out, "meta.json")
    if os.path.exists(meta_path):
        if not force:
            return out
        shutil.rmtree(out)
    variants = subteam_variants(cfg)
    other = variants[1] if variant == variants[0] else variants[0]
    _, _, own_buffers, _ = load_source(cfg, variant, seed)
    _, _, other_buffers, _ = load_source(cfg, other, seed)
    os.makedirs(out, exist_ok=True)
    bces = []
    for k, own in enumerate(own_buffers):
        g = medoe_rng.stream(seed, "classifier", variant, k)
        dataset = build_dataset(own, other_buffers, g, cfg.classifier.test_fraction)
        clf, bce = train_classifier(
            dataset, g,
            hidden=cfg.classifier.hidden,
            lr=cfg.classifier.lr,
            batch_size=cfg.classifier.batch_size,
            epochs=cfg.classifier.epochs,
        )
        checkpoint.save_net(os.path.join(out, f"agent{k}.classifier.ckpt"), clf.net, "classifier")
        bces.append(bce)
        log.info("classifier %s seed %s agent %s: held-out bce %.4f", variant, seed, k, bce)
    with open(meta_path, "w") as f:
        json.dump({"variant": variant, "seed": seed, "test_bce": bces}, f, indent=1, sort_keys=True)
    return out


def ensure_classifiers(cfg, force=False):
    for variant in subteam_variants(cfg):
        for seed in cfg.sources.seeds:
            train_classifiers_for(cfg, variant, seed, force=force)


def load_classifier(cfg, variant, seed, agent):
    path = os.path.join(classifier_dir(cfg, variant, seed), f"agent{agent}.classifier.ckpt")
    if not os.path.exists(path):
        raise ConfigError(f"missing classifier checkpoint {path}; run train-classifier first")
    net, _ = checkpoint.load_net(path, "classifier")
    return LearnedDoE(net)


# ── composition ──

class TeamSpec:
    def __init__(self, team_id, seat_sources):
        self.team_id = team_id
        # seat_sources: per target seat, (variant, source_seed, source_agent_idx)
        self.seat_sources = seat_sources


FULL_SCALE_SEEDS = 4


def compose_teams(env_name, first_seeds, second_seeds, allow_reduced=False):
    """Full cross product of sub-team source seeds.

    The reference protocol pairs 4 seeds per source; smaller desk-scale
    pairings must be opted into.
    """
    if not allow_reduced:
        for side, seeds in (("first", first_seeds), ("second", second_seeds)):
            if len(seeds) != FULL_SCALE_SEEDS:
                raise ConfigError(
                    f"{side} sub-team has {len(seeds)} source seeds; the full protocol "
                    f"pairs {FULL_SCALE_SEEDS} per side (pass allow_reduced for desk-scale runs)"
                )
    teams = []
    for sa in first_seeds:
        for sb in second_seeds:
            if env_name == "chainball":
                seats = [("def", sa, 0), ("def", sa, 1), ("att", sb, 0), ("att", sb, 1)]
                team_id = f"d{sa}a{sb}"
            else:
                seats = [("left", sa, 0), ("right", sb, 1)]
                team_id = f"l{sa}r{sb}"
            teams.append(TeamSpec(team_id, seats))
    return teams


def list_teams(cfg):
    """Teams implied by the config's source seed list (desk scale allowed)."""
    return compose_teams(cfg.env.name, cfg.sources.seeds, cfg.sources.seeds, allow_reduced=True)


def compose_team(cfg, team):
    """Load the seat policies/critics for a team; returns
    (policies, critics, source_steps, per-seat metadata)."""
    cache = {}
    policies, critics, seat_meta = [], [], []
    used = {}
    for variant, seed, idx in team.seat_sources:
        key = (variant, seed)
        if key not in cache:
            cache[key] = load_source(cfg, variant, seed)
        pol, cri, _, meta = cache[key]
        policies.append(pol[idx].clone())
        critics.append(cri[idx].clone())
        seat_meta.append({"variant": variant, "seed": seed, "agent": idx, "steps": meta["steps"]})
        used[key] = meta["steps"]
    source_steps = int(sum(used.values()))
    return policies, critics, source_steps, seat_meta


def expert_classifiers(cfg, target, team):
    if cfg.env.name == "chainball":
        return [ExpertChainballDoE(target, slot) for slot in range(4)]
    return [ExpertKitchenDoE(variant) for variant, _, _ in team.seat_sources]


def learned_classifiers(cfg, team):
    return [load_classifier(cfg, variant, seed, idx) for variant, seed, idx in team.seat_sources]


# ── adjustment runs ──

def run_dir(cfg, baseline, team_id, seed):
    return os.path.join(cfg.out_dir, "runs", baseline, f"{team_id}-s{seed}")


def _baseline_setup(cfg, baseline, target, team):
    """Resolve (policies, critics, priors, classifiers, boost_cfg,
    source_steps, seat_meta) for one baseline run."""
    ppo_cfg = cfg.ppo
    if baseline == "from-scratch":
        return None  # handled by the caller; nothing to compose
    policies, critics, source_steps, seat_meta = compose_team(cfg, team)
    priors = [p.clone() for p in policies]
    if baseline == "pre-skilled-BP":
        classifiers = [ConstantDoE(1.0) for _ in policies]
        boost_cfg = constant_boosts(
            cfg.boosts.temperature_base, ppo_cfg.entropy_coef, ppo_cfg.clip_coef, ppo_cfg.kl_coef
        )
    elif baseline == "pre-skilled-no-BP":
        classifiers = [ConstantDoE(1.0) for _ in policies]
        boost_cfg = constant_boosts(
            cfg.boosts.temperature_base, ppo_cfg.entropy_coef, ppo_cfg.clip_coef, 0.0
        )
        priors = None
    elif baseline == "medoe-expert":
        classifiers = expert_classifiers(cfg, target, team)
        boost_cfg = cfg.boosts
    elif baseline == "medoe-expert-no-BP":
        classifiers = expert_classifiers(cfg, target, team)
        boost_cfg = BoostConfig(
            temperature_base=cfg.boosts.temperature_base,
            entropy_base=cfg.boosts.entropy_base,
            clip_base=cfg.boosts.clip_base,
            kl_base=0.0,
            temperature_boost=cfg.boosts.temperature_boost,
            entropy_boost=cfg.boosts.entropy_boost,
            clip_boost=cfg.boosts.clip_boost,
            kl_boost=cfg.boosts.kl_boost,
        )
        priors = None
    elif baseline == "medoe-mlp":
        classifiers = learned_classifiers(cfg, team)
        boost_cfg = cfg.boosts
    else:
        raise ConfigError(f"unknown baseline: {baseline}")
    return policies, critics, priors, classifiers, boost_cfg, source_steps, seat_meta


def _forgetting_reference(cfg, sources, team):
    """Per sub-team (task, source seed, checkpoint return) references."""
    refs = []
    seen = []
    for variant, seed, _ in team.seat_sources:
        key = (variant, seed)
        if key in seen:
            continue
        seen.append(key)
        _, _, _, meta = load_source(cfg, variant, seed)
        refs.append((variant, seed, sources[variant], meta["final_return"]))
    return refs


def forgetting_returns(cfg, team, policies, refs):
    """Each sub-team's current mean return on its own source task.

    Reuses the source stage's final-eval episode stream, so unchanged
    policies reproduce the checkpointed return exactly.
    """
    out = []
    for variant, src_seed, src_task, _ in refs:
        slots = subteam_slots(cfg, variant)
        sub = [policies[s] for s in slots]
        if len(sub) < src_task.spec.num_agents:
            # single-seat sub-team: partner with its frozen source mate
            pol, _, _, _ = load_source(cfg, variant, src_seed)
            idx = team.seat_sources[slots[0]][2]
            full = list(pol)
            full[idx] = sub[0]
            sub = full
        returns, _ = evaluate_team(
            src_task, sub, cfg.sources.eval_episodes,
            cfg.boosts.temperature_base, src_seed, f"source-{variant}", "eval-final",
        )
        out.append(float(returns.mean()))
    return out


def run_one(cfg, baseline, team, seed, force=False):
    """One adjustment run; writes log.csv and manifest.json, returns the dir."""
    out = run_dir(cfg, baseline, team.team_id, seed)
    log_path = os.path.join(out, "log.csv")
    if os.path.exists(log_path):
        if not force:
            raise ConfigError(f"{log_path} already exists; pass --force to overwrite")
        shutil.rmtree(out)
    os.makedirs(out, exist_ok=True)
    target, sources = build_tasks(cfg)
    total_budget = cfg.adjustment.total_budget
    K = target.spec.num_agents
    variants = subteam_variants(cfg)

    if baseline == "from-scratch":
        policies, critics = build_team(target, cfg.ppo, seed, f"scratch-{team.team_id}")
        priors = None
        classifiers = [ConstantDoE(1.0) for _ in range(K)]
        boost_cfg = constant_boosts(
            cfg.boosts.temperature_base, cfg.ppo.entropy_coef, cfg.ppo.clip_coef, 0.0
        )
        source_steps = 0
        seat_meta = []
    else:
        setup = _baseline_setup(cfg, baseline, target, team)
        policies, critics, priors, classifiers, boost_cfg, source_steps, seat_meta = setup
    budget = total_budget - source_steps
    if budget <= 0:
        raise ConfigError(
            f"total_budget {total_budget} does not cover the {source_steps} source steps"
        )

    log_doe = baseline.startswith("medoe")
    forget_refs = None
    if cfg.adjustment.forgetting_eval and baseline != "from-scratch":
        forget_refs = _forgetting_reference(cfg, sources, team)

    rows = []
    run_id = f"{baseline}/{team.team_id}/s{seed}"

    def on_eval(point):
        source_returns = None
        if forget_refs is not None:
            source_returns = forgetting_returns(cfg, team, policies, forget_refs)
        if cfg.adjustment.checkpoint_evals:
            pdir = os.path.join(out, f"point-{point.total_step:09d}")
            os.makedirs(pdir, exist_ok=True)
            for k in range(K):
                checkpoint.save_net(
                    os.path.join(pdir, f"agent{k}.actor.ckpt"), policies[k].net, "actor"
                )
        rows.append(
            RunRow(
                run_id=run_id,
                baseline=baseline,
                env=cfg.env.name,
                team_id=team.team_id,
                seed=seed,
                total_step=point.total_step,
                mean_return=point.mean_return,
                ci95=point.ci95,
                doe_rates=None if not log_doe else list(point.doe_rates),
                source_returns=source_returns,
            )
        )
        return False

    t0 = time.time()
    result = adjustment_train(
        target, policies, critics, priors, classifiers, cfg.ppo, boost_cfg,
        budget, seed, f"adjust-{baseline}-{team.team_id}",
        cfg.adjustment.eval_every, cfg.adjustment.eval_episodes,
        on_eval=on_eval, step_offset=source_steps,
    )
    write_run_log(log_path, rows, K, len(variants))
    for k in range(K):
        checkpoint.save_net(os.path.join(out, f"agent{k}.actor.ckpt"), result.policies[k].net, "actor")
        checkpoint.save_net(os.path.join(out, f"agent{k}.critic.ckpt"), result.critics[k].net, "critic")
    manifest = {
        "run_id": run_id,
        "baseline": baseline,
        "team_id": team.team_id,
        "seed": seed,
        "env": cfg.env.name,
        "source_steps": source_steps,
        "adjustment_budget": budget,
        "total_budget": total_budget,
        "seats": seat_meta,
        "final_return": rows[-1].mean_return if rows else None,
        "wall_seconds": round(time.time() - t0, 3),
    }
    with open(os.path.join(out, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
    log.info("run %s: final %.4f (%.1fs)", run_id, manifest["final_return"], manifest["wall_seconds"])
    return out


def run_experiment(cfg, force=False):
    """All configured baselines x teams x adjustment seeds."""
    needs_sources = any(b != "from-scratch" for b in cfg.baselines)
    if needs_sources:
        ensure_sources(cfg)
    if "medoe-mlp" in cfg.baselines:
        ensure_classifiers(cfg)
    out_paths = []
    for baseline in cfg.baselines:
        for team in list_teams(cfg):
            for seed in cfg.adjustment.seeds:
                out_paths.append(run_one(cfg, baseline, team, seed, force=force))
    return out_paths


def evaluate_forgetting(cfg, run_path):
    """Replay a finished run's periodic checkpoints on the source tasks and
    fill the log's source-return columns in place."""
    from medoe.harness.runlog import read_run_log

    manifest_path = os.path.join(run_path, "manifest.json")
    if not os.path.exists(manifest_path):
        raise ConfigError(f"{run_path} has no manifest.json; point --run at a run directory")
    with open(manifest_path) as f:
        manifest = json.load(f)
    if manifest["baseline"] == "from-scratch":
        raise ConfigError("forgetting evaluation does not apply to from-scratch runs")
    team = TeamSpec(
        manifest["team_id"],
        [(s["variant"], s["seed"], s["agent"]) for s in manifest["seats"]],
    )
    target, sources = build_tasks(cfg)
    refs = _forgetting_reference(cfg, sources, team)
    log_path = os.path.join(run_path, "log.csv")
    rows, num_agents, num_subteams = read_run_log(log_path)
    for row in rows:
        pdir = os.path.join(run_path, f"point-{row.total_step:09d}")
        if not os.path.isdir(pdir):
            raise ConfigError(
                f"missing {pdir}; rerun with adjustment.checkpoint_evals: true"
            )
        policies = []
        for k in range(num_agents):
            net, _ = checkpoint.load_net(os.path.join(pdir, f"agent{k}.actor.ckpt"), "actor")
            policies.append(Policy(net, target.spec.num_actions))
        row.source_returns = forgetting_returns(cfg, team, policies, refs)
    write_run_log(log_path, rows, num_agents, num_subteams)
    return log_path
