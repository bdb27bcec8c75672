"""Command-line entry point for the whole pipeline.

One subcommand per invocation; every stage reads the same config file and
derives all randomness from a single seed. Exit status 0 on success, 2 on
configuration or usage errors, 1 on unexpected runtime failure.
"""

import argparse
import logging
import os
import sys

from medoe.envs.base import ConfigError

log = logging.getLogger("medoe")

LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="medoe",
        description="Train sub-teams, compose them, and fine-tune with expertise-modulated PPO.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="experiment config file (YAML)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
        p.add_argument("--parallel-envs", type=int, default=None, help="override num_envs")
        p.add_argument("--budget", type=int, default=None, help="override the total step budget")

    p = sub.add_parser("train-source", help="train sub-teams on their source tasks")
    add_common(p)
    p.add_argument("--variant", default=None, help="train only this sub-team variant")

    p = sub.add_parser("train-classifier", help="fit expertise classifiers from source buffers")
    add_common(p)

    p = sub.add_parser("compose", help="list the composed teams for this config")
    add_common(p)

    p = sub.add_parser("run", help="run every configured baseline end to end")
    add_common(p)

    p = sub.add_parser("sweep", help="resample one boost multiplier and log AUCs")
    add_common(p)
    p.add_argument("--param", required=True, help="boost multiplier to vary")
    p.add_argument("--samples", type=int, default=1024, help="number of samples")

    p = sub.add_parser("eval-forgetting", help="replay a run's checkpoints on the source tasks")
    add_common(p)
    p.add_argument("--run", required=True, help="run directory with periodic checkpoints")

    p = sub.add_parser("auc", help="print the normalized area under a run log's return curve")
    p.add_argument("--log", required=True, help="run log CSV")

    p = sub.add_parser("render", help="print a short scripted playout as text frames")
    add_common(p)
    p.add_argument("--variant", default="target", help="task variant to render")
    p.add_argument("--steps", type=int, default=30, help="maximum steps to play")

    return parser


def _load(args):
    from medoe.harness.config import apply_overrides, load_config

    cfg = load_config(args.config)
    return apply_overrides(
        cfg,
        seed=args.seed,
        out_dir=args.out,
        budget=args.budget,
        parallel_envs=args.parallel_envs,
    )


def _cmd_train_source(args):
    from medoe.harness import experiment

    cfg = _load(args)
    variants = experiment.subteam_variants(cfg)
    if args.variant is not None:
        if args.variant not in variants:
            raise ConfigError(f"unknown variant {args.variant!r}; choose from {variants}")
        variants = (args.variant,)
    for variant in variants:
        for seed in cfg.sources.seeds:
            path = experiment.train_one_source(cfg, variant, seed, force=args.force)
            print(path)
    return 0


def _cmd_train_classifier(args):
    from medoe.harness import experiment

    cfg = _load(args)
    experiment.ensure_sources(cfg)
    for variant in experiment.subteam_variants(cfg):
        for seed in cfg.sources.seeds:
            path = experiment.train_classifiers_for(cfg, variant, seed, force=args.force)
            print(path)
    return 0


def _cmd_compose(args):
    from medoe.harness import experiment

    cfg = _load(args)
    for team in experiment.list_teams(cfg):
        seats = " ".join(f"{v}-s{s}#{i}" for v, s, i in team.seat_sources)
        print(f"{team.team_id}: {seats}")
    return 0


def _cmd_run(args):
    from medoe.harness import experiment

    cfg = _load(args)
    for path in experiment.run_experiment(cfg, force=args.force):
        print(path)
    return 0


def _cmd_sweep(args):
    from medoe.harness import sweep

    cfg = _load(args)
    print(sweep.run_sweep(cfg, args.param, args.samples, force=args.force))
    return 0


def _cmd_eval_forgetting(args):
    from medoe.harness import experiment

    cfg = _load(args)
    print(experiment.evaluate_forgetting(cfg, args.run))
    return 0


def _cmd_auc(args):
    from medoe.harness.runlog import auc_of_rows, read_run_log

    rows, _, _ = read_run_log(args.log)
    print(f"{auc_of_rows(rows):.6g}")
    return 0


def _render_chainball(cfg, variant, steps):
    from medoe import rng as medoe_rng
    from medoe.envs import chainball as cb
    from medoe.harness.experiment import build_tasks

    target, sources = build_tasks(cfg)
    task = target if variant == "target" else sources[variant]
    g = medoe_rng.stream(cfg.seed, "render", variant)
    state = task.restart
    n = task.n_states
    for t in range(steps):
        cells = ["."] * (n + 1)
        cells[0], cells[n] = "[", "]"
        cells[state] = "o"
        print(f"{t:3d} " + "".join(cells))
        actions = g.integers(0, task.spec.num_actions, size=task.spec.num_agents)
        state, reward, done = cb.chainball_step(task, state, actions, g)
        if done:
            print(f"    terminal, reward {reward:+.0f}")
            return
    print("    horizon reached")


def _render_kitchen(cfg, variant, steps):
    from medoe import rng as medoe_rng
    from medoe.envs import kitchen as kt

    g = medoe_rng.stream(cfg.seed, "render", variant)
    state = kt.reset_kitchen(variant, g)
    total = 0.0
    for t in range(steps):
        print(f"step {t}  held: {state.held[0] or '-'} / {state.held[1] or '-'}")
        print(kt.render_kitchen(state))
        actions = [kt.scripted_action(state, k) for k in range(2)]
        reward, done = kt.kitchen_step(state, actions)
        total += reward
        if done:
            print(kt.render_kitchen(state))
            print(f"done at step {t + 1}, team return {total:.3f}")
            return
    print(f"horizon reached, team return {total:.3f}")


def _cmd_render(args):
    cfg = _load(args)
    if cfg.env.name == "chainball":
        if args.variant not in ("target", "def", "att"):
            raise ConfigError(f"unknown variant {args.variant!r} for chainball")
        _render_chainball(cfg, args.variant, args.steps)
    else:
        if args.variant not in ("target", "left", "right"):
            raise ConfigError(f"unknown variant {args.variant!r} for kitchen")
        _render_kitchen(cfg, args.variant, args.steps)
    return 0


COMMANDS = {
    "train-source": _cmd_train_source,
    "train-classifier": _cmd_train_classifier,
    "compose": _cmd_compose,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "eval-forgetting": _cmd_eval_forgetting,
    "auc": _cmd_auc,
    "render": _cmd_render,
}


def main(argv=None):
    level_name = os.environ.get("MEDOE_LOG_LEVEL", "info")
    if level_name not in LOG_LEVELS:
        print(
            f"medoe: MEDOE_LOG_LEVEL must be one of {sorted(LOG_LEVELS)}, got {level_name!r}",
            file=sys.stderr,
        )
        return 2
    logging.basicConfig(
        level=LOG_LEVELS[level_name],
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.subcommand](args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"medoe: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
