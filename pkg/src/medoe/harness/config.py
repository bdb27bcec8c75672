"""Declarative experiment configuration loaded from YAML.

Every hyperparameter keeps its conventional name so a config file reads like
the settings table it came from. Unknown keys are errors: a typo must never
silently fall back to a default.
"""

from dataclasses import dataclass, field, fields, replace

import yaml

from medoe.boosts import BoostConfig
from medoe.envs.base import ConfigError
from medoe.ppo import PPOConfig

BASELINES = (
    "from-scratch",
    "pre-skilled-BP",
    "pre-skilled-no-BP",
    "medoe-expert",
    "medoe-expert-no-BP",
    "medoe-mlp",
)


@dataclass(frozen=True)
class EnvConfig:
    name: str = "chainball"
    n_states: int = 11
    horizon: int = 90
    s_att: int = 6
    s_def: int = 6
    instance_seed: int = 0

    def __post_init__(self):
        if self.name not in ("chainball", "overcooked"):
            raise ConfigError(f"env.name must be chainball or overcooked, got {self.name!r}")
        if self.name == "chainball" and self.n_states < 5:
            raise ConfigError("env.n_states must be at least 5")


@dataclass(frozen=True)
class SourcesConfig:
    seeds: tuple = (0, 1)
    budget_cap: int = 120000
    eval_every: int = 4000
    eval_episodes: int = 100
    buffer_capacity: int = 40000

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("sources.seeds must not be empty")
        if self.budget_cap < 1 or self.eval_every < 1:
            raise ConfigError("sources budgets must be positive")


@dataclass(frozen=True)
class ClassifierConfig:
    hidden: int = 128
    lr: float = 1e-2
    batch_size: int = 512
    epochs: int = 1
    test_fraction: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("classifier.test_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class AdjustmentConfig:
    total_budget: int = 500000
    eval_every: int = 25000
    eval_episodes: int = 100
    seeds: tuple = (0, 1)
    forgetting_eval: bool = False
    checkpoint_evals: bool = False

    def __post_init__(self):
        if self.total_budget < 1 or self.eval_every < 1:
            raise ConfigError("adjustment budgets must be positive")
        if not self.seeds:
            raise ConfigError("adjustment.seeds must not be empty")


@dataclass(frozen=True)
class ExperimentConfig:
    out_dir: str = "runs"
    seed: int = 0
    baselines: tuple = ("medoe-expert", "pre-skilled-BP", "from-scratch")
    env: EnvConfig = field(default_factory=EnvConfig)
    ppo: PPOConfig = field(default_factory=PPOConfig)
    boosts: BoostConfig = field(default_factory=BoostConfig)
    sources: SourcesConfig = field(default_factory=SourcesConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    adjustment: AdjustmentConfig = field(default_factory=AdjustmentConfig)

    def __post_init__(self):
        for b in self.baselines:
            if b not in BASELINES:
                raise ConfigError(f"unknown baseline {b!r}; expected one of {BASELINES}")


_SECTIONS = {
    "env": EnvConfig,
    "ppo": PPOConfig,
    "boosts": BoostConfig,
    "sources": SourcesConfig,
    "classifier": ClassifierConfig,
    "adjustment": AdjustmentConfig,
}


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a mapping")
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown key in {where}: {sorted(unknown)[0]!r}")
    coerced = {}
    for key, value in data.items():
        if isinstance(value, list):
            value = tuple(value)
        coerced[key] = value
    try:
        return cls(**coerced)
    except TypeError as e:
        raise ConfigError(f"bad value in {where}: {e}") from e


def load_config(path):
    with open(path) as f:
        raw = yaml.safe_load(f)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    top = {}
    for key, value in raw.items():
        if key in _SECTIONS:
            top[key] = _build(_SECTIONS[key], value, key)
        elif key in ("out_dir", "seed", "baselines"):
            top[key] = tuple(value) if isinstance(value, list) else value
        else:
            raise ConfigError(f"unknown key in {path}: {key!r}")
    return ExperimentConfig(**top)


def apply_overrides(cfg, seed=None, out_dir=None, budget=None, parallel_envs=None):
    """Command-line overrides on top of a loaded config."""
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    if out_dir is not None:
        cfg = replace(cfg, out_dir=out_dir)
    if budget is not None:
        cfg = replace(cfg, adjustment=replace(cfg.adjustment, total_budget=int(budget)))
    if parallel_envs is not None:
        cfg = replace(cfg, ppo=replace(cfg.ppo, num_envs=int(parallel_envs)))
    return cfg
