import pytest

from medoe.envs.base import ConfigError
from medoe.harness.config import (
    AdjustmentConfig,
    EnvConfig,
    ExperimentConfig,
    SourcesConfig,
    apply_overrides,
    load_config,
)


def write(tmp_path, text):
    path = tmp_path / "cfg.yaml"
    path.write_text(text)
    return str(path)


def test_empty_file_gives_defaults(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    assert cfg == ExperimentConfig()
    assert cfg.env.name == "chainball"
    assert cfg.ppo.discount == 0.99
    assert cfg.adjustment.total_budget == 500000


def test_sections_and_scalars_load(tmp_path):
    cfg = load_config(write(tmp_path, """
out_dir: /tmp/somewhere
seed: 42
baselines: [medoe-expert, from-scratch]
env: {name: chainball, n_states: 7, horizon: 50}
ppo: {discount: 0.9, num_envs: 4}
boosts: {temperature_boost: 3.0, kl_base: 0.0013}
sources: {seeds: [0, 1, 2], budget_cap: 1000}
classifier: {hidden: 32}
adjustment: {total_budget: 2000, eval_every: 500, seeds: [5]}
"""))
    assert cfg.out_dir == "/tmp/somewhere"
    assert cfg.seed == 42
    assert cfg.baselines == ("medoe-expert", "from-scratch")
    assert cfg.env.n_states == 7 and cfg.env.horizon == 50
    assert cfg.ppo.discount == 0.9 and cfg.ppo.num_envs == 4
    assert cfg.boosts.temperature_boost == 3.0 and cfg.boosts.kl_base == 0.0013
    assert cfg.sources.seeds == (0, 1, 2) and cfg.sources.budget_cap == 1000
    assert cfg.classifier.hidden == 32
    assert cfg.adjustment.seeds == (5,)
    # untouched sections keep their defaults
    assert cfg.ppo.gae_lambda == 0.95
    assert cfg.sources.eval_every == 4000


def test_unknown_top_level_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(write(tmp_path, "sources_typo: {seeds: [0]}\n"))


def test_unknown_section_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="discnout"):
        load_config(write(tmp_path, "ppo: {discnout: 0.9}\n"))


def test_section_must_be_mapping(tmp_path):
    with pytest.raises(ConfigError, match="mapping"):
        load_config(write(tmp_path, "ppo: 3\n"))
    with pytest.raises(ConfigError, match="mapping"):
        load_config(write(tmp_path, "- a\n- b\n"))


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_config(str(tmp_path / "nope.yaml"))


def test_unknown_baseline_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown baseline"):
        load_config(write(tmp_path, "baselines: [medoe-extra]\n"))


def test_env_validation():
    with pytest.raises(ConfigError, match="env.name"):
        EnvConfig(name="gridworld")
    with pytest.raises(ConfigError, match="n_states"):
        EnvConfig(n_states=3)


def test_sources_validation():
    with pytest.raises(ConfigError, match="seeds"):
        SourcesConfig(seeds=())
    with pytest.raises(ConfigError, match="positive"):
        SourcesConfig(budget_cap=0)


def test_adjustment_validation():
    with pytest.raises(ConfigError, match="positive"):
        AdjustmentConfig(eval_every=0)
    with pytest.raises(ConfigError, match="seeds"):
        AdjustmentConfig(seeds=())


def test_bad_section_value_reported(tmp_path):
    with pytest.raises(ConfigError, match="bad value in env"):
        load_config(write(tmp_path, "env: {name: chainball, n_states: {a: 1}}\n"))


def test_apply_overrides():
    cfg = ExperimentConfig()
    out = apply_overrides(cfg, seed=9, out_dir="/tmp/x", budget=777, parallel_envs=3)
    assert out.seed == 9
    assert out.out_dir == "/tmp/x"
    assert out.adjustment.total_budget == 777
    assert out.ppo.num_envs == 3
    # only the named fields moved
    assert out.adjustment.eval_every == cfg.adjustment.eval_every
    assert out.ppo.n_steps == cfg.ppo.n_steps
    # and None leaves everything alone
    assert apply_overrides(cfg) == cfg


def test_shipped_configs_load():
    from pathlib import Path

    configs = Path(__file__).resolve().parents[1] / "configs"
    a = load_config(str(configs / "chainball.yaml"))
    assert a.env.name == "chainball"
    assert "medoe-expert" in a.baselines
    b = load_config(str(configs / "overcooked.yaml"))
    assert b.env.name == "overcooked"
    assert b.ppo.approximator == "mlp"
