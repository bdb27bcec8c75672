"""Shared environment contract for the vectorized trainers.

A vector env owns num_envs independent copies of one task and auto-resets a
copy as soon as its episode ends. Per step the collector calls begin_step()
to get the action-sampling uniforms (one column per agent, drawn from the
per-copy streams so trajectories are reproducible), then step(actions).
step returns the pre-reset transition; observations() already reflects any
resets that happened.
"""

from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    """Raised when a task or run configuration is inconsistent."""


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    num_agents: int
    num_actions: int          # per agent; all agents share one action count
    obs_dim: int
    horizon: int

    def __post_init__(self):
        if self.num_agents < 1:
            raise ConfigError("num_agents must be positive")
        if self.num_actions < 1:
            raise ConfigError("num_actions must be positive")
        if self.horizon < 1:
            raise ConfigError("horizon must be positive")


@dataclass
class Transition:
    """One single-env step, used by the scripted/manual paths and tests."""

    obs: list
    actions: tuple
    reward: float
    next_obs: list
    done: bool
    truncated: bool


@dataclass
class StepResult:
    """One vectorized step, pre-reset view of the episode boundary."""

    rewards: np.ndarray      # [E]
    done: np.ndarray         # [E] uint8, terminal transitions
    truncated: np.ndarray    # [E] uint8, horizon cutoffs (never set with done)
    next_obs: list           # per agent [E, obs_dim], before any reset
    next_tab_ids: np.ndarray | None
