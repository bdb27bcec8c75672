"""Expertise-modulated coefficient schedules.

Given a per-sample expertise score d in [0, 1], the exploration knobs relax
toward their boosted values as d drops and pin to the base values at d = 1:

    temperature      T = T_base * B_T ** (1 - d)
    entropy weight   a = a_base * B_a ** (1 - d)
    ppo clip         delta = delta_base * B_delta ** (1 - d)
    prior weight     kappa = kappa_base * B_kappa ** d

The prior weight runs the other way: full strength where the agent is
expert, vanishing where it is not.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoostConfig:
    temperature_base: float = 1.0
    entropy_base: float = 1e-5
    clip_base: float = 0.1
    kl_base: float = 8e-3
    temperature_boost: float = 1.0
    entropy_boost: float = 1.0
    clip_boost: float = 1.0
    kl_boost: float = 1.0

    def __post_init__(self):
        if self.temperature_base <= 0:
            raise ValueError("temperature_base must be positive")
        for name in ("temperature_boost", "entropy_boost", "clip_boost", "kl_boost"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("entropy_base", "clip_base", "kl_base"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class ModulatedCoefficients:
    temperature: np.ndarray
    entropy: np.ndarray
    clip: np.ndarray
    kl: np.ndarray


def constant_boosts(temperature=1.0, entropy=1e-5, clip=0.1, kl=8e-3):
    """Degenerate schedule: every boost is 1, so d has no effect and the
    base coefficients apply everywhere."""
    return BoostConfig(
        temperature_base=temperature,
        entropy_base=entropy,
        clip_base=clip,
        kl_base=kl,
    )


def compute_boosts(doe, config):
    d = np.asarray(doe, dtype=np.float64)
    if np.any(d < 0.0) or np.any(d > 1.0):
        raise ValueError("expertise values must lie in [0, 1]")
    relax = 1.0 - d
    return ModulatedCoefficients(
        temperature=config.temperature_base * config.temperature_boost**relax,
        entropy=config.entropy_base * config.entropy_boost**relax,
        clip=config.clip_base * config.clip_boost**relax,
        kl=config.kl_base * config.kl_boost**d,
    )
