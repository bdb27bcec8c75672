"""Difference-of-expertise modulated PPO for multi-agent curricula."""

__version__ = "0.1.0"

from medoe._kernels import USING_COMPILED

__all__ = ["USING_COMPILED", "__version__"]
