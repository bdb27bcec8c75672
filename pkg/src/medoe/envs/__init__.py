from medoe.envs.base import ConfigError, StepResult, TaskSpec, Transition

__all__ = ["ConfigError", "StepResult", "TaskSpec", "Transition"]
