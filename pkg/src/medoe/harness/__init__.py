from medoe.harness.config import ExperimentConfig, load_config
from medoe.harness.runlog import RunRow, compute_auc, read_run_log, write_run_log

__all__ = [
    "ExperimentConfig",
    "load_config",
    "RunRow",
    "compute_auc",
    "read_run_log",
    "write_run_log",
]
