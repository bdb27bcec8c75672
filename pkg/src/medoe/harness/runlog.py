"""Run logs: one CSV row per evaluation point, plus the AUC summary metric.

Column order is fixed: run identity, then the evaluation aggregates, then
one expertise-rate column per agent, then one source-task return column per
sub-team. Expertise columns stay blank for baselines that do not classify;
source-return columns stay blank unless the run recorded forgetting evals.
Floats are written with repr so they round-trip exactly.
"""

import csv
import os
from dataclasses import dataclass

import numpy as np


@dataclass
class RunRow:
    run_id: str
    baseline: str
    env: str
    team_id: str
    seed: int
    total_step: int
    mean_return: float
    ci95: float
    doe_rates: list | None = None
    source_returns: list | None = None


def header(num_agents, num_subteams):
    cols = ["run_id", "baseline", "env", "team_id", "seed", "total_step", "mean_return", "ci95"]
    cols += [f"doe_rate_agent_{k}" for k in range(1, num_agents + 1)]
    cols += [f"source_return_subteam_{m}" for m in range(1, num_subteams + 1)]
    return cols


def _fmt(x):
    return repr(float(x))


def write_run_log(path, rows, num_agents, num_subteams):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header(num_agents, num_subteams))
        for r in rows:
            doe = [""] * num_agents if r.doe_rates is None else [_fmt(v) for v in r.doe_rates]
            src = [""] * num_subteams if r.source_returns is None else [_fmt(v) for v in r.source_returns]
            if len(doe) != num_agents or len(src) != num_subteams:
                raise ValueError("row width does not match the declared agent/sub-team counts")
            writer.writerow(
                [r.run_id, r.baseline, r.env, r.team_id, str(r.seed), str(r.total_step),
                 _fmt(r.mean_return), _fmt(r.ci95), *doe, *src]
            )


def read_run_log(path):
    """Returns (rows, num_agents, num_subteams)."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        head = next(reader)
        num_agents = sum(1 for c in head if c.startswith("doe_rate_agent_"))
        num_subteams = sum(1 for c in head if c.startswith("source_return_subteam_"))
        expected = header(num_agents, num_subteams)
        if head != expected:
            raise ValueError(f"unexpected run log header in {path}")
        rows = []
        for rec in reader:
            base = rec[:8]
            doe = rec[8 : 8 + num_agents]
            src = rec[8 + num_agents :]
            rows.append(
                RunRow(
                    run_id=base[0],
                    baseline=base[1],
                    env=base[2],
                    team_id=base[3],
                    seed=int(base[4]),
                    total_step=int(base[5]),
                    mean_return=float(base[6]),
                    ci95=float(base[7]),
                    doe_rates=None if all(v == "" for v in doe) else [float(v) for v in doe],
                    source_returns=None if all(v == "" for v in src) else [float(v) for v in src],
                )
            )
    return rows, num_agents, num_subteams


def compute_auc(steps, values):
    """Area under the curve divided by the step span; needs two points."""
    x = np.asarray(steps, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if x.size < 2:
        raise ValueError("auc needs at least two evaluation points")
    if np.any(np.diff(x) <= 0):
        raise ValueError("auc steps must be strictly increasing")
    return float(np.trapezoid(y, x) / (x[-1] - x[0]))


def auc_of_rows(rows):
    return compute_auc([r.total_step for r in rows], [r.mean_return for r in rows])
