"""Time the numpy kernels against the compiled extension.

Run from the repository root:

    python benchmarks/bench_kernels.py [--repeats N]

Each kernel is timed best-of-N on a rollout-sized workload; the table shows
both backends and the speedup. If the extension is not built only the numpy
column appears.
"""

import argparse
import time

import numpy as np

from medoe import rng as medoe_rng
from medoe._kernels import pure
from medoe.envs import chainball as cb

try:
    from medoe._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    g = medoe_rng.stream(0, "bench")
    tables = cb.generate_target_tables(11, medoe_rng.stream(0, "chainball-tables"))
    task = cb.make_target_task(tables)
    cdf = cb.backward_cdf_matrix(task.n_states)

    rows = 65536
    probs = g.random((rows, 4))
    probs /= probs.sum(axis=1, keepdims=True)
    u_rows = g.random(rows)

    states = g.integers(1, 12, rows).astype(np.int64)
    jidx = g.integers(0, 256, rows).astype(np.int64)
    u_steps = g.random((rows, 2))

    T, E = 256, 256
    rewards = g.normal(size=(T, E))
    values_next = g.normal(size=(T, E))
    done = g.random((T, E)) < 0.05
    trunc = np.logical_and(g.random((T, E)) < 0.05, ~done)

    def bench_sample(impl):
        return lambda: impl.sample_categorical_rows(probs, u_rows)

    def bench_step(impl):
        return lambda: impl.chainball_step_batch(
            states, jidx, u_steps, tables.forward, cdf, task.restart,
            task.n_states, task.term_lo, task.term_hi, task.goals_terminal,
        )

    def bench_returns(impl):
        return lambda: impl.lambda_returns(rewards, values_next, done, trunc, 0.99, 0.95)

    return [
        (f"sample_categorical_rows ({rows} rows)", bench_sample),
        (f"chainball_step_batch ({rows} envs)", bench_step),
        (f"lambda_returns ({T}x{E})", bench_returns),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20, help="timing repeats per kernel")
    args = parser.parse_args()

    print(f"{'kernel':44s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, make in workloads():
        make(pure)()  # warm both paths before timing
        t_pure = best_of(make(pure), args.repeats)
        if _core is None:
            print(f"{label:44s} {t_pure * 1e3:9.3f}ms {'n/a':>10s} {'n/a':>8s}")
            continue
        make(_core)()
        t_core = best_of(make(_core), args.repeats)
        print(
            f"{label:44s} {t_pure * 1e3:9.3f}ms {t_core * 1e3:9.3f}ms {t_pure / t_core:7.1f}x"
        )
    if _core is None:
        print("\ncompiled extension not built; showing the numpy fallback only")


if __name__ == "__main__":
    main()
