"""Chain-position team game with forward/backward stochastic dynamics.

States are chain positions 1..N. Each step the joint action is looked up in a
forward table F[s, joint]; with probability F the ball advances one position,
otherwise it drops backward to a lower position r < s with probability
proportional to 1.5**(r - s) (from position 1 a backward move is a concession
worth -1). Reaching N and winning the forward check scores +1. The target
task restarts at the midpoint after either goal and runs to a fixed horizon;
source tasks are windows of the chain where leaving the window or scoring
ends the episode.

Forward tables are uniform on [0, 0.5] except the per-state designated
optimal joint action, which gets 0.8. In the 4-agent target two states are
special: at state 5 the table varies only with agents 1 and 3, at state 7
only with agents 2 and 4, so the remaining agents have no influence there.
Source tables copy the target's optimal pair inside the overlap window and
are forced to differ from it in the other playable states.
"""

import math
from dataclasses import dataclass

import numpy as np

from medoe import _kernels
from medoe.envs.base import ConfigError, StepResult, TaskSpec

OPTIMAL_F = 0.8
NONOPT_HIGH = 0.5
BACKWARD_BASE = 1.5


@dataclass(frozen=True)
class ForwardTables:
    n_states: int
    n_agents: int
    n_actions: int
    forward: np.ndarray   # [N, n_actions ** n_agents]
    optimal: np.ndarray   # [N, n_agents] int64

    def __post_init__(self):
        if self.forward.shape != (self.n_states, self.n_actions**self.n_agents):
            raise ConfigError("forward table shape mismatch")
        if self.optimal.shape != (self.n_states, self.n_agents):
            raise ConfigError("optimal table shape mismatch")


@dataclass(frozen=True)
class ChainballTask:
    spec: TaskSpec
    tables: ForwardTables
    variant: str            # "target" | "def" | "att"
    slots: tuple            # which target seats these agents occupy
    restart: int
    term_lo: int
    term_hi: int
    goals_terminal: bool

    @property
    def n_states(self):
        return self.tables.n_states


def joint_index(actions, n_actions):
    """Agent-major mixed-radix index; actions is [K] or [K, E]."""
    actions = np.asarray(actions)
    idx = np.zeros(actions.shape[1:], dtype=np.int64)
    for k in range(actions.shape[0]):
        idx = idx * n_actions + actions[k]
    return idx


def backward_distribution(state):
    """Probabilities over landing states 1..state-1; empty for state 1."""
    if state < 1:
        raise ConfigError("state must be >= 1")
    if state == 1:
        return np.zeros(0, dtype=np.float64)
    r = np.arange(1, state, dtype=np.float64)
    w = BACKWARD_BASE ** (r - state)
    return w / w.sum()


def backward_cdf_matrix(n_states):
    # row s-1 holds the cdf over landing states, padded with 1.0 so the
    # kernels' running scan always terminates
    cdf = np.ones((n_states, n_states), dtype=np.float64)
    for s in range(2, n_states + 1):
        probs = backward_distribution(s)
        cdf[s - 1, : s - 1] = np.cumsum(probs)
        cdf[s - 1, s - 2] = 1.0
    return cdf


def _draw_row(rng, n):
    return rng.uniform(0.0, NONOPT_HIGH, n)


def generate_target_tables(n_states, rng, n_agents=4, n_actions=4):
    n_joint = n_actions**n_agents
    forward = np.empty((n_states, n_joint), dtype=np.float64)
    optimal = np.empty((n_states, n_agents), dtype=np.int64)
    special = {}
    if n_agents == 4 and n_states >= 8:
        special = {5: (0, 2), 7: (1, 3)}
    for s in range(1, n_states + 1):
        if s in special:
            i, j = special[s]
            vals = rng.uniform(0.0, NONOPT_HIGH, (n_actions, n_actions))
            opt = rng.integers(0, n_actions, n_agents)
            shape = [1] * n_agents
            shape[i] = n_actions
            shape[j] = n_actions
            grid = np.broadcast_to(vals.reshape(shape), (n_actions,) * n_agents).copy()
            sel = [slice(None)] * n_agents
            sel[i] = opt[i]
            sel[j] = opt[j]
            grid[tuple(sel)] = OPTIMAL_F
            forward[s - 1] = grid.reshape(-1)
            optimal[s - 1] = opt
        else:
            row = _draw_row(rng, n_joint)
            opt = rng.integers(0, n_actions, n_agents)
            row[joint_index(opt, n_actions)] = OPTIMAL_F
            forward[s - 1] = row
            optimal[s - 1] = opt
    return ForwardTables(n_states, n_agents, n_actions, forward, optimal)


def generate_source_tables(target, slots, playable, overlap, rng):
    """2-agent window tables tied to a target instance.

    Inside the overlap window the optimal pair copies the target seats in
    `slots`; in the other playable states it is drawn uniformly among the
    pairs that differ from the target's.
    """
    n_states = target.n_states
    n_actions = target.n_actions
    n_agents = len(slots)
    n_joint = n_actions**n_agents
    forward = np.empty((n_states, n_joint), dtype=np.float64)
    optimal = np.empty((n_states, n_agents), dtype=np.int64)
    for s in range(1, n_states + 1):
        row = _draw_row(rng, n_joint)
        target_pair = target.optimal[s - 1, list(slots)]
        target_idx = int(joint_index(target_pair, n_actions))
        if overlap[0] <= s <= overlap[1]:
            idx = target_idx
        elif playable[0] <= s <= playable[1]:
            idx = int(rng.integers(0, n_joint - 1))
            if idx >= target_idx:
                idx += 1
        else:
            idx = int(rng.integers(0, n_joint))
        row[idx] = OPTIMAL_F
        forward[s - 1] = row
        opt = np.empty(n_agents, dtype=np.int64)
        for k in range(n_agents - 1, -1, -1):
            opt[k] = idx % n_actions
            idx //= n_actions
        optimal[s - 1] = opt
    return ForwardTables(n_states, n_agents, n_actions, forward, optimal)


def _restart_state(lo, hi):
    return math.ceil((lo + hi) / 2)


def make_target_task(tables, horizon=90):
    n = tables.n_states
    spec = TaskSpec(
        task_id=f"chainball-{n}-target",
        num_agents=tables.n_agents,
        num_actions=tables.n_actions,
        obs_dim=n,
        horizon=horizon,
    )
    return ChainballTask(
        spec=spec,
        tables=tables,
        variant="target",
        slots=tuple(range(tables.n_agents)),
        restart=_restart_state(1, n),
        term_lo=1,
        term_hi=n,
        goals_terminal=False,
    )


def make_source_task(target_tables, variant, rng, horizon=90, s_def=6, s_att=6):
    n = target_tables.n_states
    if variant == "def":
        slots, playable = (0, 1), (1, s_def)
        overlap = (1, s_def - 2)
    elif variant == "att":
        slots, playable = (2, 3), (s_att, n)
        overlap = (s_att + 2, n)
    else:
        raise ConfigError(f"unknown source variant: {variant}")
    tables = generate_source_tables(target_tables, slots, playable, overlap, rng)
    spec = TaskSpec(
        task_id=f"chainball-{n}-{variant}",
        num_agents=2,
        num_actions=target_tables.n_actions,
        obs_dim=n,
        horizon=horizon,
    )
    return ChainballTask(
        spec=spec,
        tables=tables,
        variant=variant,
        slots=slots,
        restart=_restart_state(*playable),
        term_lo=playable[0],
        term_hi=playable[1],
        goals_terminal=True,
    )


def expert_doe_chainball(task, slot, states):
    """1 where the seat's source window covered this chain region, else 0.

    Seats 0 and 1 trained on the low window (expert up to state 4 in the
    standard task), seats 2 and 3 on the high window (expert from state 8).
    """
    n = task.n_states
    states = np.asarray(states)
    if slot in (0, 1):
        limit = _restart_state(1, n) - 2
        return (states <= limit).astype(np.float64)
    if slot in (2, 3):
        limit = _restart_state(1, n) + 2
        return (states >= limit).astype(np.float64)
    raise ConfigError(f"bad agent slot: {slot}")


def chainball_step(task, state, actions, rng):
    """Single-env step. Consumes exactly num_agents + 2 uniforms upstream of
    this call: the per-agent action draws happen in the collector, the two
    draws here decide the forward check and the backward landing."""
    u = rng.random(2)
    return _step_scalar(task, state, actions, u)


def _step_scalar(task, state, actions, u):
    tables = task.tables
    jidx = int(joint_index(np.asarray(actions, dtype=np.int64), tables.n_actions))
    p_forward = tables.forward[state - 1, jidx]
    if u[0] < p_forward:
        if state == task.n_states:
            reward = 1.0
            nxt = task.restart
            done = task.goals_terminal
        else:
            nxt = state + 1
            reward = 0.0
            done = nxt > task.term_hi
    else:
        if state == 1:
            reward = -1.0
            nxt = task.restart
            done = task.goals_terminal
        else:
            probs = backward_distribution(state)
            cdf = np.cumsum(probs)
            cdf[-1] = 1.0
            nxt = int(np.searchsorted(cdf, u[1], side="right")) + 1
            reward = 0.0
            done = nxt < task.term_lo
    return nxt, reward, done


def optimal_policy_value(task):
    """Exact expected return of always playing the designated optimal joint
    action, from the restart state with the full horizon. Dynamic program
    over (steps remaining, state)."""
    n = task.n_states
    tables = task.tables
    p_opt = np.array(
        [tables.forward[s - 1, int(joint_index(tables.optimal[s - 1], tables.n_actions))] for s in range(1, n + 1)]
    )
    back = [backward_distribution(s) for s in range(1, n + 1)]
    v_prev = np.zeros(n + 1)  # index by state, 0 unused
    for _ in range(task.spec.horizon):
        v = np.zeros(n + 1)
        for s in range(task.term_lo, task.term_hi + 1):
            pf = p_opt[s - 1]
            if s == n:
                fwd = 1.0 + (0.0 if task.goals_terminal else v_prev[task.restart])
            elif s + 1 > task.term_hi:
                fwd = 0.0
            else:
                fwd = v_prev[s + 1]
            if s == 1:
                bwd = -1.0 + (0.0 if task.goals_terminal else v_prev[task.restart])
            else:
                probs = back[s - 1]
                bwd = 0.0
                for r in range(1, s):
                    if r >= task.term_lo:
                        bwd += probs[r - 1] * v_prev[r]
            v[s] = pf * fwd + (1.0 - pf) * bwd
        v_prev = v
    return float(v_prev[task.restart])


class ChainballVecEnv:
    """num_envs independent copies, stepped through the batch kernel."""

    def __init__(self, task, num_envs, streams):
        if len(streams) != num_envs:
            raise ConfigError("need one rng stream per env copy")
        self.task = task
        self.num_envs = num_envs
        self.streams = streams
        self._eye = np.eye(task.n_states, dtype=np.float64)
        self._back_cdf = backward_cdf_matrix(task.n_states)
        self.states = np.full(num_envs, task.restart, dtype=np.int64)
        self.steps = np.zeros(num_envs, dtype=np.int64)
        self._pending = None

    @property
    def num_agents(self):
        return self.task.spec.num_agents

    def observations(self):
        one_hot = self._eye[self.states - 1]
        return [one_hot] * self.num_agents

    def tab_ids(self):
        return self.states - 1

    def states_view(self):
        return self.states.copy()

    def begin_step(self):
        k = self.num_agents
        block = np.empty((self.num_envs, k + 2), dtype=np.float64)
        for e, g in enumerate(self.streams):
            block[e] = g.random(k + 2)
        self._pending = np.ascontiguousarray(block[:, k:])
        return block[:, :k]

    def step(self, actions):
        if self._pending is None:
            raise RuntimeError("step() called before begin_step()")
        u = self._pending
        self._pending = None
        task = self.task
        jidx = joint_index(np.asarray(actions, dtype=np.int64), task.tables.n_actions)
        nxt, rewards, done = _kernels.chainball_step_batch(
            self.states,
            np.ascontiguousarray(jidx),
            u,
            task.tables.forward,
            self._back_cdf,
            task.restart,
            task.n_states,
            task.term_lo,
            task.term_hi,
            task.goals_terminal,
        )
        done8 = done.astype(np.uint8)
        trunc8 = ((self.steps + 1 >= task.spec.horizon) & ~done).astype(np.uint8)
        # terminal exits land outside the window; clamp for the one-hot view
        shown = np.clip(nxt, 1, task.n_states)
        next_obs = self._eye[shown - 1]
        result = StepResult(
            rewards=rewards,
            done=done8,
            truncated=trunc8,
            next_obs=[next_obs] * self.num_agents,
            next_tab_ids=shown - 1,
        )
        reset = (done8 | trunc8).astype(bool)
        self.states = np.where(reset, task.restart, shown)
        self.steps = np.where(reset, 0, self.steps + 1)
        return result
