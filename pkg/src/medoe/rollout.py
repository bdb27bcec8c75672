"""Vectorized trajectory collection and policy evaluation."""

from dataclasses import dataclass

import numpy as np

from medoe import rng as medoe_rng
from medoe._kernels import sample_categorical_rows
from medoe.boosts import compute_boosts
from medoe.envs.chainball import ChainballTask, ChainballVecEnv
from medoe.envs.kitchen import KitchenTask, KitchenVecEnv
from medoe.funcapprox import log_softmax


def make_vec_env(task, num_envs, root_seed, *scope):
    streams = [medoe_rng.stream(root_seed, *scope, "env", i) for i in range(num_envs)]
    if isinstance(task, ChainballTask):
        return ChainballVecEnv(task, num_envs, streams)
    if isinstance(task, KitchenTask):
        return KitchenVecEnv(task, num_envs, streams)
    raise TypeError(f"unknown task type: {type(task).__name__}")


def policy_inputs(policy, obs, tab_ids):
    if policy.net.kind == "tabular":
        return tab_ids
    return obs


@dataclass
class RolloutBatch:
    """One collection window. Per-agent arrays are lists indexed by agent."""

    obs: list                 # [T, E, D]
    tab_ids: np.ndarray | None
    next_obs: list
    next_tab_ids: np.ndarray | None
    actions: np.ndarray       # [K, T, E] int64
    logp_behaviour: np.ndarray  # [K, T, E] log prob at the behaviour temperature
    doe: np.ndarray           # [K, T, E]
    temperature: np.ndarray   # [K, T, E]
    rewards: np.ndarray       # [T, E]
    done: np.ndarray          # [T, E] uint8
    truncated: np.ndarray     # [T, E] uint8

    @property
    def n_steps(self):
        return self.rewards.shape[0]

    @property
    def num_envs(self):
        return self.rewards.shape[1]

    @property
    def size(self):
        return self.rewards.size

    def flat_obs(self, k):
        return self.obs[k].reshape(self.size, -1)

    def flat_tab_ids(self):
        return None if self.tab_ids is None else self.tab_ids.reshape(self.size)

    def flat_inputs(self, policy_or_critic, k):
        if policy_or_critic.net.kind == "tabular":
            return self.flat_tab_ids()
        return self.flat_obs(k)

    def flat_next_inputs(self, policy_or_critic, k):
        if policy_or_critic.net.kind == "tabular":
            return self.next_tab_ids.reshape(self.size)
        return self.next_obs[k].reshape(self.size, -1)


def collect_rollout(env, policies, classifiers, boost_cfg, n_steps):
    """Step the vector env n_steps times, sampling each agent at its
    expertise-boosted temperature."""
    K = env.num_agents
    E = env.num_envs
    obs_dim = env.task.spec.obs_dim
    tabular_states = env.tab_ids() is not None

    obs_buf = [np.empty((n_steps, E, obs_dim)) for _ in range(K)]
    next_obs_buf = [np.empty((n_steps, E, obs_dim)) for _ in range(K)]
    tab_buf = np.empty((n_steps, E), dtype=np.int64) if tabular_states else None
    next_tab_buf = np.empty((n_steps, E), dtype=np.int64) if tabular_states else None
    actions = np.empty((K, n_steps, E), dtype=np.int64)
    logp = np.empty((K, n_steps, E))
    doe = np.empty((K, n_steps, E))
    temps = np.empty((K, n_steps, E))
    rewards = np.empty((n_steps, E))
    done = np.empty((n_steps, E), dtype=np.uint8)
    trunc = np.empty((n_steps, E), dtype=np.uint8)

    for t in range(n_steps):
        obs_list = env.observations()
        states = env.states_view()
        tabs = env.tab_ids()
        u = env.begin_step()
        step_actions = np.empty((K, E), dtype=np.int64)
        for k in range(K):
            d = classifiers[k].evaluate(obs_list[k], states)
            temp_k = compute_boosts(d, boost_cfg).temperature
            inputs = tabs if policies[k].net.kind == "tabular" else obs_list[k]
            logits = policies[k].net.forward(inputs)
            lp = log_softmax(logits, temp_k)
            a = sample_categorical_rows(np.exp(lp), np.ascontiguousarray(u[:, k]))
            step_actions[k] = a
            obs_buf[k][t] = obs_list[k]
            actions[k, t] = a
            logp[k, t] = lp[np.arange(E), a]
            doe[k, t] = d
            temps[k, t] = temp_k
        if tabular_states:
            tab_buf[t] = tabs
        result = env.step(step_actions)
        rewards[t] = result.rewards
        done[t] = result.done
        trunc[t] = result.truncated
        for k in range(K):
            next_obs_buf[k][t] = result.next_obs[k]
        if tabular_states:
            next_tab_buf[t] = result.next_tab_ids

    return RolloutBatch(
        obs=obs_buf,
        tab_ids=tab_buf,
        next_obs=next_obs_buf,
        next_tab_ids=next_tab_buf,
        actions=actions,
        logp_behaviour=logp,
        doe=doe,
        temperature=temps,
        rewards=rewards,
        done=done,
        truncated=trunc,
    )


def evaluate_team(task, policies, episodes, temperature, root_seed, *scope, classifiers=None):
    """Run `episodes` parallel episodes sampling at a fixed temperature.

    Returns (per-episode undiscounted returns, per-agent mean expertise or
    None). Expertise is averaged over the steps of live episodes only.
    """
    env = make_vec_env(task, episodes, root_seed, *scope)
    K = env.num_agents
    active = np.ones(episodes, dtype=bool)
    returns = np.zeros(episodes)
    doe_sum = np.zeros(K)
    doe_count = 0
    for _ in range(task.spec.horizon):
        obs_list = env.observations()
        tabs = env.tab_ids()
        if classifiers is not None:
            states = env.states_view()
            n_active = int(active.sum())
            for k in range(K):
                d = classifiers[k].evaluate(obs_list[k], states)
                doe_sum[k] += float(np.asarray(d)[active].sum())
            doe_count += n_active
        u = env.begin_step()
        step_actions = np.empty((K, episodes), dtype=np.int64)
        for k in range(K):
            inputs = tabs if policies[k].net.kind == "tabular" else obs_list[k]
            probs = np.exp(log_softmax(policies[k].net.forward(inputs), temperature))
            step_actions[k] = sample_categorical_rows(probs, np.ascontiguousarray(u[:, k]))
        result = env.step(step_actions)
        returns += result.rewards * active
        finished = (result.done | result.truncated).astype(bool)
        active &= ~finished
        if not active.any():
            break
    rates = None
    if classifiers is not None and doe_count > 0:
        rates = doe_sum / doe_count
    return returns, rates
