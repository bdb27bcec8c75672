"""Clipped policy-gradient updates for independent agents.

One update engine serves both the plain trainer and the expertise-modulated
trainer: the plain path simply feeds a degenerate boost schedule, so the two
coincide exactly (not just approximately) when every boost is 1.

Per agent the minimized objective over a batch is

    mean_b [ w_b * clip_loss_b - a_b * H(pi(.|o_b)) + k_b * KL(pi(.|o_b) || prior(.|o_b)) ]

with clip_loss = -min(rho*A, clip(rho, 1-delta_b, 1+delta_b)*A), rho the
probability ratio at the base temperature against the update-start policy,
and w the ratio between the base-temperature and behaviour-temperature
probabilities of the taken action under the current policy (recomputed every
epoch, treated as a constant in the gradient, clipped to [1e-3, 1e3]).
Entropy and KL are taken at the base temperature. The critic minimizes
mean_b [ w_b * (G_b - V(o_b))^2 ] on the same returns.

Gradients are assembled in closed form from the softmax Jacobian; Adam does
the rest.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from medoe import rng as medoe_rng
from medoe._kernels import lambda_returns
from medoe.boosts import BoostConfig, compute_boosts, constant_boosts
from medoe.envs.base import ConfigError
from medoe.funcapprox import Adam, log_softmax, make_critic, make_policy
from medoe.rollout import collect_rollout, evaluate_team, make_vec_env

log = logging.getLogger("medoe")

W_CLIP_LO = 1e-3
W_CLIP_HI = 1e3


@dataclass(frozen=True)
class PPOConfig:
    discount: float = 0.99
    gae_lambda: float = 0.95
    n_steps: int = 4
    num_envs: int = 8
    epochs: int = 2
    minibatches: int = 1
    clip_coef: float = 0.1
    entropy_coef: float = 1e-5
    kl_coef: float = 0.0
    actor_lr: float = 1e-2
    critic_lr: float = 2e-2
    adam_eps: float = 1e-5
    approximator: str = "tabular"
    hidden: tuple = (256, 128)

    def __post_init__(self):
        if not 0.0 < self.discount <= 1.0:
            raise ConfigError("discount must lie in (0, 1]")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ConfigError("gae_lambda must lie in [0, 1]")
        if self.clip_coef <= 0.0:
            raise ConfigError("clip_coef must be positive")
        if self.epochs < 1 or self.minibatches < 1:
            raise ConfigError("epochs and minibatches must be positive")
        if self.n_steps < 1 or self.num_envs < 1:
            raise ConfigError("n_steps and num_envs must be positive")
        if self.approximator not in ("tabular", "mlp"):
            raise ConfigError(f"unknown approximator: {self.approximator}")

    def boosts_from_constants(self, temperature=1.0):
        return constant_boosts(
            temperature=temperature,
            entropy=self.entropy_coef,
            clip=self.clip_coef,
            kl=self.kl_coef,
        )


def build_team(task, cfg, root_seed, *scope):
    """Fresh per-agent policies and critics for a task."""
    K = task.spec.num_agents
    policies, critics = [], []
    for k in range(K):
        g = medoe_rng.stream(root_seed, *scope, "init", k)
        if cfg.approximator == "tabular":
            obs_dim = task.n_states
        else:
            obs_dim = task.spec.obs_dim
        policies.append(make_policy(cfg.approximator, obs_dim, task.spec.num_actions, cfg.hidden, g))
        critics.append(make_critic(cfg.approximator, obs_dim, cfg.hidden, g))
    return policies, critics


def make_optimizers(policies, critics, cfg):
    actors = [Adam(p.net.params, cfg.actor_lr, eps=cfg.adam_eps) for p in policies]
    crits = [Adam(c.net.params, cfg.critic_lr, eps=cfg.adam_eps) for c in critics]
    return actors, crits


def ppo_clip_objective(advantage, ratio, clip_coef):
    """Per-sample clipped surrogate loss (to minimize)."""
    advantage = np.asarray(advantage, dtype=np.float64)
    ratio = np.asarray(ratio, dtype=np.float64)
    clipped = np.clip(ratio, 1.0 - clip_coef, 1.0 + clip_coef)
    return -np.minimum(ratio * advantage, clipped * advantage)


def compute_returns_and_advantages(batch, critic, k, cfg):
    """Lambda returns bootstrapped through truncations, advantages against
    the critic's current values. Both [T, E]."""
    T, E = batch.rewards.shape
    inputs = batch.flat_inputs(critic, k)
    values = critic.values(inputs).reshape(T, E)
    values_next = critic.values(batch.flat_next_inputs(critic, k)).reshape(T, E)
    returns = lambda_returns(
        batch.rewards, values_next, batch.done, batch.truncated, cfg.discount, cfg.gae_lambda
    )
    return returns, returns - values


def _minibatch_slices(size, minibatches):
    bounds = np.linspace(0, size, minibatches + 1).astype(int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def actor_gradient(policy, prior_logq, inputs, acts, temps, old_logp, adv,
                   alpha, delta, kappa, t_base, frozen_w=None):
    """Closed-form parameter gradient of the per-agent actor loss.

    The off-temperature correction w is recomputed from the current policy
    unless `frozen_w` pins it; either way it is a constant in the gradient.
    Returns (grads, mean actor loss, w).
    """
    mb = len(acts)
    rows = np.arange(mb)
    z, cache = policy.net.forward(inputs, with_cache=True)
    logp = log_softmax(z, t_base)
    p = np.exp(logp)
    lp_a = logp[rows, acts]
    if frozen_w is None:
        lp_beh = log_softmax(z, temps)[rows, acts]
        w = np.clip(np.exp(lp_a - lp_beh), W_CLIP_LO, W_CLIP_HI)
    else:
        w = frozen_w
    ratio = np.exp(lp_a - old_logp)
    clipped = np.clip(ratio, 1.0 - delta, 1.0 + delta)
    surr1 = ratio * adv
    surr2 = clipped * adv
    active = surr1 <= surr2

    # d(loss)/dz via the softmax Jacobian at the base temperature
    coef = np.where(active, -(w * adv) * ratio, 0.0) / t_base
    dz = (-coef)[:, None] * p
    dz[rows, acts] += coef
    ent = -(np.where(p > 0.0, p * logp, 0.0)).sum(axis=1)
    dz += (alpha / t_base)[:, None] * p * (logp + ent[:, None])
    loss = w * np.where(active, -surr1, -surr2) - alpha * ent
    if prior_logq is not None:
        logratio = logp - prior_logq
        kl = (p * logratio).sum(axis=1)
        dz += (kappa / t_base)[:, None] * p * (logratio - kl[:, None])
        loss = loss + kappa * kl
    dz /= mb
    return policy.net.backward(cache, dz), float(loss.mean()), w


def critic_gradient(critic, inputs, returns, w):
    """Gradient of mean_b w_b * (G_b - V_b)^2; returns (grads, loss)."""
    mb = len(returns)
    v_out, v_cache = critic.net.forward(inputs, with_cache=True)
    err = returns - v_out[:, 0]
    dv = (-2.0 * w * err / mb)[:, None]
    return critic.net.backward(v_cache, dv), float((w * err * err).mean())


def update_team(policies, critics, priors, opt_actors, opt_critics, batch, cfg, boost_cfg):
    """One PPO update for every agent on a shared batch. Returns per-agent
    diagnostic losses from the final epoch."""
    K = len(policies)
    B = batch.size
    t_base = boost_cfg.temperature_base
    rows = np.arange(B)
    stats = {"actor_loss": np.zeros(K), "critic_loss": np.zeros(K)}
    slices = _minibatch_slices(B, cfg.minibatches)

    for k in range(K):
        policy, critic = policies[k], critics[k]
        prior = None if priors is None else priors[k]
        acts = batch.actions[k].reshape(B)
        d = batch.doe[k].reshape(B)
        temps = batch.temperature[k].reshape(B)
        coeffs = compute_boosts(d, boost_cfg)
        alpha, delta, kappa = coeffs.entropy, coeffs.clip, coeffs.kl
        use_kl = bool(np.any(kappa != 0.0))
        if use_kl and prior is None:
            raise ConfigError("kl_coef is non-zero but no behaviour prior was given")

        inputs = batch.flat_inputs(policy, k)
        returns, adv = compute_returns_and_advantages(batch, critic, k, cfg)
        returns = returns.reshape(B)
        adv = adv.reshape(B)

        old_logp = log_softmax(policy.net.forward(inputs), t_base)[rows, acts]
        prior_logq = None
        if use_kl:
            prior_logq = log_softmax(prior.net.forward(inputs), t_base)

        for epoch in range(cfg.epochs):
            last_epoch = epoch == cfg.epochs - 1
            a_loss_sum = 0.0
            c_loss_sum = 0.0
            for sl in slices:
                mb = rows[sl].size
                x = inputs[sl]
                a_grads, a_loss, w = actor_gradient(
                    policy,
                    None if prior_logq is None else prior_logq[sl],
                    x, acts[sl], temps[sl], old_logp[sl], adv[sl],
                    alpha[sl], delta[sl], kappa[sl], t_base,
                )
                opt_actors[k].step(policy.net.params, a_grads)
                c_grads, c_loss = critic_gradient(critic, x, returns[sl], w)
                opt_critics[k].step(critic.net.params, c_grads)
                if last_epoch:
                    a_loss_sum += a_loss * mb
                    c_loss_sum += c_loss * mb
            if last_epoch:
                stats["actor_loss"][k] = a_loss_sum / B
                stats["critic_loss"][k] = c_loss_sum / B
    return stats


def ippo_update(policies, critics, opt_actors, opt_critics, batch, cfg, priors=None):
    """Plain independent PPO: constant coefficients everywhere."""
    return update_team(
        policies, critics, priors, opt_actors, opt_critics, batch, cfg,
        cfg.boosts_from_constants(),
    )


@dataclass
class EvalPoint:
    total_step: int
    mean_return: float
    ci95: float
    returns: np.ndarray
    doe_rates: np.ndarray | None


@dataclass
class TrainResult:
    policies: list
    critics: list
    total_steps: int
    history: list            # [EvalPoint]
    converged: bool = False
    buffers: list = field(default_factory=list)


def mean_ci95(returns):
    n = returns.size
    mean = float(returns.mean())
    if n < 2:
        return mean, 0.0
    return mean, float(1.96 * returns.std(ddof=1) / np.sqrt(n))


class RingBuffer:
    """Fixed-capacity store of the most recent observation rows."""

    def __init__(self, capacity, dim):
        self.data = np.zeros((capacity, dim))
        self.count = 0
        self._head = 0

    def push(self, rows):
        cap = self.data.shape[0]
        for start in range(0, rows.shape[0], cap):
            chunk = rows[start : start + cap]
            n = chunk.shape[0]
            end = self._head + n
            if end <= cap:
                self.data[self._head : end] = chunk
            else:
                first = cap - self._head
                self.data[self._head :] = chunk[:first]
                self.data[: end - cap] = chunk[first:]
            self._head = end % cap
            self.count = min(self.count + n, cap)

    def view(self):
        return self.data[: self.count]


def run_training(
    task,
    policies,
    critics,
    cfg,
    boost_cfg,
    priors,
    classifiers,
    budget,
    root_seed,
    scope,
    eval_every,
    eval_episodes=100,
    eval_temperature=None,
    buffers=None,
    on_eval=None,
    step_offset=0,
):
    """Generic collect/update loop; both training stages run through here.

    `on_eval(point)` may return True to stop early. total_step counts
    environment frames (vector steps times num_envs) plus `step_offset`.
    """
    env = make_vec_env(task, cfg.num_envs, root_seed, scope, "train")
    opt_actors, opt_critics = make_optimizers(policies, critics, cfg)
    if eval_temperature is None:
        eval_temperature = boost_cfg.temperature_base
    frames_per_update = cfg.n_steps * cfg.num_envs
    updates = max(1, int(budget) // frames_per_update)
    history = []
    converged = False

    def do_eval(frames, eval_idx):
        returns, rates = evaluate_team(
            task, policies, eval_episodes, eval_temperature,
            root_seed, scope, "eval", eval_idx, classifiers=classifiers,
        )
        mean, ci = mean_ci95(returns)
        point = EvalPoint(step_offset + frames, mean, ci, returns, rates)
        history.append(point)
        return bool(on_eval(point)) if on_eval is not None else False

    if do_eval(0, 0):
        return TrainResult(policies, critics, step_offset, history, True, buffers or [])

    frames = 0
    next_eval = eval_every
    eval_idx = 1
    for _ in range(updates):
        batch = collect_rollout(env, policies, classifiers, boost_cfg, cfg.n_steps)
        if buffers is not None:
            for k, buf in enumerate(buffers):
                buf.push(batch.flat_obs(k))
        update_team(policies, critics, priors, opt_actors, opt_critics, batch, cfg, boost_cfg)
        frames += frames_per_update
        if frames >= next_eval or frames >= updates * frames_per_update:
            stop = do_eval(frames, eval_idx)
            eval_idx += 1
            next_eval += eval_every
            if stop:
                converged = True
                break
    return TrainResult(policies, critics, step_offset + frames, history, converged, buffers or [])


def source_stop_threshold(known_max):
    """Stop training once evaluation reaches this return."""
    if known_max > 0.05:
        return 0.9 * known_max
    return known_max - 0.05


def train_source_stage(task, cfg, boost_cfg, root_seed, scope, budget_cap, eval_every,
                       buffer_capacity, known_max, eval_episodes=100):
    """Train a fresh team on a source task until its evaluation return
    clears the stop threshold or the budget runs out. Afterwards the per-agent
    ring buffers are refilled from the final policies, so their contents
    describe converged visitation rather than early exploration. Refill
    frames collect without updates and do not count toward total_steps."""
    policies, critics = build_team(task, cfg, root_seed, scope)
    obs_dim = task.n_states if cfg.approximator == "tabular" else task.spec.obs_dim
    buffers = [RingBuffer(buffer_capacity, obs_dim) for _ in range(task.spec.num_agents)]
    from medoe.doe import ConstantDoE

    classifiers = [ConstantDoE(1.0) for _ in range(task.spec.num_agents)]
    threshold = source_stop_threshold(known_max)

    def on_eval(point):
        return point.mean_return >= threshold

    result = run_training(
        task, policies, critics, cfg, boost_cfg, None, classifiers,
        budget_cap, root_seed, scope, eval_every, eval_episodes,
        buffers=buffers, on_eval=on_eval,
    )
    if not result.converged:
        log.warning(
            "source stage %s stopped at budget without reaching %.4f (last eval %.4f)",
            scope, threshold, result.history[-1].mean_return if result.history else float("nan"),
        )
    refill_env = make_vec_env(task, cfg.num_envs, root_seed, scope, "refill")
    rows_per_rollout = cfg.n_steps * cfg.num_envs
    for _ in range(-(-buffer_capacity // rows_per_rollout)):
        batch = collect_rollout(refill_env, result.policies, classifiers, boost_cfg, cfg.n_steps)
        for k, buf in enumerate(buffers):
            buf.push(batch.flat_obs(k))
    return result
