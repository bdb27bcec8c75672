"""Expertise-modulated fine-tuning on top of the shared PPO engine.

The trainer itself is ppo.run_training with three extra ingredients: a
per-agent expertise classifier, a boost schedule that loosens exploration
where expertise is low, and frozen behaviour priors (the source policies)
that the KL term anchors to where expertise is high.
"""

import numpy as np

from medoe.boosts import BoostConfig, ModulatedCoefficients, compute_boosts, constant_boosts
from medoe.envs.base import ConfigError
from medoe.funcapprox import log_softmax
from medoe.ppo import W_CLIP_HI, W_CLIP_LO, run_training

__all__ = [
    "BoostConfig",
    "ModulatedCoefficients",
    "compute_boosts",
    "constant_boosts",
    "importance_weight",
    "medoe_losses",
    "adjustment_train",
]


def importance_weight(policy, inputs, actions, temperature_base, temperature_behaviour):
    """Ratio between the base-temperature and behaviour-temperature action
    probabilities under the current policy, clipped to [1e-3, 1e3]."""
    z = policy.net.forward(inputs)
    rows = np.arange(z.shape[0])
    actions = np.asarray(actions)
    lp_base = log_softmax(z, temperature_base)[rows, actions]
    lp_beh = log_softmax(z, temperature_behaviour)[rows, actions]
    return np.clip(np.exp(lp_base - lp_beh), W_CLIP_LO, W_CLIP_HI)


def medoe_losses(batch, policies, critics, priors, ppo_cfg, boost_cfg,
                 old_logp=None, frozen_w=None):
    """Evaluate the modulated actor and critic losses on a batch without
    updating anything. By default the reference policy is the current one
    (ratios are 1); pass per-agent `old_logp` to score against an earlier
    snapshot, and `frozen_w` to pin the off-temperature correction the way
    the update engine does within an epoch."""
    from medoe.ppo import compute_returns_and_advantages

    K = len(policies)
    B = batch.size
    t_base = boost_cfg.temperature_base
    rows = np.arange(B)
    actor_losses = np.zeros(K)
    critic_losses = np.zeros(K)
    for k in range(K):
        policy, critic = policies[k], critics[k]
        acts = batch.actions[k].reshape(B)
        temps = batch.temperature[k].reshape(B)
        coeffs = compute_boosts(batch.doe[k].reshape(B), boost_cfg)
        use_kl = bool(np.any(coeffs.kl != 0.0))
        if use_kl and (priors is None or priors[k] is None):
            raise ConfigError("kl_coef is non-zero but no behaviour prior was given")

        inputs = batch.flat_inputs(policy, k)
        returns, adv = compute_returns_and_advantages(batch, critic, k, ppo_cfg)
        returns = returns.reshape(B)
        adv = adv.reshape(B)

        z = policy.net.forward(inputs)
        logp = log_softmax(z, t_base)
        p = np.exp(logp)
        lp_a = logp[rows, acts]
        if frozen_w is not None:
            w = frozen_w[k]
        else:
            lp_beh = log_softmax(z, temps)[rows, acts]
            w = np.clip(np.exp(lp_a - lp_beh), W_CLIP_LO, W_CLIP_HI)
        ref = old_logp[k] if old_logp is not None else lp_a
        ratio = np.exp(lp_a - ref)
        clipped = np.clip(ratio, 1.0 - coeffs.clip, 1.0 + coeffs.clip)
        clip_loss = -np.minimum(ratio * adv, clipped * adv)
        ent = -(np.where(p > 0.0, p * logp, 0.0)).sum(axis=1)
        loss = w * clip_loss - coeffs.entropy * ent
        if use_kl:
            logq = log_softmax(priors[k].net.forward(inputs), t_base)
            kl = (p * (logp - logq)).sum(axis=1)
            loss = loss + coeffs.kl * kl
        actor_losses[k] = float(loss.mean())
        err = returns - critic.values(inputs)
        critic_losses[k] = float((w * err * err).mean())
    return actor_losses, critic_losses


def adjustment_train(task, policies, critics, priors, classifiers, ppo_cfg, boost_cfg,
                     budget, root_seed, scope, eval_every, eval_episodes=100,
                     on_eval=None, step_offset=0):
    """Fine-tune a composed team on the target task under the modulated
    schedule. Requires priors whenever the KL weight can be non-zero."""
    if boost_cfg.kl_base != 0.0 and priors is None:
        raise ConfigError("kl_base is non-zero but no behaviour priors were given")
    return run_training(
        task, policies, critics, ppo_cfg, boost_cfg, priors, classifiers,
        budget, root_seed, scope, eval_every, eval_episodes,
        on_eval=on_eval, step_offset=step_offset,
    )
