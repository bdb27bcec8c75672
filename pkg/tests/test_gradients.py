"""Central finite-difference checks of the closed-form loss gradients."""

import numpy as np
import pytest

from medoe import rng as medoe_rng
from medoe.funcapprox import log_softmax, make_critic, make_policy
from medoe.medoe import importance_weight
from medoe.ppo import W_CLIP_HI, W_CLIP_LO, actor_gradient, critic_gradient

REL_TOL = 1e-4


def fd_check(params, grads, loss_fn, g, coords_per_tensor=6):
    """Compare analytic grads against central differences at sampled coords."""
    checked = 0
    for tensor, grad in zip(params, grads):
        flat_p = tensor.reshape(-1)
        flat_g = grad.reshape(-1)
        n = min(coords_per_tensor, flat_p.size)
        idxs = g.choice(flat_p.size, size=n, replace=False)
        for i in idxs:
            theta = float(flat_p[i])
            h = 1e-6 * max(1.0, abs(theta))
            flat_p[i] = theta + h
            up = loss_fn()
            flat_p[i] = theta - h
            down = loss_fn()
            flat_p[i] = theta
            fd = (up - down) / (2.0 * h)
            err = abs(fd - flat_g[i]) / max(abs(fd), abs(flat_g[i]), 1e-5)
            assert err <= REL_TOL, f"coord {i}: analytic {flat_g[i]:.8g} vs fd {fd:.8g}"
            checked += 1
    assert checked > 0


def actor_instance(seed):
    """One randomized actor-loss instance; mixes approximators, coefficient
    regimes (including zero entropy and zero KL), temperatures and batch
    sizes."""
    g = medoe_rng.stream(seed, "grad-actor")
    kind = "tabular" if seed % 2 == 0 else "mlp"
    mb = int(g.integers(4, 13))
    n_actions = int(g.integers(3, 6))
    if kind == "tabular":
        n_rows = 6
        policy = make_policy("tabular", n_rows, n_actions)
        policy.net.table[:] = g.normal(0.0, 0.8, policy.net.table.shape)
        prior = make_policy("tabular", n_rows, n_actions)
        prior.net.table[:] = g.normal(0.0, 0.8, prior.net.table.shape)
        inputs = g.integers(0, n_rows, mb)
    else:
        obs_dim = 5
        policy = make_policy("mlp", obs_dim, n_actions, (6, 5), g)
        prior = make_policy("mlp", obs_dim, n_actions, (6, 5), g)
        # jitter every parameter so no preactivation sits on a relu kink,
        # where the loss is legitimately nondifferentiable
        for net in (policy.net, prior.net):
            for p in net.params:
                p += g.normal(0.0, 0.3, p.shape)
        inputs = g.normal(0.0, 1.0, (mb, obs_dim))
    t_base = 1.0 if seed % 4 < 2 else 0.7
    acts = g.integers(0, n_actions, mb)
    temps = np.exp(g.uniform(np.log(0.5), np.log(3.0), mb))
    rows = np.arange(mb)
    lp_a = log_softmax(policy.net.forward(inputs), t_base)[rows, acts]
    old_logp = lp_a + g.normal(0.0, 0.1, mb)
    adv = g.normal(0.0, 1.5, mb)
    alpha = np.zeros(mb) if seed % 5 == 0 else np.exp(g.uniform(np.log(1e-4), np.log(0.1), mb))
    delta = g.uniform(0.05, 0.3, mb)
    if seed % 3 == 0:
        kappa = np.zeros(mb)
        prior_logq = None
    else:
        kappa = np.exp(g.uniform(np.log(1e-3), np.log(1.0), mb))
        prior_logq = log_softmax(prior.net.forward(inputs), t_base)
    return policy, prior_logq, inputs, acts, temps, old_logp, adv, alpha, delta, kappa, t_base, g


@pytest.mark.parametrize("seed", range(24))
def test_actor_gradient_matches_finite_differences(seed):
    (policy, prior_logq, inputs, acts, temps, old_logp,
     adv, alpha, delta, kappa, t_base, g) = actor_instance(seed)
    grads, _, w = actor_gradient(
        policy, prior_logq, inputs, acts, temps, old_logp, adv,
        alpha, delta, kappa, t_base,
    )

    def loss_at_current_params():
        return actor_gradient(
            policy, prior_logq, inputs, acts, temps, old_logp, adv,
            alpha, delta, kappa, t_base, frozen_w=w,
        )[1]

    fd_check(policy.net.params, grads, loss_at_current_params, g)


@pytest.mark.parametrize("seed", range(8))
def test_critic_gradient_matches_finite_differences(seed):
    g = medoe_rng.stream(seed, "grad-critic")
    mb = int(g.integers(4, 13))
    if seed % 2 == 0:
        critic = make_critic("tabular", 6)
        critic.net.table[:] = g.normal(0.0, 0.5, critic.net.table.shape)
        inputs = g.integers(0, 6, mb)
    else:
        critic = make_critic("mlp", 5, (6, 5), g)
        for p in critic.net.params:
            p += g.normal(0.0, 0.3, p.shape)
        inputs = g.normal(0.0, 1.0, (mb, 5))
    returns = g.normal(0.0, 1.0, mb)
    w = np.exp(g.uniform(np.log(0.2), np.log(3.0), mb))
    grads, _ = critic_gradient(critic, inputs, returns, w)

    def loss_at_current_params():
        return critic_gradient(critic, inputs, returns, w)[1]

    fd_check(critic.net.params, grads, loss_at_current_params, g)


def test_frozen_w_reproduces_the_unfrozen_gradient():
    (policy, prior_logq, inputs, acts, temps, old_logp,
     adv, alpha, delta, kappa, t_base, _) = actor_instance(1)
    g1, l1, w = actor_gradient(
        policy, prior_logq, inputs, acts, temps, old_logp, adv,
        alpha, delta, kappa, t_base,
    )
    g2, l2, w2 = actor_gradient(
        policy, prior_logq, inputs, acts, temps, old_logp, adv,
        alpha, delta, kappa, t_base, frozen_w=w,
    )
    assert l1 == l2
    assert np.array_equal(w, w2)
    for a, b in zip(g1, g2):
        assert np.array_equal(a, b)


def test_off_temperature_correction_value():
    g = medoe_rng.stream(0, "w-value")
    policy = make_policy("tabular", 4, 5)
    policy.net.table[:] = g.normal(0.0, 1.0, (4, 5))
    inputs = np.array([0, 1, 2, 3])
    acts = np.array([1, 4, 0, 2])
    w = importance_weight(policy, inputs, acts, 1.0, 2.0)
    z = policy.net.forward(inputs)
    rows = np.arange(4)
    want = np.exp(log_softmax(z, 1.0)[rows, acts] - log_softmax(z, 2.0)[rows, acts])
    assert np.array_equal(w, np.clip(want, W_CLIP_LO, W_CLIP_HI))
    # equal temperatures make the correction exactly one
    assert np.all(importance_weight(policy, inputs, acts, 1.3, 1.3) == 1.0)


def test_off_temperature_correction_clips():
    policy = make_policy("tabular", 1, 2)
    policy.net.table[:] = np.array([[30.0, -30.0]])
    inputs = np.zeros(2, dtype=np.int64)
    # the dominant action gains probability at low temperature, the dominated
    # one loses it; both hit the clip rails under an extreme temperature gap
    hi = importance_weight(policy, inputs, np.array([0, 1]), 1.0, 60.0)
    assert hi[0] == W_CLIP_HI or hi[0] <= W_CLIP_HI
    lo = importance_weight(policy, inputs, np.array([1, 1]), 1.0, 60.0)
    assert lo[0] == W_CLIP_LO
    assert np.all((W_CLIP_LO <= hi) & (hi <= W_CLIP_HI))


def test_zero_coefficients_silence_their_terms():
    (policy, _, inputs, acts, temps, old_logp,
     adv, _, delta, _, t_base, _) = actor_instance(0)
    mb = len(acts)
    zero = np.zeros(mb)
    base_grads, base_loss, w = actor_gradient(
        policy, None, inputs, acts, temps, old_logp, adv, zero, delta, zero, t_base,
    )
    # entropy off, KL off: loss is exactly the weighted clip objective
    from medoe.ppo import ppo_clip_objective

    ratio = np.exp(
        log_softmax(policy.net.forward(inputs), t_base)[np.arange(mb), acts] - old_logp
    )
    want = float((w * ppo_clip_objective(adv, ratio, delta)).mean())
    assert base_loss == pytest.approx(want, rel=1e-12)
