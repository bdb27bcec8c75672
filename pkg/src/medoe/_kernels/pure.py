"""Pure-numpy kernels. The compiled module mirrors these bit for bit.

Arithmetic order matters: the Cython versions use the same operation
sequence so both backends produce identical floats.
"""

import numpy as np


def sample_categorical_rows(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Sample one index per row of `probs` using uniforms `u`.

    Index = number of prefix sums <= u, capped at the last column. Matches a
    left-to-right cumulative walk.
    """
    cdf = np.cumsum(probs, axis=1)
    idx = (u[:, None] >= cdf).sum(axis=1)
    return np.minimum(idx, probs.shape[1] - 1).astype(np.int64)


def chainball_step_batch(states, jidx, u, forward, back_cdf, restart,
                         n_states, term_lo, term_hi, goals_terminal):
    """Advance a batch of chain states by one transition.

    states: int64 [E], 1-based positions.
    jidx: int64 [E], lexicographic joint-action index into `forward` rows.
    u: float64 [E, 2], (forward check, backward target) uniforms. Both are
       always consumed so backends stay aligned.
    forward: float64 [N, A] forward probabilities.
    back_cdf: float64 [N, N] per-state cdf over backward targets 1..s-1,
       padded with 1.0.
    term_lo/term_hi: positions s < term_lo or s > term_hi end the episode
       with zero reward (source drills). Goals end it iff goals_terminal.

    Returns (next_states, rewards, done) without applying any reset.
    """
    s = states
    fwd = u[:, 0] < forward[s - 1, jidx]

    scored = fwd & (s == n_states)
    advanced = fwd & ~scored

    rows = back_cdf[s - 1]
    target = (u[:, 1:2] >= rows).sum(axis=1) + 1
    conceded = ~fwd & (s == 1)
    dropped = ~fwd & ~conceded

    nxt = np.where(advanced, s + 1, s)
    nxt = np.where(dropped, target, nxt)
    nxt = np.where(scored | conceded, restart, nxt)

    rewards = np.where(scored, 1.0, 0.0)
    rewards = np.where(conceded, -1.0, rewards)

    exited = (nxt < term_lo) | (nxt > term_hi)
    done = exited & ~(scored | conceded)
    if goals_terminal:
        done = done | scored | conceded
    return nxt.astype(np.int64), rewards, done


def lambda_returns(rewards, values_next, done, trunc, gamma, lam):
    """Backward lambda-return recursion over a [T, E] window.

    G_t = r_t                              if done_t
        = r_t + gamma * v_next_t           if truncated_t or t == T-1
        = r_t + gamma * ((1-lam) * v_next_t + lam * G_{t+1})  otherwise

    At lam=1 the continuing branch is the tail-first evaluation of the
    n-step return, so it matches a per-step bootstrap oracle exactly.
    """
    T, E = rewards.shape
    out = np.empty((T, E), dtype=np.float64)
    g_next = np.zeros(E, dtype=np.float64)
    for t in range(T - 1, -1, -1):
        r = rewards[t]
        vn = values_next[t]
        a = (1.0 - lam) * vn
        b = lam * g_next
        cont = r + gamma * (a + b)
        bound = r + gamma * vn
        g = np.where(trunc[t] | (t == T - 1), bound, cont)
        g = np.where(done[t], r, g)
        out[t] = g
        g_next = g
    return out
