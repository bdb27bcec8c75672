# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Must stay bit-identical to medoe._kernels.pure."""

import numpy as np


def sample_categorical_rows(double[:, ::1] probs, double[::1] u):
    cdef Py_ssize_t rows = probs.shape[0]
    cdef Py_ssize_t cols = probs.shape[1]
    out_arr = np.empty(rows, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t r, j
    cdef double c, uu
    for r in range(rows):
        uu = u[r]
        c = probs[r, 0]
        j = 0
        while uu >= c and j < cols - 1:
            j += 1
            c = c + probs[r, j]
        out[r] = j
    return out_arr


def chainball_step_batch(long long[::1] states, long long[::1] jidx,
                         double[:, ::1] u, double[:, ::1] forward,
                         double[:, ::1] back_cdf, long long restart,
                         long long n_states, long long term_lo,
                         long long term_hi, bint goals_terminal):
    cdef Py_ssize_t E = states.shape[0]
    nxt_arr = np.empty(E, dtype=np.int64)
    rew_arr = np.empty(E, dtype=np.float64)
    done_arr = np.zeros(E, dtype=bool)
    cdef long long[::1] nxt = nxt_arr
    cdef double[::1] rew = rew_arr
    cdef unsigned char[::1] done = done_arr.view(np.uint8)
    cdef Py_ssize_t e, t
    cdef long long s, n
    cdef double u0, u1
    cdef bint fwd, scored, conceded, exited
    for e in range(E):
        s = states[e]
        u0 = u[e, 0]
        u1 = u[e, 1]
        fwd = u0 < forward[s - 1, jidx[e]]
        scored = fwd and s == n_states
        conceded = (not fwd) and s == 1
        if fwd:
            n = restart if scored else s + 1
        elif conceded:
            n = restart
        else:
            t = 0
            while u1 >= back_cdf[s - 1, t]:
                t += 1
            n = t + 1
        rew[e] = 1.0 if scored else (-1.0 if conceded else 0.0)
        exited = (n < term_lo or n > term_hi) and not (scored or conceded)
        done[e] = exited or (goals_terminal and (scored or conceded))
        nxt[e] = n
    return nxt_arr, rew_arr, done_arr


def lambda_returns(double[:, ::1] rewards, double[:, ::1] values_next,
                   unsigned char[:, ::1] done, unsigned char[:, ::1] trunc,
                   double gamma, double lam):
    cdef Py_ssize_t T = rewards.shape[0]
    cdef Py_ssize_t E = rewards.shape[1]
    out_arr = np.empty((T, E), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t t, e
    cdef double r, vn, a, b, g
    for e in range(E):
        g = 0.0
        for t in range(T - 1, -1, -1):
            r = rewards[t, e]
            vn = values_next[t, e]
            if done[t, e]:
                g = r
            elif trunc[t, e] or t == T - 1:
                g = r + gamma * vn
            else:
                a = (1.0 - lam) * vn
                b = lam * g
                g = r + gamma * (a + b)
            out[t, e] = g
    return out_arr
