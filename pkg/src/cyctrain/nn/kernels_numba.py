"""Numba-JIT twins of the kernels in ``kernels_numpy``.

Same signatures and in-place semantics; loops are fused per row so the
batch makes one pass over memory.  ``fastmath`` stays off: runs must be
bit-reproducible, and the numpy path is the semantic reference.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def softmax_rows(scaled):
    n, k = scaled.shape
    out = np.empty((n, k))
    for i in range(n):
        m = scaled[i, 0]
        for j in range(1, k):
            if scaled[i, j] > m:
                m = scaled[i, j]
        s = 0.0
        for j in range(k):
            e = np.exp(scaled[i, j] - m)
            out[i, j] = e
            s += e
        inv = 1.0 / s
        for j in range(k):
            out[i, j] *= inv
    return out


@njit(cache=True)
def softmax_nll_rows(scaled, targets):
    n, k = scaled.shape
    probs = np.empty((n, k))
    losses = np.empty(n)
    for i in range(n):
        m = scaled[i, 0]
        for j in range(1, k):
            if scaled[i, j] > m:
                m = scaled[i, j]
        s = 0.0
        for j in range(k):
            e = np.exp(scaled[i, j] - m)
            probs[i, j] = e
            s += e
        inv = 1.0 / s
        for j in range(k):
            probs[i, j] *= inv
        losses[i] = np.log(s) + m - scaled[i, targets[i]]
    return probs, losses


@njit(cache=True)
def masked_dlogits(probs, targets, mask, scale):
    n, k = probs.shape
    dz = np.empty((n, k))
    for i in range(n):
        s = mask[i] * scale
        for j in range(k):
            dz[i, j] = probs[i, j] * s
        dz[i, targets[i]] -= s
    return dz


@njit(cache=True)
def relu(x):
    n, k = x.shape
    out = np.empty((n, k))
    for i in range(n):
        for j in range(k):
            v = x[i, j]
            out[i, j] = v if v > 0.0 else 0.0
    return out


@njit(cache=True)
def relu_backward(d_act, act):
    n, k = d_act.shape
    for i in range(n):
        for j in range(k):
            if act[i, j] <= 0.0:
                d_act[i, j] = 0.0


@njit(cache=True)
def colsum(m):
    n, k = m.shape
    out = np.zeros(k)
    for i in range(n):
        for j in range(k):
            out[j] += m[i, j]
    return out


@njit(cache=True)
def sgd_update(w, v, g, lr, momentum, wd):
    for i in range(w.size):
        vi = momentum * v[i] + (g[i] + wd * w[i])
        v[i] = vi
        w[i] -= lr * vi


@njit(cache=True)
def clip_value(g, c):
    for i in range(g.size):
        if g[i] > c:
            g[i] = c
        elif g[i] < -c:
            g[i] = -c


@njit(cache=True)
def sumsq(g):
    s = 0.0
    for i in range(g.size):
        s += g[i] * g[i]
    return s


@njit(cache=True)
def scale_inplace(g, s):
    for i in range(g.size):
        g[i] *= s
