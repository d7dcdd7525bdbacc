"""Pure-numpy implementations of the per-batch training kernels.

Reference path for the numba twins in ``kernels_numba``; selected via the
``CYCTRAIN_BACKEND`` environment variable (see ``backend``).  All kernels
take float64 arrays; the ``*_inplace``-style ones mutate their first
argument.
"""

import numpy as np


def softmax_rows(scaled):
    """Row-wise softmax with max-subtraction, on already temperature-scaled logits."""
    m = scaled.max(axis=1, keepdims=True)
    e = np.exp(scaled - m)
    return e / e.sum(axis=1, keepdims=True)


def softmax_nll_rows(scaled, targets):
    """Fused softmax + negative log-likelihood per row.

    Losses use the log-sum-exp form so a vanishing target probability
    never produces log(0).
    """
    m = scaled.max(axis=1)
    e = np.exp(scaled - m[:, None])
    z = e.sum(axis=1)
    probs = e / z[:, None]
    rows = np.arange(scaled.shape[0])
    losses = np.log(z) + m - scaled[rows, targets]
    return probs, losses


def masked_dlogits(probs, targets, mask, scale):
    """Gradient of the masked mean loss w.r.t. the raw logits.

    ``mask`` is a 0/1 float vector; ``scale`` folds in the temperature and
    the count of active samples (zero when the whole batch is masked).
    """
    dz = probs * (mask[:, None] * scale)
    dz[np.arange(len(targets)), targets] -= mask * scale
    return dz


def relu(x):
    return np.maximum(x, 0.0)


def relu_backward(d_act, act):
    """Zero the gradient wherever the activation was clamped (in place)."""
    d_act[act <= 0.0] = 0.0


def colsum(m):
    return m.sum(axis=0)


def sgd_update(w, v, g, lr, momentum, wd):
    """Momentum update with coupled weight decay, in place on flat views."""
    v *= momentum
    v += g + wd * w
    w -= lr * v


def clip_value(g, c):
    """Clamp every component to [-c, c] in place."""
    np.clip(g, -c, c, out=g)


def sumsq(g):
    return float(np.dot(g, g))


def scale_inplace(g, s):
    g *= s
