"""Finite-difference gradient oracle, shared by the unit and acceptance tests.

Central differences assume the loss is differentiable at the evaluation
point; a ReLU pre-activation within the perturbation's reach of zero
breaks that, so batches are screened with ``min_kink_distance`` before
checking.  The error metric is the usual symmetric relative error with a
small floor so that finite-difference noise on near-zero components does
not register as disagreement.
"""

import numpy as np


def batch_loss(net, x, targets, temperature=1.0, mask=None):
    """Masked mean cross-entropy computed independently of the library path."""
    a = np.asarray(x, dtype=np.float64)
    last = len(net.weights) - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        a = np.maximum(z, 0.0) if l < last else z
    scaled = a / temperature
    m = scaled.max(axis=1, keepdims=True)
    log_probs = scaled - m - np.log(np.exp(scaled - m).sum(axis=1, keepdims=True))
    losses = -log_probs[np.arange(len(targets)), targets]
    if mask is None:
        return float(losses.mean())
    kept = int(np.count_nonzero(mask))
    return float(losses[mask].sum() / kept) if kept else 0.0


def fd_gradients(net, x, targets, temperature=1.0, mask=None, h=1e-5):
    """Central finite differences over every parameter."""
    d_weights = [np.zeros_like(w) for w in net.weights]
    d_biases = [np.zeros_like(b) for b in net.biases]
    for arr, out in list(zip(net.weights, d_weights)) + list(zip(net.biases, d_biases)):
        flat = arr.ravel()
        grad = out.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = batch_loss(net, x, targets, temperature, mask)
            flat[i] = orig - h
            down = batch_loss(net, x, targets, temperature, mask)
            flat[i] = orig
            grad[i] = (up - down) / (2 * h)
    return d_weights, d_biases


def max_rel_error(analytic, numeric, floor=1e-6):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def min_kink_distance(net, x):
    """Smallest |pre-activation| over the hidden layers for this batch."""
    a = np.asarray(x, dtype=np.float64)
    last = len(net.weights) - 1
    smallest = np.inf
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        if l < last:
            smallest = min(smallest, float(np.abs(z).min()))
            a = np.maximum(z, 0.0)
        else:
            a = z
    return smallest


def draw_differentiable_batch(net, rng, batch, dims, classes, kink_tol=1e-3,
                              attempts=50):
    """Sample (x, targets) whose loss is differentiable at the current net."""
    for _ in range(attempts):
        x = rng.normal(size=(batch, dims))
        if min_kink_distance(net, x) >= kink_tol:
            return x, rng.integers(0, classes, size=batch)
    raise RuntimeError("could not sample a batch clear of ReLU kinks")
