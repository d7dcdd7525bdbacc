"""Small fully connected classifier with manual backprop.

Everything is float64.  The loss is temperature-scaled softmax
cross-entropy with optional per-sample masking: masked samples contribute
neither to the mean loss nor to the gradients, and the mean divides by
the count of surviving samples (an all-masked batch yields zero loss and
zero gradients).

A network plus its optimizer state belongs to one training run; batches
are processed sequentially so a run is bit-deterministic given its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels as K


class NonFiniteError(RuntimeError):
    """Raised when parameters or gradients stop being finite."""


@dataclass
class DenseNet:
    """ReLU MLP parameters: weights[l] is (n_in, n_out), biases[l] is (n_out,)."""

    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def parameter_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)


def init_net(layer_sizes, seed) -> DenseNet:
    """He-initialized network; biases start at zero."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ValueError(f"need at least [in, out] positive layer sizes, got {sizes}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(sizes, sizes[1:]):
        weights.append(rng.normal(0.0, math.sqrt(2.0 / n_in), size=(n_in, n_out)))
        biases.append(np.zeros(n_out))
    return DenseNet(sizes, weights, biases)


def _forward_cached(net: DenseNet, x: np.ndarray) -> list[np.ndarray]:
    """Activations per layer: [input, hidden..., logits]."""
    acts = [x]
    a = x
    last = net.n_layers - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        a = K.relu(z) if l < last else z
        acts.append(a)
    return acts


def forward(net: DenseNet, x: np.ndarray) -> np.ndarray:
    """Logits for a batch of feature rows."""
    return _forward_cached(net, np.asarray(x, dtype=np.float64))[-1]


def softmax_t(logits, temperature: float) -> np.ndarray:
    """Temperature softmax over the last axis.

    Higher temperatures soften the distribution; the argmax never moves.
    Rejects non-positive temperatures and non-finite logits.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    z = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    if not np.isfinite(z).all():
        raise ValueError("logits contain non-finite entries")
    out = K.softmax_rows(z / temperature)
    return out[0] if np.ndim(logits) == 1 else out


def mask_high_loss(per_sample_losses: np.ndarray, threshold: float) -> np.ndarray:
    """Boolean keep-mask: True where the sample's loss is within threshold."""
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    return np.asarray(per_sample_losses) <= threshold


def cross_entropy_t(logits, targets, temperature: float = 1.0, mask=None):
    """Per-sample temperature cross-entropy and the masked batch mean.

    Returns ``(losses, mean_loss)``.  ``mask`` is a boolean keep-mask; the
    mean divides by the number of kept samples.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    z = np.asarray(logits, dtype=np.float64)
    t = np.asarray(targets, dtype=np.int64)
    n_classes = z.shape[1]
    if t.min() < 0 or t.max() >= n_classes:
        raise ValueError(f"targets must lie in [0, {n_classes})")
    _, losses = K.softmax_nll_rows(z / temperature, t)
    if mask is None:
        return losses, float(losses.mean())
    kept = int(np.count_nonzero(mask))
    mean = float(losses[np.asarray(mask, dtype=bool)].sum() / kept) if kept else 0.0
    return losses, mean


@dataclass
class GradientBundle:
    """Gradients of the masked mean loss plus the per-sample losses."""

    d_weights: list[np.ndarray]
    d_biases: list[np.ndarray]
    losses: np.ndarray
    mean_loss: float
    mask: np.ndarray | None = None
    n_active: int = 0

    def flat_arrays(self):
        return self.d_weights + self.d_biases

    def max_abs(self) -> float:
        return max(float(np.abs(g).max()) for g in self.flat_arrays())

    def global_norm(self) -> float:
        return math.sqrt(sum(K.sumsq(g.ravel()) for g in self.flat_arrays()))


def loss_and_grads(net: DenseNet, x, targets, temperature: float = 1.0,
                   mask=None, mask_threshold: float | None = None) -> GradientBundle:
    """One forward/backward pass for a batch.

    Either pass an explicit boolean keep-``mask`` or a ``mask_threshold``
    to drop samples whose loss exceeds it (the zero-their-contribution
    variant of clipping).  Gradients are exact for the masked mean of the
    temperature-scaled cross-entropy.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(targets, dtype=np.int64)
    if x.shape[0] != t.shape[0]:
        raise ValueError("feature and target batch sizes differ")
    if mask is not None and len(mask) != x.shape[0]:
        raise ValueError("mask length must equal the batch size")
    acts = _forward_cached(net, x)
    logits = acts[-1]
    if not np.isfinite(logits).all():
        raise NonFiniteError("forward pass produced non-finite logits")
    if t.size and (t.min() < 0 or t.max() >= logits.shape[1]):
        raise ValueError(f"targets must lie in [0, {logits.shape[1]})")

    probs, losses = K.softmax_nll_rows(logits / temperature, t)
    if mask is None and mask_threshold is not None:
        mask = mask_high_loss(losses, mask_threshold)
    if mask is None:
        maskf = np.ones(len(t))
        n_active = len(t)
    else:
        maskf = np.asarray(mask, dtype=np.float64)
        n_active = int(maskf.sum())
    mean_loss = float((losses * maskf).sum() / n_active) if n_active else 0.0

    scale = 1.0 / (temperature * n_active) if n_active else 0.0
    dz = K.masked_dlogits(probs, t, maskf, scale)
    d_weights = [None] * net.n_layers
    d_biases = [None] * net.n_layers
    for l in range(net.n_layers - 1, -1, -1):
        d_weights[l] = acts[l].T @ dz
        d_biases[l] = K.colsum(dz)
        if l > 0:
            dz = dz @ net.weights[l].T
            K.relu_backward(dz, acts[l])
    return GradientBundle(d_weights, d_biases, losses, mean_loss,
                          mask=None if mask is None else np.asarray(mask, dtype=bool),
                          n_active=n_active)


def backward(net: DenseNet, x, targets, temperature: float = 1.0,
             mask=None) -> GradientBundle:
    """Gradients of the masked mean loss for a batch (see loss_and_grads)."""
    return loss_and_grads(net, x, targets, temperature=temperature, mask=mask)


def clip_gradients(grads: GradientBundle, threshold: float | None,
                   mode: str = "value") -> GradientBundle:
    """Clip the bundle's gradients in place and return it.

    ``value`` clamps each component to [-threshold, threshold]; ``norm``
    rescales everything when the global L2 norm exceeds the threshold.
    ``None`` or infinite thresholds are the identity.
    """
    if threshold is None or math.isinf(threshold):
        return grads
    if threshold <= 0:
        raise ValueError(f"clip threshold must be > 0, got {threshold}")
    if mode == "value":
        for g in grads.flat_arrays():
            K.clip_value(g.ravel(), threshold)
    elif mode == "norm":
        norm = grads.global_norm()
        if norm > threshold:
            s = threshold / norm
            for g in grads.flat_arrays():
                K.scale_inplace(g.ravel(), s)
    else:
        raise ValueError(f"unknown clip mode {mode!r}")
    return grads


class SgdMomentum:
    """SGD with momentum and coupled weight decay.

    velocity <- momentum * velocity + (grad + wd * param)
    param    <- param - lr * velocity
    """

    def __init__(self, net: DenseNet):
        self.v_weights = [np.zeros_like(w) for w in net.weights]
        self.v_biases = [np.zeros_like(b) for b in net.biases]

    def step(self, net: DenseNet, grads: GradientBundle, lr: float,
             momentum: float = 0.0, weight_decay: float = 0.0) -> DenseNet:
        if not (math.isfinite(lr) and math.isfinite(momentum)
                and math.isfinite(weight_decay)):
            raise ValueError("hyper-parameters must be finite")
        for w, v, g in zip(net.weights, self.v_weights, grads.d_weights):
            K.sgd_update(w.ravel(), v.ravel(), g.ravel(), lr, momentum, weight_decay)
        for b, v, g in zip(net.biases, self.v_biases, grads.d_biases):
            K.sgd_update(b, v, g, lr, momentum, weight_decay)
        for l, w in enumerate(net.weights):
            if not np.isfinite(w).all() or not np.isfinite(net.biases[l]).all():
                raise NonFiniteError(f"non-finite parameters in layer {l} after update")
        return net


def predict(net: DenseNet, x) -> np.ndarray:
    return np.argmax(forward(net, x), axis=1)


def accuracy(net: DenseNet, x, targets) -> float:
    """Fraction of correct argmax predictions (temperature-independent)."""
    return float(np.mean(predict(net, x) == np.asarray(targets)))
