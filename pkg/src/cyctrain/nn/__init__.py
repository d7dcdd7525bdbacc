from .backend import active_backend, load_kernels
from .network import (
    DenseNet,
    GradientBundle,
    NonFiniteError,
    SgdMomentum,
    accuracy,
    backward,
    clip_gradients,
    cross_entropy_t,
    forward,
    init_net,
    loss_and_grads,
    mask_high_loss,
    predict,
    softmax_t,
)

__all__ = [
    "DenseNet",
    "GradientBundle",
    "NonFiniteError",
    "SgdMomentum",
    "accuracy",
    "active_backend",
    "backward",
    "clip_gradients",
    "cross_entropy_t",
    "forward",
    "init_net",
    "load_kernels",
    "loss_and_grads",
    "mask_high_loss",
    "predict",
    "softmax_t",
]
