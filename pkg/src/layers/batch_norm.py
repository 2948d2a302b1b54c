"""
Batch normalization module for the layer stack.

Statistics are taken per channel (axis 1) over the batch and every spatial
axis. Training mode normalizes with the batch statistics and folds them into
exponential running averages; inference mode uses the running averages.
"""

import numpy as np

from src.layers.base import Layer
from src.layers.tensor import ParamSet, Tensor, expect_shape
from src.utils.constants import BN_EPSILON, BN_MOMENTUM
from src.utils.errors import RunningStatsError, ShapeError
from src.utils.modes import NormMode


def _broadcast(values: Tensor, ndim: int) -> Tensor:
    return values.reshape((1, -1) + (1,) * (ndim - 2))


def batchnorm_forward(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    mode: NormMode,
    running_mean: Tensor,
    running_var: Tensor,
    steps: Tensor,
    momentum: float = BN_MOMENTUM,
    eps: float = BN_EPSILON,
) -> tuple[Tensor, tuple]:
    """
    Normalize x per channel and apply the affine map gamma * x_hat + beta.

    In training mode running_mean, running_var and the one-element step
    counter are updated in place.

    Args:
        x: Input of shape (N, C, ...)
        gamma: Per-channel scale
        beta: Per-channel shift
        mode: NormMode.TRAIN uses batch statistics, NormMode.INFER running ones
        running_mean: Running per-channel mean
        running_var: Running per-channel variance
        steps: One-element array counting training steps taken
        momentum: Weight of the current batch in the running averages
        eps: Variance floor

    Returns:
        tuple: (output, cache)

    Raises:
        RunningStatsError: In inference mode before any training step
    """
    if x.ndim < 2:
        raise ShapeError(f"batch norm expects (N, C, ...) input, got {x.shape}")
    channels = x.shape[1]
    for what, values in (("gamma", gamma), ("beta", beta), ("running mean", running_mean), ("running variance", running_var)):
        expect_shape(values, (channels,), f"batch norm {what}")
    axes = (0,) + tuple(range(2, x.ndim))

    if mode is NormMode.TRAIN:
        mean = x.mean(axis=axes)
        var = x.var(axis=axes)
        count = x.size // channels
        unbiased = var * count / (count - 1) if count > 1 else var
        running_mean *= 1.0 - momentum
        running_mean += momentum * mean
        running_var *= 1.0 - momentum
        running_var += momentum * unbiased
        steps += 1
    else:
        if steps[0] == 0:
            raise RunningStatsError("batch norm has no running statistics yet")
        mean, var = running_mean, running_var

    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = (x - _broadcast(mean, x.ndim)) * _broadcast(inv_std, x.ndim)
    out = _broadcast(gamma, x.ndim) * x_hat + _broadcast(beta, x.ndim)
    return out, (x_hat, inv_std, gamma, axes, mode)


def batchnorm_backward(grad_out: Tensor, cache: tuple) -> tuple[Tensor, Tensor, Tensor]:
    """
    Exact gradients of batchnorm_forward.

    Args:
        grad_out: Gradient w.r.t. the output
        cache: Cache returned by batchnorm_forward

    Returns:
        tuple: (grad_input, grad_gamma, grad_beta)
    """
    x_hat, inv_std, gamma, axes, mode = cache
    expect_shape(grad_out, x_hat.shape, "batch norm output gradient")
    ndim = grad_out.ndim

    grad_beta = grad_out.sum(axis=axes)
    grad_gamma = (grad_out * x_hat).sum(axis=axes)
    scale = _broadcast(gamma * inv_std, ndim)

    if mode is NormMode.INFER:
        # Running statistics are constants
        return grad_out * scale, grad_gamma, grad_beta

    count = grad_out.size // grad_out.shape[1]
    grad_input = scale * (
        grad_out
        - _broadcast(grad_beta, ndim) / count
        - x_hat * _broadcast(grad_gamma, ndim) / count
    )
    return grad_input, grad_gamma, grad_beta


class BatchNorm(Layer):
    """
    Per-channel batch normalization layer.
    """

    trainable = ("gamma", "beta")
    buffers = ("running_mean", "running_var", "steps")

    def __init__(self: "BatchNorm", name: str, channels: int):
        super().__init__(name)
        self.channels = channels

    def output_shape(self: "BatchNorm", input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if not input_shape or input_shape[0] != self.channels:
            raise ShapeError(f"{self.name} expects {self.channels} channels, got {input_shape}")
        return input_shape

    def init_params(self: "BatchNorm", rng: np.random.Generator) -> ParamSet:
        return {
            self.key("gamma"): np.ones(self.channels),
            self.key("beta"): np.zeros(self.channels),
            self.key("running_mean"): np.zeros(self.channels),
            self.key("running_var"): np.ones(self.channels),
            self.key("steps"): np.zeros(1),
        }

    def forward(
        self: "BatchNorm", params: ParamSet, x: Tensor, mode: NormMode
    ) -> tuple[Tensor, object]:
        return batchnorm_forward(
            x,
            params[self.key("gamma")],
            params[self.key("beta")],
            mode,
            params[self.key("running_mean")],
            params[self.key("running_var")],
            params[self.key("steps")],
        )

    def backward(
        self: "BatchNorm", params: ParamSet, cache: object, grad_out: Tensor
    ) -> tuple[Tensor, ParamSet]:
        grad_input, grad_gamma, grad_beta = batchnorm_backward(grad_out, cache)
        return grad_input, {self.key("gamma"): grad_gamma, self.key("beta"): grad_beta}
