"""
Convolution module for the layer stack.

This module defines valid (unpadded, stride 1) cross-correlation over
(batch, channels, height, width) tensors, computed on strided window views,
and the Conv2D layer wrapping it.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.layers.base import Layer, glorot_uniform
from src.layers.tensor import ParamSet, Tensor, expect_shape
from src.utils.errors import ShapeError
from src.utils.modes import NormMode


def _windows(x: Tensor, kh: int, kw: int) -> Tensor:
    # (N, C, H, W) -> (N, C, H - kh + 1, W - kw + 1, kh, kw)
    return sliding_window_view(x, (kh, kw), axis=(2, 3))


def conv_forward(x: Tensor, weights: Tensor, biases: Tensor) -> tuple[Tensor, tuple]:
    """
    Valid cross-correlation with stride 1.

    out[n, o, i, j] = sum_{c, a, b} x[n, c, i + a, j + b] * w[o, c, a, b] + b[o]

    Args:
        x: Input of shape (N, C, H, W)
        weights: Filters of shape (O, C, kh, kw)
        biases: Per-filter bias of shape (O,)

    Returns:
        tuple: (output of shape (N, O, H - kh + 1, W - kw + 1), cache)
    """
    if x.ndim != 4 or weights.ndim != 4:
        raise ShapeError(f"conv expects 4-d input and weights, got {x.shape} and {weights.shape}")
    out_channels, in_channels, kh, kw = weights.shape
    expect_shape(x, (None, in_channels, None, None), "conv input")
    expect_shape(biases, (out_channels,), "conv biases")
    if x.shape[2] < kh or x.shape[3] < kw:
        raise ShapeError(f"conv input {x.shape} is smaller than the {kh}x{kw} kernel")

    windows = _windows(x, kh, kw)
    out = np.tensordot(windows, weights, axes=([1, 4, 5], [1, 2, 3]))
    out = np.ascontiguousarray(np.moveaxis(out, 3, 1))
    out += biases[None, :, None, None]
    return out, (x, weights)


def conv_backward(grad_out: Tensor, cache: tuple) -> tuple[Tensor, Tensor, Tensor]:
    """
    Exact gradients of conv_forward.

    Args:
        grad_out: Gradient w.r.t. the output, shape (N, O, Ho, Wo)
        cache: Cache returned by conv_forward

    Returns:
        tuple: (grad_input, grad_weights, grad_biases)
    """
    x, weights = cache
    out_channels, _, kh, kw = weights.shape
    expect_shape(
        grad_out,
        (x.shape[0], out_channels, x.shape[2] - kh + 1, x.shape[3] - kw + 1),
        "conv output gradient",
    )

    grad_biases = grad_out.sum(axis=(0, 2, 3))
    grad_weights = np.tensordot(grad_out, _windows(x, kh, kw), axes=([0, 2, 3], [0, 2, 3]))

    # Full correlation of the padded output gradient with the flipped kernel
    padded = np.pad(grad_out, ((0, 0), (0, 0), (kh - 1, kh - 1), (kw - 1, kw - 1)))
    flipped = weights[:, :, ::-1, ::-1]
    grad_input = np.tensordot(_windows(padded, kh, kw), flipped, axes=([1, 4, 5], [0, 2, 3]))
    grad_input = np.ascontiguousarray(np.moveaxis(grad_input, 3, 1))
    return grad_input, grad_weights, grad_biases


class Conv2D(Layer):
    """
    Convolution layer with square filters, stride 1 and no padding.
    """

    trainable = ("weight", "bias")

    def __init__(self: "Conv2D", name: str, in_channels: int, out_channels: int, kernel: int):
        """
        Initialize a new Conv2D layer.

        Args:
            name: Prefix for this layer's ParamSet entries
            in_channels: Channels of the input
            out_channels: Number of filters
            kernel: Filter height and width
        """
        super().__init__(name)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel

    def output_shape(self: "Conv2D", input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if len(input_shape) != 3 or input_shape[0] != self.in_channels:
            raise ShapeError(
                f"{self.name} expects ({self.in_channels}, H, W), got {input_shape}"
            )
        _, height, width = input_shape
        if height < self.kernel or width < self.kernel:
            raise ShapeError(f"{self.name} input {input_shape} is smaller than its kernel")
        return (self.out_channels, height - self.kernel + 1, width - self.kernel + 1)

    def init_params(self: "Conv2D", rng: np.random.Generator) -> ParamSet:
        area = self.kernel * self.kernel
        shape = (self.out_channels, self.in_channels, self.kernel, self.kernel)
        return {
            self.key("weight"): glorot_uniform(
                rng, shape, self.in_channels * area, self.out_channels * area
            ),
            self.key("bias"): np.zeros(self.out_channels),
        }

    def forward(self: "Conv2D", params: ParamSet, x: Tensor, mode: NormMode) -> tuple[Tensor, object]:
        return conv_forward(x, params[self.key("weight")], params[self.key("bias")])

    def backward(
        self: "Conv2D", params: ParamSet, cache: object, grad_out: Tensor
    ) -> tuple[Tensor, ParamSet]:
        grad_input, grad_weights, grad_biases = conv_backward(grad_out, cache)
        return grad_input, {self.key("weight"): grad_weights, self.key("bias"): grad_biases}
