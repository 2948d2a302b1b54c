"""
Activation module for the layer stack.

This module defines the ReLU and rowwise softmax stages. Softmax stays a
stage of its own: the losses consume probabilities, not logits.
"""

import numpy as np

from src.layers.base import Layer
from src.layers.tensor import ParamSet, Tensor, expect_shape
from src.utils.errors import ShapeError
from src.utils.modes import NormMode


def relu_forward(x: Tensor) -> tuple[Tensor, Tensor]:
    return np.maximum(x, 0.0), x


def relu_backward(grad_out: Tensor, cache: Tensor) -> Tensor:
    """Pass the gradient where the cached input was positive."""
    expect_shape(grad_out, cache.shape, "relu output gradient")
    return grad_out * (cache > 0.0)


def softmax_forward(x: Tensor) -> tuple[Tensor, Tensor]:
    """
    Rowwise softmax, stabilized by subtracting each row's maximum.

    Args:
        x: Logits of shape (N, K)

    Returns:
        tuple: (probabilities, cache)
    """
    if x.ndim != 2:
        raise ShapeError(f"softmax expects (N, K) logits, got {x.shape}")
    shifted = np.exp(x - x.max(axis=1, keepdims=True))
    probs = shifted / shifted.sum(axis=1, keepdims=True)
    return probs, probs


def softmax_backward(grad_out: Tensor, cache: Tensor) -> Tensor:
    """Vector-Jacobian product y * (g - sum(g * y)) per row."""
    probs = cache
    expect_shape(grad_out, probs.shape, "softmax output gradient")
    return probs * (grad_out - (grad_out * probs).sum(axis=1, keepdims=True))


class ReLU(Layer):
    def forward(self: "ReLU", params: ParamSet, x: Tensor, mode: NormMode) -> tuple[Tensor, object]:
        return relu_forward(x)

    def backward(
        self: "ReLU", params: ParamSet, cache: object, grad_out: Tensor
    ) -> tuple[Tensor, ParamSet]:
        return relu_backward(grad_out, cache), {}


class Softmax(Layer):
    def output_shape(self: "Softmax", input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if len(input_shape) != 1:
            raise ShapeError(f"{self.name} expects flat logits, got {input_shape}")
        return input_shape

    def forward(
        self: "Softmax", params: ParamSet, x: Tensor, mode: NormMode
    ) -> tuple[Tensor, object]:
        return softmax_forward(x)

    def backward(
        self: "Softmax", params: ParamSet, cache: object, grad_out: Tensor
    ) -> tuple[Tensor, ParamSet]:
        return softmax_backward(grad_out, cache), {}
