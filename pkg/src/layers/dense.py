"""
Fully-connected module for the layer stack.

The dense layer flattens everything after the batch axis, so it can follow
a convolution stack directly.
"""

import math

import numpy as np

from src.layers.base import Layer, glorot_uniform
from src.layers.tensor import ParamSet, Tensor, expect_shape
from src.utils.errors import ShapeError
from src.utils.modes import NormMode


def dense_forward(x: Tensor, weights: Tensor, biases: Tensor) -> tuple[Tensor, tuple]:
    """
    Affine map x W^T + b on flattened rows.

    Args:
        x: Input of shape (N, ...) with prod(...) == D
        weights: Matrix of shape (O, D)
        biases: Vector of shape (O,)

    Returns:
        tuple: (output of shape (N, O), cache)
    """
    flat = x.reshape(x.shape[0], -1)
    expect_shape(weights, (None, flat.shape[1]), "dense weights")
    expect_shape(biases, (weights.shape[0],), "dense biases")
    return flat @ weights.T + biases, (x.shape, flat, weights)


def dense_backward(grad_out: Tensor, cache: tuple) -> tuple[Tensor, Tensor, Tensor]:
    input_shape, flat, weights = cache
    expect_shape(grad_out, (flat.shape[0], weights.shape[0]), "dense output gradient")
    grad_input = (grad_out @ weights).reshape(input_shape)
    return grad_input, grad_out.T @ flat, grad_out.sum(axis=0)


class Dense(Layer):
    """
    Fully-connected layer over the flattened input.
    """

    trainable = ("weight", "bias")

    def __init__(self: "Dense", name: str, in_features: int, out_features: int):
        super().__init__(name)
        self.in_features = in_features
        self.out_features = out_features

    def output_shape(self: "Dense", input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if math.prod(input_shape) != self.in_features:
            raise ShapeError(
                f"{self.name} expects {self.in_features} features, got {input_shape}"
            )
        return (self.out_features,)

    def init_params(self: "Dense", rng: np.random.Generator) -> ParamSet:
        return {
            self.key("weight"): glorot_uniform(
                rng,
                (self.out_features, self.in_features),
                self.in_features,
                self.out_features,
            ),
            self.key("bias"): np.zeros(self.out_features),
        }

    def forward(self: "Dense", params: ParamSet, x: Tensor, mode: NormMode) -> tuple[Tensor, object]:
        return dense_forward(x, params[self.key("weight")], params[self.key("bias")])

    def backward(
        self: "Dense", params: ParamSet, cache: object, grad_out: Tensor
    ) -> tuple[Tensor, ParamSet]:
        grad_input, grad_weights, grad_biases = dense_backward(grad_out, cache)
        return grad_input, {self.key("weight"): grad_weights, self.key("bias"): grad_biases}
