"""
Base Layer module for the layer stack.

This module provides the Layer class that every layer derives from,
implementing the shared interface:
- shape inference for the fail-fast shape chain
- parameter and buffer naming inside a ParamSet
- forward and backward passes with explicit caches
"""

import numpy as np

from src.layers.tensor import ParamSet, Tensor
from src.utils.modes import NormMode


class Layer:
    """
    Base class for layers.

    A layer owns no numbers. Its trainable parameters and buffers live in a
    ParamSet under keys "<layer name>.<field>", so the same layer can serve
    several parameter sets (training, finite differences, checkpoints).

    Class attributes:
        trainable: Field names updated by the optimizer
        buffers: Field names carried along but never differentiated
    """

    trainable: tuple[str, ...] = ()
    buffers: tuple[str, ...] = ()

    def __init__(self: "Layer", name: str):
        """
        Initialize a new Layer.

        Args:
            name: Prefix for this layer's entries in a ParamSet
        """
        self.name = name

    def key(self: "Layer", field: str) -> str:
        return f"{self.name}.{field}"

    def output_shape(self: "Layer", input_shape: tuple[int, ...]) -> tuple[int, ...]:
        """
        Compute the per-example output shape.

        Sub-classes with shape constraints override this and raise ShapeError.

        Args:
            input_shape: Per-example input shape (batch axis excluded)

        Returns:
            tuple: Per-example output shape
        """
        return input_shape

    def init_params(self: "Layer", rng: np.random.Generator) -> ParamSet:
        """
        Create this layer's entries of a fresh ParamSet.

        Args:
            rng: Seeded generator for random initialization

        Returns:
            dict: Parameter and buffer arrays keyed by full name
        """
        return {}

    def forward(
        self: "Layer", params: ParamSet, x: Tensor, mode: NormMode
    ) -> tuple[Tensor, object]:
        """
        Run the forward pass.

        Args:
            params: Parameter set holding this layer's entries
            x: Batch input
            mode: Training or inference

        Returns:
            tuple: (output, cache for backward)
        """
        raise NotImplementedError

    def backward(
        self: "Layer", params: ParamSet, cache: object, grad_out: Tensor
    ) -> tuple[Tensor, ParamSet]:
        """
        Run the backward pass.

        Args:
            params: Parameter set used in the matching forward pass
            cache: Cache returned by forward
            grad_out: Gradient of the loss with respect to the output

        Returns:
            tuple: (gradient w.r.t. the input, gradients keyed like params)
        """
        raise NotImplementedError


def glorot_uniform(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int
) -> Tensor:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)
