"""
Network module for the layer stack.

This module defines the layer descriptors, the NetworkSpec that chains them
with a fail-fast shape check, and the Network that runs forward and backward
passes over a ParamSet.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.layers.activations import ReLU, Softmax
from src.layers.base import Layer
from src.layers.batch_norm import BatchNorm
from src.layers.conv import Conv2D
from src.layers.dense import Dense
from src.layers.tensor import ParamSet, Tensor, as_tensor, check_finite
from src.utils.constants import (
    CONV_FILTERS,
    CONV_KERNEL,
    DEBUG_MODE,
    IMAGE_SIZE,
    NUM_CLASSES,
)
from src.utils.errors import ShapeError
from src.utils.modes import NormMode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvSpec:
    out_channels: int
    kernel: int


@dataclass(frozen=True)
class BatchNormSpec:
    channels: int


@dataclass(frozen=True)
class ReluSpec:
    pass


@dataclass(frozen=True)
class DenseSpec:
    out_features: int


@dataclass(frozen=True)
class SoftmaxSpec:
    pass


LayerSpec = ConvSpec | BatchNormSpec | ReluSpec | DenseSpec | SoftmaxSpec


@dataclass(frozen=True)
class NetworkSpec:
    """
    Ordered layer descriptors applied to a (channels, height, width) input.

    Construction checks that every layer accepts the shape produced by its
    predecessor and raises ShapeError otherwise.

    Attributes:
        input_shape: Per-example input shape
        layers: Layer descriptors in forward order
    """

    input_shape: tuple[int, int, int]
    layers: tuple[LayerSpec, ...]

    def __post_init__(self: "NetworkSpec"):
        self.shapes()

    def build(self: "NetworkSpec") -> list[Layer]:
        """
        Instantiate the layers with unique names.

        Returns:
            list: Layer objects in forward order
        """
        built = []
        counts: dict[str, int] = {}
        shape = self.input_shape
        for descriptor in self.layers:
            base = type(descriptor).__name__.removesuffix("Spec").lower()
            counts[base] = counts.get(base, 0) + 1
            name = base if counts[base] == 1 else f"{base}{counts[base]}"

            if isinstance(descriptor, ConvSpec):
                layer = Conv2D(name, shape[0], descriptor.out_channels, descriptor.kernel)
            elif isinstance(descriptor, BatchNormSpec):
                layer = BatchNorm(name, descriptor.channels)
            elif isinstance(descriptor, ReluSpec):
                layer = ReLU(name)
            elif isinstance(descriptor, DenseSpec):
                layer = Dense(name, int(np.prod(shape)), descriptor.out_features)
            elif isinstance(descriptor, SoftmaxSpec):
                layer = Softmax(name)
            else:
                raise ShapeError(f"unknown layer descriptor {descriptor!r}")

            shape = layer.output_shape(shape)
            built.append(layer)
        return built

    def shapes(self: "NetworkSpec") -> list[tuple[int, ...]]:
        """
        Per-example shapes from the input through every layer.

        Returns:
            list: input shape followed by each layer's output shape
        """
        shapes = [self.input_shape]
        for layer in self.build():
            shapes.append(layer.output_shape(shapes[-1]))
        return shapes


def classifier_spec() -> NetworkSpec:
    """The digit classifier: conv 20@5x5, batch norm, relu, dense 10, softmax."""
    return NetworkSpec(
        input_shape=(1, IMAGE_SIZE, IMAGE_SIZE),
        layers=(
            ConvSpec(CONV_FILTERS, CONV_KERNEL),
            BatchNormSpec(CONV_FILTERS),
            ReluSpec(),
            DenseSpec(NUM_CLASSES),
            SoftmaxSpec(),
        ),
    )


def tiny_spec() -> NetworkSpec:
    """A reduced network for gradient checks: 6x6 input, conv 2@3x3, batch norm, relu, dense 3."""
    return NetworkSpec(
        input_shape=(1, 6, 6),
        layers=(ConvSpec(2, 3), BatchNormSpec(2), ReluSpec(), DenseSpec(3), SoftmaxSpec()),
    )


class Network:
    """
    Runs a NetworkSpec over parameter sets.

    The Network is responsible for:
    - Creating initial parameter sets
    - Forward passes producing rowwise probabilities and per-layer caches
    - Backward passes turning dLoss/dY into a gradient per trainable entry
    """

    def __init__(self: "Network", spec: NetworkSpec):
        """
        Initialize the network.

        Args:
            spec: Validated layer description
        """
        self.spec = spec
        self.layers = spec.build()

    def init_params(self: "Network", rng: np.random.Generator) -> ParamSet:
        """
        Glorot-uniform weights, zero biases, unit scales and empty running stats.

        Args:
            rng: Seeded generator

        Returns:
            dict: Fresh parameter set
        """
        params: ParamSet = {}
        for layer in self.layers:
            params.update(layer.init_params(rng))
        return params

    def trainable_keys(self: "Network") -> list[str]:
        return [layer.key(field) for layer in self.layers for field in layer.trainable]

    def forward(
        self: "Network", params: ParamSet, batch: Tensor, mode: NormMode
    ) -> tuple[Tensor, list]:
        """
        Propagate a batch of images to class probabilities.

        Args:
            params: Parameter set (batch-norm running stats are updated in
                    training mode)
            batch: Images of shape (N, H, W) or (N, C, H, W)
            mode: Training or inference

        Returns:
            tuple: (N x K probabilities, caches for backward)
        """
        x = as_tensor(batch)
        shape = self.spec.input_shape
        if x.ndim not in (len(shape), len(shape) + 1) or math.prod(x.shape[1:]) != math.prod(shape):
            raise ShapeError(f"batch of shape {x.shape} does not fit input {shape}")
        if x.ndim == len(shape):
            x = x.reshape((x.shape[0],) + shape)
        if x.shape[1:] != shape:
            raise ShapeError(f"batch of shape {x.shape} does not fit input {shape}")

        caches = []
        for layer in self.layers:
            x, cache = layer.forward(params, x, mode)
            if DEBUG_MODE:
                check_finite(x, layer.name)
            caches.append(cache)
        return x, caches

    def backward(self: "Network", params: ParamSet, caches: list, grad_out: Tensor) -> ParamSet:
        """
        Propagate dLoss/dY back through every layer.

        Args:
            params: Parameter set used in the forward pass
            caches: Caches returned by forward
            grad_out: N x K gradient of the loss w.r.t. the predictions

        Returns:
            dict: Gradient for every trainable entry of params
        """
        grads: ParamSet = {}
        grad = as_tensor(grad_out)
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            grad, layer_grads = layer.backward(params, cache, grad)
            grads.update(layer_grads)
        return grads

    def predict(
        self: "Network", params: ParamSet, images: Tensor, batch_size: int = 512
    ) -> Tensor:
        """
        Class probabilities in inference mode, computed batch by batch.

        Args:
            params: Trained parameter set
            images: Images of shape (N, H, W)
            batch_size: Rows per forward pass

        Returns:
            numpy.ndarray: N x K probabilities
        """
        outputs = [
            self.forward(params, images[start : start + batch_size], NormMode.INFER)[0]
            for start in range(0, len(images), batch_size)
        ]
        return np.concatenate(outputs, axis=0)
