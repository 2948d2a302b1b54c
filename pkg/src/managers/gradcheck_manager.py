"""
Gradient Check Manager module for the golden-loss toolkit.

This module defines the GradientChecker class, which compares every
hand-written derivative against central finite differences on seeded
synthetic data and collects the worst relative error per component.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from src.layers.activations import (
    relu_backward,
    relu_forward,
    softmax_backward,
    softmax_forward,
)
from src.layers.batch_norm import batchnorm_backward, batchnorm_forward
from src.layers.conv import conv_backward, conv_forward
from src.layers.dense import dense_backward, dense_forward
from src.layers.network import Network, classifier_spec, tiny_spec
from src.maths.losses import (
    HALF_PI,
    QUARTER_PI,
    LossBatch,
    batch_proposed_grad,
    batch_proposed_loss,
    proposed_loss,
    proposed_loss_grad,
    sigmoid_loss,
    sigmoid_loss_grad,
    sse_grad,
    sse_loss,
)
from src.utils.constants import (
    DEFAULT_SEED,
    FD_STEP,
    LAYER_TOLERANCE,
    NETWORK_TOLERANCE,
)
from src.utils.modes import CheckScale, NormMode

logger = logging.getLogger(__name__)

# Step for maps that are linear in the checked variable (exact up to rounding)
LINEAR_STEP = 1e-3
# Step for smooth nonlinear layer maps
LAYER_STEP = 1e-5


@dataclass(frozen=True)
class GradcheckEntry:
    component: str
    max_error: float
    tolerance: float

    @property
    def passed(self: "GradcheckEntry") -> bool:
        return self.max_error <= self.tolerance


@dataclass(frozen=True)
class GradcheckReport:
    scale: CheckScale
    entries: tuple[GradcheckEntry, ...]

    @property
    def passed(self: "GradcheckReport") -> bool:
        return all(entry.passed for entry in self.entries)

    def failures(self: "GradcheckReport") -> list[str]:
        return [entry.component for entry in self.entries if not entry.passed]


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float) -> float:
    """
    Largest |a - n| / max(|a|, |n|, floor) over all entries.

    The floor keeps gradients that are zero in both computations from
    dividing by zero.
    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / scale))


def central_difference(f: Callable[[], float], array: np.ndarray, index: tuple, step: float) -> float:
    """
    Central difference of f with respect to array[index], restoring the entry.

    Args:
        f: Scalar function reading array
        array: Array perturbed in place
        index: Entry to perturb
        step: Half-width h

    Returns:
        float: (f(x + h) - f(x - h)) / 2h
    """
    original = array[index]
    array[index] = original + step
    upper = f()
    array[index] = original - step
    lower = f()
    array[index] = original
    return (upper - lower) / (2.0 * step)


class GradientChecker:
    """
    Runs the finite-difference oracle suite.

    The GradientChecker is responsible for:
    - Checking the loss derivatives (SSE, sigmoid, proposed, batched)
    - Checking every layer backward pass against its forward pass
    - Checking end-to-end network gradients with both losses
    """

    def __init__(
        self: "GradientChecker",
        scale: CheckScale = CheckScale.TINY,
        seed: int = DEFAULT_SEED,
        conv_backward_fn: Callable = conv_backward,
    ):
        """
        Initialize the checker.

        Args:
            scale: TINY for reduced shapes, CLASSIFIER for the digit classifier's shapes
            seed: Seed for all synthetic data and sampled positions
            conv_backward_fn: Convolution backward pass under test
        """
        self.scale = scale
        self.seed = seed
        self.conv_backward_fn = conv_backward_fn

    def run(self: "GradientChecker") -> GradcheckReport:
        """
        Execute every check.

        Returns:
            GradcheckReport: One entry per component
        """
        rng = np.random.default_rng(self.seed)
        checks = [
            self.check_sse,
            self.check_sigmoid_loss,
            self.check_proposed_loss,
            self.check_batch_proposed,
            self.check_conv,
            self.check_batchnorm,
            self.check_relu,
            self.check_dense,
            self.check_softmax,
            self.check_network,
        ]
        entries = []
        for check in checks:
            for entry in check(rng):
                logger.info(
                    "%-20s max error %.3e (tolerance %.0e) %s",
                    entry.component,
                    entry.max_error,
                    entry.tolerance,
                    "ok" if entry.passed else "FAILED",
                )
                entries.append(entry)
        return GradcheckReport(self.scale, tuple(entries))

    def check_sse(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        predictions = rng.uniform(0.05, 0.95, size=(8, 10))
        targets = np.eye(10)[rng.integers(0, 10, size=8)]
        analytic = sse_grad(LossBatch(predictions, targets))
        numeric = np.zeros_like(predictions)
        for index in np.ndindex(predictions.shape):
            numeric[index] = central_difference(
                lambda: sse_loss(LossBatch(predictions, targets)), predictions, index, LINEAR_STEP
            )
        return [GradcheckEntry("sse_grad", relative_error(analytic, numeric, 1e-6), 1e-8)]

    def check_sigmoid_loss(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        d = rng.uniform(0.01, HALF_PI - 0.01, size=1000)
        h = FD_STEP * QUARTER_PI
        numeric = (np.asarray(sigmoid_loss(d + h)) - np.asarray(sigmoid_loss(d - h))) / (2.0 * FD_STEP)
        return [GradcheckEntry("sigmoid_loss_grad", relative_error(sigmoid_loss_grad(d), numeric, 1e-3), 1e-6)]

    def check_proposed_loss(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        # Perturbing y by h moves d by h * pi / 4
        d = rng.uniform(0.01, HALF_PI - 0.01, size=1000)
        h = FD_STEP * QUARTER_PI
        numeric = (np.asarray(proposed_loss(d + h)) - np.asarray(proposed_loss(d - h))) / (2.0 * FD_STEP)
        error = relative_error(proposed_loss_grad(d), numeric, 1e-3)
        stationary = abs(proposed_loss_grad(QUARTER_PI))
        return [
            GradcheckEntry("proposed_loss_grad", error, 1e-6),
            GradcheckEntry("stationary_point", stationary, 1e-14),
        ]

    def check_batch_proposed(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        predictions = rng.uniform(0.05, 0.95, size=(4, 10))
        targets = np.eye(10)[rng.integers(0, 10, size=4)]
        analytic = batch_proposed_grad(LossBatch(predictions, targets))
        numeric = np.zeros_like(predictions)
        for index in np.ndindex(predictions.shape):
            numeric[index] = central_difference(
                lambda: batch_proposed_loss(LossBatch(predictions, targets)),
                predictions,
                index,
                LAYER_STEP,
            )
        return [GradcheckEntry("batch_proposed_grad", relative_error(analytic, numeric, 1e-3), 1e-6)]

    def _shapes(self: "GradientChecker") -> dict:
        if self.scale is CheckScale.CLASSIFIER:
            return {"conv_input": (2, 1, 28, 28), "conv_weights": (20, 1, 5, 5), "norm": (2, 20, 24, 24), "dense": (2, 11520, 10)}
        return {"conv_input": (2, 2, 6, 6), "conv_weights": (3, 2, 3, 3), "norm": (2, 3, 4, 4), "dense": (4, 8, 3)}

    def _sampled(self: "GradientChecker", rng: np.random.Generator, shape: tuple, count: int) -> list[tuple]:
        flat = rng.choice(math.prod(shape), size=min(count, math.prod(shape)), replace=False)
        return [np.unravel_index(position, shape) for position in flat]

    def check_conv(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        shapes = self._shapes()
        x = rng.normal(size=shapes["conv_input"])
        weights = rng.normal(size=shapes["conv_weights"])
        biases = rng.normal(size=shapes["conv_weights"][0])
        out, cache = conv_forward(x, weights, biases)
        upstream = rng.normal(size=out.shape)
        grad_input, grad_weights, grad_biases = self.conv_backward_fn(upstream, cache)

        def loss() -> float:
            return float(np.sum(conv_forward(x, weights, biases)[0] * upstream))

        entries = []
        for name, array, analytic in (
            ("conv_weights", weights, grad_weights),
            ("conv_input", x, grad_input),
            ("conv_biases", biases, grad_biases),
        ):
            positions = self._sampled(rng, array.shape, 20)
            numeric = [central_difference(loss, array, index, LINEAR_STEP) for index in positions]
            picked = [analytic[index] for index in positions]
            entries.append(GradcheckEntry(name, relative_error(picked, numeric, 1e-6), LAYER_TOLERANCE))
        return entries

    def check_batchnorm(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        shape = self._shapes()["norm"]
        channels = shape[1]
        x = rng.normal(loc=0.5, scale=2.0, size=shape)
        gamma = rng.uniform(0.5, 1.5, size=channels)
        beta = rng.normal(size=channels)

        def forward() -> tuple:
            stats = (np.zeros(channels), np.ones(channels), np.zeros(1))
            return batchnorm_forward(x, gamma, beta, NormMode.TRAIN, *stats)

        out, cache = forward()
        upstream = rng.normal(size=out.shape)
        grad_input, grad_gamma, grad_beta = batchnorm_backward(upstream, cache)

        def loss() -> float:
            return float(np.sum(forward()[0] * upstream))

        entries = []
        for name, array, analytic, step in (
            ("batchnorm_input", x, grad_input, LAYER_STEP),
            ("batchnorm_gamma", gamma, grad_gamma, LINEAR_STEP),
            ("batchnorm_beta", beta, grad_beta, LINEAR_STEP),
        ):
            positions = self._sampled(rng, array.shape, 20)
            numeric = [central_difference(loss, array, index, step) for index in positions]
            picked = [analytic[index] for index in positions]
            entries.append(GradcheckEntry(name, relative_error(picked, numeric, 1e-6), LAYER_TOLERANCE))
        return entries

    def check_relu(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        # Keep inputs away from the kink
        x = rng.uniform(0.1, 1.0, size=(4, 8)) * rng.choice([-1.0, 1.0], size=(4, 8))
        upstream = rng.normal(size=x.shape)
        analytic = relu_backward(upstream, relu_forward(x)[1])

        def loss() -> float:
            return float(np.sum(relu_forward(x)[0] * upstream))

        numeric = np.zeros_like(x)
        for index in np.ndindex(x.shape):
            numeric[index] = central_difference(loss, x, index, LINEAR_STEP / 10)
        return [GradcheckEntry("relu", relative_error(analytic, numeric, 1e-6), LAYER_TOLERANCE)]

    def check_dense(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        rows, features, outputs = self._shapes()["dense"]
        x = rng.normal(size=(rows, features))
        weights = rng.normal(size=(outputs, features))
        biases = rng.normal(size=outputs)
        out, cache = dense_forward(x, weights, biases)
        upstream = rng.normal(size=out.shape)
        grad_input, grad_weights, grad_biases = dense_backward(upstream, cache)

        def loss() -> float:
            return float(np.sum(dense_forward(x, weights, biases)[0] * upstream))

        entries = []
        for name, array, analytic in (
            ("dense_weights", weights, grad_weights),
            ("dense_input", x, grad_input),
            ("dense_biases", biases, grad_biases),
        ):
            positions = self._sampled(rng, array.shape, 20)
            numeric = [central_difference(loss, array, index, LINEAR_STEP) for index in positions]
            picked = [analytic[index] for index in positions]
            entries.append(GradcheckEntry(name, relative_error(picked, numeric, 1e-6), LAYER_TOLERANCE))
        return entries

    def check_softmax(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        x = rng.normal(size=(4, 10))
        upstream = rng.normal(size=x.shape)
        analytic = softmax_backward(upstream, softmax_forward(x)[1])

        def loss() -> float:
            return float(np.sum(softmax_forward(x)[0] * upstream))

        numeric = np.zeros_like(x)
        for index in np.ndindex(x.shape):
            numeric[index] = central_difference(loss, x, index, LAYER_STEP)
        return [GradcheckEntry("softmax", relative_error(analytic, numeric, 1e-6), LAYER_TOLERANCE)]

    def check_network(self: "GradientChecker", rng: np.random.Generator) -> list[GradcheckEntry]:
        spec = classifier_spec() if self.scale is CheckScale.CLASSIFIER else tiny_spec()
        network = Network(spec)
        classes = spec.shapes()[-1][0]
        images = rng.uniform(0.0, 1.0, size=(4,) + spec.input_shape)
        targets = np.eye(classes)[rng.integers(0, classes, size=4)]
        entries = []
        for name, loss_fn, grad_fn, tolerance in (
            ("network_proposed", batch_proposed_loss, batch_proposed_grad, NETWORK_TOLERANCE),
            ("network_sse", sse_loss, sse_grad, LAYER_TOLERANCE),
        ):
            params = network.init_params(rng)
            predictions, caches = network.forward(params, images, NormMode.TRAIN)
            grads = network.backward(params, caches, grad_fn(LossBatch(predictions, targets)))

            def loss() -> float:
                return loss_fn(LossBatch(network.forward(params, images, NormMode.TRAIN)[0], targets))

            keys = sorted(grads)
            sizes = [grads[key].size for key in keys]
            picks = rng.choice(sum(sizes), size=min(50, sum(sizes)), replace=False)
            analytic, numeric = [], []
            for pick in picks:
                slot = int(np.searchsorted(np.cumsum(sizes), pick, side="right"))
                key = keys[slot]
                index = np.unravel_index(pick - sum(sizes[:slot]), grads[key].shape)
                analytic.append(grads[key][index])
                numeric.append(central_difference(loss, params[key], index, FD_STEP))
            entries.append(GradcheckEntry(name, relative_error(analytic, numeric, 1e-4), tolerance))
        return entries


def run_gradcheck(
    scale: CheckScale = CheckScale.TINY, seed: int = DEFAULT_SEED
) -> GradcheckReport:
    return GradientChecker(scale, seed).run()
