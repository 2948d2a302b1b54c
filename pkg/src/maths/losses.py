"""
Loss module for the golden-loss toolkit.

This module defines the information-theoretic loss family and its analytic
gradients, plus the sum-of-squares baseline:
- angular difference d = (y - t + 1) * pi / 4
- information loss L_I(d), minimal at d = pi / 4
- sigmoid loss L(d) and the final squared loss Loss(d)
- batch aggregation (mean over observations, sum over classes)

Scalar functions accept floats or numpy arrays and work elementwise.
All arithmetic is float64.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from src.maths.golden import SQRT2
from src.utils.constants import CLAMP_EPSILON
from src.utils.errors import DomainError, ShapeError

HALF_PI = math.pi / 2
QUARTER_PI = math.pi / 4

# L_I(pi/4), the constant "min" subtracted in the final loss
INFORMATION_MIN = SQRT2 * math.log(SQRT2)

# dd/dy divided by sqrt(2), equal to pi / sqrt(2)^5
GRADIENT_SCALE = math.pi / (4.0 * SQRT2)


@dataclass(frozen=True)
class LossBatch:
    """
    Predictions and one-hot targets for N observations over K classes.

    Attributes:
        predictions: N x K matrix with entries in [0, 1]
        targets: N x K matrix of one-hot rows
    """

    predictions: np.ndarray
    targets: np.ndarray

    def __post_init__(self: "LossBatch"):
        predictions = np.asarray(self.predictions, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        if predictions.ndim != 2 or predictions.shape != targets.shape:
            raise ShapeError(
                f"predictions {predictions.shape} and targets {targets.shape} "
                "must be matrices of identical shape"
            )
        if not (np.isin(targets, (0.0, 1.0)).all() and (targets.sum(axis=1) == 1).all()):
            raise DomainError("every target row must be one-hot")
        object.__setattr__(self, "predictions", predictions)
        object.__setattr__(self, "targets", targets)

    @property
    def count(self: "LossBatch") -> int:
        return self.predictions.shape[0]


def _out(value: np.ndarray) -> float | np.ndarray:
    # 0-d results go back to the caller as plain floats
    return float(value) if np.ndim(value) == 0 else value


def _clamped(d: float | np.ndarray) -> np.ndarray:
    return np.clip(np.asarray(d, dtype=np.float64), CLAMP_EPSILON, HALF_PI - CLAMP_EPSILON)


def angular_difference(y: float | np.ndarray, t: float | np.ndarray) -> float | np.ndarray:
    """
    Encode the prediction error y - t as an angle in [0, pi/2].

    Args:
        y: Network output(s) in [0, 1]
        t: Teaching input(s) in [0, 1]

    Returns:
        The angular difference (y - t + 1) * pi / 4

    Raises:
        DomainError: If any input lies outside [0, 1]
    """
    y = np.asarray(y, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if ((y < 0.0) | (y > 1.0)).any() or ((t < 0.0) | (t > 1.0)).any():
        raise DomainError("outputs and targets must lie in [0, 1]")
    return _out((y - t + 1.0) * QUARTER_PI)


def information_loss(d: float | np.ndarray) -> float | np.ndarray:
    """
    Information loss L_I(d) = -(sin(d) ln(cos(d)) + cos(d) ln(sin(d))).

    Symmetric about pi/4 where it attains its minimum sqrt(2) ln(sqrt(2)),
    and growing without bound towards both ends of the (clamped) domain.
    """
    d = _clamped(d)
    sin, cos = np.sin(d), np.cos(d)
    return _out(-(sin * np.log(cos) + cos * np.log(sin)))


def information_loss_grad(d: float | np.ndarray) -> float | np.ndarray:
    """
    Derivative dL_I/dd.

    B(d) = sin^2/cos - cos^2/sin + sin ln(sin) - cos ln(cos); zero at pi/4.
    """
    d = _clamped(d)
    sin, cos = np.sin(d), np.cos(d)
    return _out(sin**2 / cos - cos**2 / sin + sin * np.log(sin) - cos * np.log(cos))


def sigmoid_loss(d: float | np.ndarray) -> float | np.ndarray:
    """Sigmoid loss L(d) = 1 / (1 + exp(-L_I(d) / sqrt(2)))."""
    return _out(expit(np.asarray(information_loss(d)) / SQRT2))


def sigmoid_loss_grad(d: float | np.ndarray) -> float | np.ndarray:
    """
    Derivative dL/dy of the unshifted sigmoid loss.

    (pi / sqrt(2)^5) * L * (1 - L) * B(d)
    """
    loss = np.asarray(sigmoid_loss(d))
    return _out(GRADIENT_SCALE * loss * (1.0 - loss) * np.asarray(information_loss_grad(d)))


def _shifted_sigmoid(d: float | np.ndarray) -> np.ndarray:
    return expit((np.asarray(information_loss(d)) - INFORMATION_MIN) / SQRT2)


def proposed_loss(d: float | np.ndarray) -> float | np.ndarray:
    """
    Final loss Loss(d) = S(d)^2 with S the min-shifted sigmoid.

    Ranges over [0.25, 1): 0.25 at d = pi/4, saturating towards 1 at the
    clamped boundaries.
    """
    return _out(_shifted_sigmoid(d) ** 2)


def proposed_loss_grad(d: float | np.ndarray) -> float | np.ndarray:
    """
    Derivative dLoss/dy of the final loss by the chain rule.

    dLoss/dy = 2 S * S (1 - S) * (pi / (4 sqrt(2))) * B(d)

    Args:
        d: Angular difference(s)

    Returns:
        The gradient with respect to the network output y
    """
    s = _shifted_sigmoid(d)
    return _out(2.0 * s * s * (1.0 - s) * GRADIENT_SCALE * np.asarray(information_loss_grad(d)))


def batch_proposed_loss(batch: LossBatch) -> float:
    """Mean over observations of the per-row sum of the final loss."""
    d = angular_difference(batch.predictions, batch.targets)
    return float(np.sum(proposed_loss(d)) / batch.count)


def batch_proposed_grad(batch: LossBatch) -> np.ndarray:
    """Elementwise gradient of batch_proposed_loss with respect to the predictions."""
    d = angular_difference(batch.predictions, batch.targets)
    return np.asarray(proposed_loss_grad(d)) / batch.count


def sse_loss(batch: LossBatch) -> float:
    """Sum of squared errors normalized by the number of observations."""
    return float(np.sum((batch.predictions - batch.targets) ** 2) / batch.count)


def sse_grad(batch: LossBatch) -> np.ndarray:
    """Gradient 2 (Y - T) / N of sse_loss."""
    return 2.0 * (batch.predictions - batch.targets) / batch.count
