"""
Optimizer module for the golden-loss toolkit.

This module defines plain gradient descent, w <- w - eta * g, and gradient
descent with momentum, dw(t) = -eta * g + alpha * dw(t-1), over a ParamSet,
plus the Optimizer class that owns the velocity buffers of one training loop.
"""

from dataclasses import dataclass

import numpy as np

from src.layers.tensor import ParamSet
from src.utils.errors import ConfigError, ShapeError

Velocity = dict[str, np.ndarray]


@dataclass(frozen=True)
class OptimizerConfig:
    """
    Step-size settings.

    Attributes:
        eta: Learning rate, > 0
        alpha: Momentum weight in [0, 1)
        momentum_enabled: Use the momentum update
    """

    eta: float
    alpha: float = 0.0
    momentum_enabled: bool = False

    def __post_init__(self: "OptimizerConfig"):
        if not self.eta > 0.0:
            raise ConfigError(f"learning rate must be positive, got {self.eta}")
        if not 0.0 <= self.alpha < 1.0:
            raise ConfigError(f"momentum weight must lie in [0, 1), got {self.alpha}")


def _check_congruent(params: ParamSet, grads: ParamSet):
    for key, grad in grads.items():
        if key not in params or params[key].shape != grad.shape:
            raise ShapeError(f"gradient {key!r} does not match the parameter set")


def zero_velocity(grads: ParamSet) -> Velocity:
    return {key: np.zeros_like(grad) for key, grad in grads.items()}


def sgd_step(params: ParamSet, grads: ParamSet, cfg: OptimizerConfig) -> ParamSet:
    """
    Plain gradient descent on every entry that has a gradient, in place.

    Args:
        params: Parameter set to update
        grads: Gradients keyed like params
        cfg: Step settings (momentum must be disabled)

    Returns:
        dict: The updated parameter set
    """
    if cfg.momentum_enabled:
        raise ConfigError("sgd_step called with momentum enabled")
    _check_congruent(params, grads)
    for key, grad in grads.items():
        params[key] -= cfg.eta * grad
    return params


def momentum_step(
    params: ParamSet, grads: ParamSet, velocity: Velocity, cfg: OptimizerConfig
) -> tuple[ParamSet, Velocity]:
    """
    Gradient descent with momentum, in place.

    The new delta is computed from the current gradient first and then
    applied: dw(t) = -eta * g + alpha * dw(t-1); w <- w + dw(t).

    Args:
        params: Parameter set to update
        grads: Gradients keyed like params
        velocity: Previous deltas keyed like grads
        cfg: Step settings

    Returns:
        tuple: (updated params, updated velocity)
    """
    _check_congruent(params, grads)
    _check_congruent(velocity, grads)
    for key, grad in grads.items():
        delta = -cfg.eta * grad
        if cfg.alpha:
            delta += cfg.alpha * velocity[key]
        params[key] += delta
        velocity[key] = delta
    return params, velocity


class Optimizer:
    """
    Applies one update rule to one parameter set.

    The Optimizer is responsible for:
    - Holding the velocity buffers (zero before the first step)
    - Choosing between plain and momentum updates
    """

    def __init__(self: "Optimizer", cfg: OptimizerConfig):
        self.cfg = cfg
        self.velocity: Velocity | None = None

    def step(self: "Optimizer", params: ParamSet, grads: ParamSet) -> ParamSet:
        """
        Update params with grads.

        Args:
            params: Parameter set owned by the calling training loop
            grads: Gradients for the trainable entries

        Returns:
            dict: The updated parameter set
        """
        if not self.cfg.momentum_enabled:
            return sgd_step(params, grads, self.cfg)
        if self.velocity is None:
            self.velocity = zero_velocity(grads)
        params, self.velocity = momentum_step(params, grads, self.velocity, self.cfg)
        return params

    def reset(self: "Optimizer"):
        self.velocity = None
