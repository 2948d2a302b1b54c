"""
Golden ratio module for the golden-loss toolkit.

This module defines the exact golden-ratio roots, the synaptic computational
model E(p), and the two training constants derived from them:
- the momentum weight alpha = p1 * sqrt(2)
- the learning rate eta = (1 - alpha)^2

Everything is computed from sqrt(5) at double precision; the rounded values
0.874 and 0.016 are display approximations only.
"""

import math
from dataclasses import dataclass

from src.utils.errors import DomainError

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class GoldenConstants:
    """
    Golden-ratio roots and the hyperparameters derived from them.

    Attributes:
        p1: Positive root of p^2 + p - 1 = 0
        p2: Negative root of p^2 + p - 1 = 0
        alpha: Momentum weight, p1 * sqrt(2)
        eta: Learning rate, (1 - alpha)^2
    """

    p1: float
    p2: float
    alpha: float
    eta: float


def golden_roots() -> tuple[float, float]:
    """
    Solve p^2 + p - 1 = 0.

    Returns:
        tuple: (p1, p2) = ((sqrt(5) - 1) / 2, (-sqrt(5) - 1) / 2)
    """
    return (SQRT5 - 1.0) / 2.0, (-SQRT5 - 1.0) / 2.0


def negative_golden_roots() -> tuple[float, float]:
    """
    Solve p^2 - p - 1 = 0, whose roots are the negated roots of p^2 + p - 1.

    Returns:
        tuple: (-p1, -p2)
    """
    p1, p2 = golden_roots()
    return -p1, -p2


def momentum_weight() -> float:
    """
    Momentum weight alpha such that alpha / sqrt(2) equals p1.

    Returns:
        float: alpha, approximately 0.874032
    """
    p1, _ = golden_roots()
    return p1 * SQRT2


def learning_rate() -> float:
    """
    Learning rate eta = (1 - alpha)^2.

    Returns:
        float: eta, approximately 0.015868
    """
    return (1.0 - momentum_weight()) ** 2


def golden_constants() -> GoldenConstants:
    """Bundle the golden roots with the momentum weight and learning rate."""
    p1, p2 = golden_roots()
    return GoldenConstants(p1=p1, p2=p2, alpha=momentum_weight(), eta=learning_rate())


def expected_information(p: float) -> float:
    """
    Expected information of the signal (1 - p) / p.

    E = -p * ln((1 - p) / p), defined for p in [1/2, 1). At p = 1 the limit
    is returned as +inf so that sweeps may include the boundary.

    Args:
        p: Extracellular concentration, the true-signal probability

    Returns:
        float: Expected information E(p)

    Raises:
        DomainError: If p lies outside [0.5, 1]
    """
    if not 0.5 <= p <= 1.0:
        raise DomainError(f"signal level must lie in [0.5, 1], got {p}")
    if p == 1.0:
        return math.inf
    return -p * math.log((1.0 - p) / p)


def signal_from_information(energy: float, p: float) -> float:
    """
    Sigmoidal form of the computational model, p = 1 / (1 + exp(-E / p)).

    Feeding back E = expected_information(p) reproduces p.

    Args:
        energy: Expected information E
        p: Signal level used as the sigmoid temperature

    Returns:
        float: The recovered signal level
    """
    if p <= 0.0:
        raise DomainError(f"signal level must be positive, got {p}")
    return 1.0 / (1.0 + math.exp(-energy / p))


def directional_information(phi: float) -> float:
    """
    One-directional symmetric information, -2 * sin(phi) * ln(cos(phi)).

    The information loss averages this quantity over both directions:
    L_I(d) = (directional_information(d) + directional_information(pi/2 - d)) / 2.

    Args:
        phi: Angle in [0, pi/2)

    Returns:
        float: The information carried in one direction
    """
    if not 0.0 <= phi < math.pi / 2:
        raise DomainError(f"angle must lie in [0, pi/2), got {phi}")
    return -2.0 * math.sin(phi) * math.log(math.cos(phi))
