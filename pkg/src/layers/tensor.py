"""
Tensor helpers for the layer stack.

Tensors are dense float64 numpy arrays in row-major order; activations use
the (batch, channels, height, width) layout.
"""

import numpy as np

from src.utils.errors import NonFiniteError, ShapeError

Tensor = np.ndarray
ParamSet = dict[str, Tensor]


def as_tensor(values: object) -> Tensor:
    return np.ascontiguousarray(values, dtype=np.float64)


def expect_shape(tensor: Tensor, shape: tuple, what: str):
    """
    Raise ShapeError unless tensor has the given shape.

    Args:
        tensor: Array to check
        shape: Expected shape; None entries match any size
        what: Name used in the error message
    """
    if len(tensor.shape) != len(shape) or any(
        want is not None and have != want for have, want in zip(tensor.shape, shape)
    ):
        raise ShapeError(f"{what} has shape {tensor.shape}, expected {shape}")


def check_finite(tensor: Tensor, where: str):
    if not np.isfinite(tensor).all():
        raise NonFiniteError(f"non-finite values after {where}")
