"""
Augmentation module for the golden-loss toolkit.

Rotation is bilinear, about the image center, with samples falling outside
the image read as background (0).
"""

from typing import TYPE_CHECKING

import numpy as np
from scipy import ndimage

from src.utils.constants import MAX_ROTATION_ANGLE
from src.utils.errors import DomainError

if TYPE_CHECKING:
    from src.data.dataset import LabeledImage


def rotate_pixels(pixels: np.ndarray, angle: float) -> np.ndarray:
    """
    Rotate a grayscale image counter-clockwise.

    Args:
        pixels: 2-d array with values in [0, 1]
        angle: Degrees in [-45, 45]

    Returns:
        numpy.ndarray: Rotated image of the same shape, values in [0, 1]

    Raises:
        DomainError: If the angle is out of range
    """
    if not -MAX_ROTATION_ANGLE <= angle <= MAX_ROTATION_ANGLE:
        raise DomainError(
            f"rotation angle must lie in [-{MAX_ROTATION_ANGLE:g}, {MAX_ROTATION_ANGLE:g}], got {angle}"
        )
    pixels = np.asarray(pixels, dtype=np.float64)
    if angle == 0:
        return pixels.copy()
    rotated = ndimage.rotate(
        pixels, angle, reshape=False, order=1, mode="grid-constant", cval=0.0
    )
    return np.clip(rotated, 0.0, 1.0)


def rotate_image(image: "LabeledImage", angle: float) -> "LabeledImage":
    """
    Rotate a labelled image, keeping its label.

    Args:
        image: Source image
        angle: Degrees in [-45, 45]

    Returns:
        LabeledImage: The rotated copy
    """
    return type(image)(rotate_pixels(image.pixels, angle), image.label)
