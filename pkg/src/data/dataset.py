"""
Dataset module for the golden-loss toolkit.

This module defines the labelled-image type, the one-hot target encoding,
the rotated-digit corpus built from MNIST, and its native cache container:
    magic b"GLDS", version u32, count u64, then per example a u8 label and
    784 little-endian float64 pixels.
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.data.augment import rotate_pixels
from src.utils.constants import (
    DATASET_MAGIC,
    DATASET_VERSION,
    IMAGE_SIZE,
    NUM_CLASSES,
)
from src.utils.errors import CheckpointError, DomainError, ShapeError

logger = logging.getLogger(__name__)

PIXELS = IMAGE_SIZE * IMAGE_SIZE
RECORD = np.dtype([("label", "u1"), ("pixels", "<f8", (PIXELS,))])


@dataclass(frozen=True)
class LabeledImage:
    """
    A 28x28 grayscale digit with its label.

    Attributes:
        pixels: 28x28 float64 array with values in [0, 1]
        label: Digit 0-9
    """

    pixels: np.ndarray
    label: int

    def __post_init__(self: "LabeledImage"):
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.shape != (IMAGE_SIZE, IMAGE_SIZE):
            raise ShapeError(f"image must be {IMAGE_SIZE}x{IMAGE_SIZE}, got {pixels.shape}")
        if pixels.min() < 0.0 or pixels.max() > 1.0:
            raise DomainError("pixel values must lie in [0, 1]")
        if not 0 <= self.label < NUM_CLASSES:
            raise DomainError(f"label must lie in 0-{NUM_CLASSES - 1}, got {self.label}")
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_raw(cls: type["LabeledImage"], raw: np.ndarray, label: int) -> "LabeledImage":
        """Normalize raw 0-255 bytes to [0, 1]."""
        return cls(np.asarray(raw, dtype=np.float64) / 255.0, int(label))


def one_hot(label: int, classes: int = NUM_CLASSES) -> np.ndarray:
    """
    Unit basis vector for a label.

    Raises:
        DomainError: If the label is not in 0..classes-1
    """
    if not 0 <= label < classes:
        raise DomainError(f"label must lie in 0-{classes - 1}, got {label}")
    target = np.zeros(classes)
    target[label] = 1.0
    return target


def one_hot_rows(labels: np.ndarray, classes: int = NUM_CLASSES) -> np.ndarray:
    labels = np.asarray(labels)
    if ((labels < 0) | (labels >= classes)).any():
        raise DomainError(f"labels must lie in 0-{classes - 1}")
    return np.eye(classes)[labels]


def rotation_angles(count: int, angle_range: float, seed: int) -> np.ndarray:
    """
    Uniform angles in [-angle_range, angle_range], one seeded stream per index.

    Index i always receives the same angle for a given seed, whatever order
    or worker computes it.
    """
    return np.array(
        [
            np.random.default_rng([seed, index]).uniform(-angle_range, angle_range)
            for index in range(count)
        ]
    )


def build_rotated_dataset(
    images: np.ndarray,
    labels: np.ndarray,
    count: int,
    angle_range: float,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Draw a class-balanced subset and rotate every image by a seeded angle.

    Args:
        images: Raw uint8 images of shape (N, 28, 28)
        labels: Raw labels of shape (N,)
        count: Total examples to draw, a multiple of the class count
        angle_range: Maximum absolute rotation in degrees
        seed: Seed for both the selection and the angles

    Returns:
        tuple: (float64 images in [0, 1] of shape (count, 28, 28), int64 labels)

    Raises:
        DomainError: If count is not a positive multiple of the class count,
                     or a class has too few examples
    """
    if count <= 0 or count % NUM_CLASSES:
        raise DomainError(f"dataset size must be a positive multiple of {NUM_CLASSES}, got {count}")
    per_class = count // NUM_CLASSES
    rng = np.random.default_rng(seed)

    chosen = []
    for digit in range(NUM_CLASSES):
        candidates = np.flatnonzero(labels == digit)
        if len(candidates) < per_class:
            raise DomainError(f"class {digit} has {len(candidates)} examples, {per_class} needed")
        chosen.append(rng.choice(candidates, size=per_class, replace=False))
    selection = np.sort(np.concatenate(chosen))

    angles = rotation_angles(count, angle_range, seed)
    rotated = np.empty((count, IMAGE_SIZE, IMAGE_SIZE))
    for index, source in enumerate(selection):
        rotated[index] = rotate_pixels(images[source] / 255.0, angles[index])
    logger.info(
        "Built %d rotated digits (%d per class, angles within +/-%.1f degrees)",
        count,
        per_class,
        angle_range,
    )
    return rotated, labels[selection].astype(np.int64)


def encode_dataset(images: np.ndarray, labels: np.ndarray) -> bytes:
    records = np.empty(len(labels), dtype=RECORD)
    records["label"] = labels
    records["pixels"] = images.reshape(len(labels), PIXELS)
    header = DATASET_MAGIC + struct.pack("<IQ", DATASET_VERSION, len(labels))
    return header + records.tobytes()


def decode_dataset(data: bytes) -> tuple[np.ndarray, np.ndarray]:
    """
    Parse a GLDS container.

    Returns:
        tuple: (float64 images of shape (count, 28, 28), int64 labels)

    Raises:
        CheckpointError: On a wrong magic, unknown version or wrong length
    """
    if data[:4] != DATASET_MAGIC or len(data) < 16:
        raise CheckpointError("not a GLDS dataset cache")
    version, count = struct.unpack_from("<IQ", data, 4)
    if version != DATASET_VERSION:
        raise CheckpointError(f"unsupported dataset cache version {version}")
    if len(data) != 16 + count * RECORD.itemsize:
        raise CheckpointError("dataset cache length does not match its count")
    records = np.frombuffer(data, dtype=RECORD, count=count, offset=16)
    images = records["pixels"].reshape(count, IMAGE_SIZE, IMAGE_SIZE).astype(np.float64)
    return images, records["label"].astype(np.int64)


def save_dataset_cache(path: str | Path, images: np.ndarray, labels: np.ndarray):
    Path(path).write_bytes(encode_dataset(images, labels))


def load_dataset_cache(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    return decode_dataset(Path(path).read_bytes())
