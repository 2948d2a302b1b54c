"""
Shared fixtures for the golden-loss test suite.
"""

import os
import struct

import numpy as np
import pytest

from src.layers.network import Network, tiny_spec
from src.utils.constants import IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running checks that need the MNIST files")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def idx_pixels():
    """The four 3x3 images stored in idx_image_bytes."""
    return np.arange(36, dtype=np.uint8).reshape(4, 3, 3) * 7


@pytest.fixture
def idx_image_bytes(idx_pixels):
    # Built field by field: magic, count, rows, cols, then the pixel bytes
    header = struct.pack(">I", IDX_IMAGE_MAGIC) + struct.pack(">I", 4)
    header += struct.pack(">I", 3) + struct.pack(">I", 3)
    return header + bytes(int(value) for value in idx_pixels.ravel())


@pytest.fixture
def idx_label_bytes():
    return struct.pack(">II", IDX_LABEL_MAGIC, 4) + bytes([3, 1, 4, 1])


@pytest.fixture
def tiny_network():
    return Network(tiny_spec())


@pytest.fixture
def banded_digits():
    """
    Sixty 6x6 images in three classes, each class lighting a different band of rows.

    Returns:
        tuple: (float64 images of shape (60, 6, 6), int64 labels)
    """
    generator = np.random.default_rng(99)
    labels = np.tile(np.arange(3), 20)
    images = generator.uniform(0.0, 0.05, size=(60, 6, 6))
    for index, label in enumerate(labels):
        images[index, 2 * label : 2 * label + 2, :] = 1.0
    return images, labels.astype(np.int64)


@pytest.fixture
def mnist_paths():
    images = os.environ.get("GOLDEN_MNIST_IMAGES")
    labels = os.environ.get("GOLDEN_MNIST_LABELS")
    if not images or not labels:
        pytest.skip("set GOLDEN_MNIST_IMAGES and GOLDEN_MNIST_LABELS to run")
    return images, labels
