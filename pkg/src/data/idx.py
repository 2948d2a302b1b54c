"""
IDX module for the golden-loss toolkit.

This module reads and writes the big-endian IDX containers of the MNIST
distribution:
    images: magic 0x00000803, count, rows, cols (u32 each), then u8 pixels
    labels: magic 0x00000801, count (u32 each), then u8 labels
Gzip-compressed files are detected by their magic bytes and decompressed
transparently.
"""

import gzip
import logging
import struct
from pathlib import Path

import numpy as np

from src.utils.constants import GZIP_MAGIC, IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC
from src.utils.errors import IdxFormatError, IdxLengthError, PairingError

logger = logging.getLogger(__name__)


def read_idx_bytes(path: str | Path) -> bytes:
    """
    Read a file, decompressing it when it starts with the gzip magic.

    Args:
        path: IDX file, plain or gzip-compressed

    Returns:
        bytes: The raw IDX contents
    """
    data = Path(path).read_bytes()
    if data[:2] == GZIP_MAGIC:
        data = gzip.decompress(data)
    return data


def _header(data: bytes, magic: int, dims: int) -> tuple[int, ...]:
    if len(data) < 4:
        raise IdxLengthError(f"IDX file holds {len(data)} bytes, too short for a magic number")
    (found,) = struct.unpack_from(">I", data)
    if found != magic:
        raise IdxFormatError(f"expected magic {magic:#010x}, found {found:#010x}")
    size = 4 * (1 + dims)
    if len(data) < size:
        raise IdxLengthError(f"IDX header needs {size} bytes, file has {len(data)}")
    shape = struct.unpack_from(f">{dims}I", data, 4)
    expected = size + int(np.prod(shape, dtype=np.int64))
    if len(data) != expected:
        raise IdxLengthError(f"IDX payload should span {expected} bytes, file has {len(data)}")
    return tuple(shape)


def parse_idx_images(data: bytes) -> np.ndarray:
    """
    Parse an image container.

    Args:
        data: Raw IDX bytes

    Returns:
        numpy.ndarray: uint8 array of shape (count, rows, cols)

    Raises:
        IdxFormatError: On a wrong magic number
        IdxLengthError: On an empty, truncated or oversized file
    """
    shape = _header(data, IDX_IMAGE_MAGIC, 3)
    return np.frombuffer(data, dtype=np.uint8, offset=16).reshape(shape).copy()


def parse_idx_labels(data: bytes) -> np.ndarray:
    shape = _header(data, IDX_LABEL_MAGIC, 1)
    return np.frombuffer(data, dtype=np.uint8, offset=8).reshape(shape).copy()


def serialize_idx_images(images: np.ndarray) -> bytes:
    count, rows, cols = images.shape
    header = struct.pack(">4I", IDX_IMAGE_MAGIC, count, rows, cols)
    return header + np.ascontiguousarray(images, dtype=np.uint8).tobytes()


def serialize_idx_labels(labels: np.ndarray) -> bytes:
    header = struct.pack(">2I", IDX_LABEL_MAGIC, len(labels))
    return header + np.ascontiguousarray(labels, dtype=np.uint8).tobytes()


def load_idx_images(path: str | Path) -> np.ndarray:
    return parse_idx_images(read_idx_bytes(path))


def load_idx_labels(path: str | Path) -> np.ndarray:
    return parse_idx_labels(read_idx_bytes(path))


def load_idx_pair(images_path: str | Path, labels_path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """
    Load matching image and label files.

    Args:
        images_path: IDX image file
        labels_path: IDX label file

    Returns:
        tuple: (uint8 images, uint8 labels)

    Raises:
        PairingError: If the two files hold different counts
    """
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if len(images) != len(labels):
        raise PairingError(f"{len(images)} images but {len(labels)} labels")
    logger.info("Loaded %d labelled images from %s", len(images), images_path)
    return images, labels
