"""
Resource Manager module for the golden-loss toolkit.

This module defines the ResourceManager class, which centralizes the loading
and caching of datasets: raw IDX pairs and the rotated-digit corpus, which
can be persisted to a GLDS cache file.
"""

import logging
from pathlib import Path

import numpy as np

from src.data.dataset import build_rotated_dataset, load_dataset_cache, save_dataset_cache
from src.data.idx import load_idx_pair

logger = logging.getLogger(__name__)


def cache_key_path(cache_path: str) -> Path:
    """Sidecar file recording how a GLDS cache was built."""
    return Path(f"{cache_path}.key")


def describe_build(images_path: str, labels_path: str, count: int, angle_range: float, seed: int) -> str:
    fields = {
        "images": Path(images_path).resolve(),
        "labels": Path(labels_path).resolve(),
        "count": int(count),
        "angle_range": float(angle_range),
        "seed": int(seed),
    }
    return "".join(f"{name}={value}\n" for name, value in fields.items())


class ResourceManager:
    """
    Manages dataset resources.

    The ResourceManager is responsible for:
    - Loading IDX files and pairing images with labels
    - Building the rotated corpus, or reading it back from a cache file
    - Caching both in memory to avoid redundant work within a run
    """

    def __init__(self: "ResourceManager"):
        """
        Initialize the resource manager with empty caches.
        """
        self.raw = {}  # (images path, labels path) -> (images, labels)
        self.datasets = {}  # full build key -> (images, labels)

    def load_raw(
        self: "ResourceManager", images_path: str, labels_path: str
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Load an IDX image/label pair.

        Args:
            images_path: IDX image file
            labels_path: IDX label file

        Returns:
            tuple: (uint8 images, uint8 labels)
        """
        key = (str(images_path), str(labels_path))
        if key not in self.raw:
            self.raw[key] = load_idx_pair(images_path, labels_path)
        return self.raw[key]

    def load_rotated(
        self: "ResourceManager",
        images_path: str,
        labels_path: str,
        count: int,
        angle_range: float,
        seed: int,
        cache_path: str | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Get the rotated corpus, building it on first use.

        When cache_path names an existing GLDS file whose key file records
        the same sources, count, angle range and seed, it is read instead of
        rebuilding. Otherwise the corpus is rebuilt and both files rewritten.

        Args:
            images_path: IDX image file
            labels_path: IDX label file
            count: Number of examples
            angle_range: Maximum absolute rotation in degrees
            seed: Selection and rotation seed
            cache_path: Optional GLDS cache file

        Returns:
            tuple: (float64 images, int64 labels)
        """
        key = (str(images_path), str(labels_path), count, angle_range, seed)
        if key in self.datasets:
            return self.datasets[key]

        build = describe_build(images_path, labels_path, count, angle_range, seed)
        if cache_path and Path(cache_path).exists():
            key_file = cache_key_path(cache_path)
            recorded = key_file.read_text(encoding="utf-8") if key_file.exists() else None
            if recorded == build:
                images, labels = load_dataset_cache(cache_path)
                if len(labels) == count:
                    logger.info("Read %d cached digits from %s", count, cache_path)
                    self.datasets[key] = (images, labels)
                    return images, labels
            logger.warning("Cache %s was built with different settings; rebuilding", cache_path)

        raw_images, raw_labels = self.load_raw(images_path, labels_path)
        images, labels = build_rotated_dataset(raw_images, raw_labels, count, angle_range, seed)
        if cache_path:
            save_dataset_cache(cache_path, images, labels)
            cache_key_path(cache_path).write_text(build, encoding="utf-8")
            logger.info("Wrote dataset cache %s", cache_path)
        self.datasets[key] = (images, labels)
        return images, labels

    def clear_cache(self: "ResourceManager", resource_type: str | None = None):
        """
        Clear the in-memory caches.

        Args:
            resource_type: 'raw', 'datasets', or None to clear both
        """
        if resource_type == "raw" or resource_type is None:
            self.raw.clear()

        if resource_type == "datasets" or resource_type is None:
            self.datasets.clear()
