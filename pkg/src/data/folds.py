"""
Fold module for the golden-loss toolkit.

k-fold plans are a seeded shuffle of the example indices cut into
contiguous blocks whose sizes differ by at most one.
"""

from dataclasses import dataclass

import numpy as np

from src.utils.errors import DomainError


@dataclass(frozen=True)
class FoldPlan:
    """
    Assignment of every example to one of k folds.

    Attributes:
        k: Number of folds
        assignments: Fold index per example, in dataset order
        seed: Seed the plan was drawn with
    """

    k: int
    assignments: np.ndarray
    seed: int

    def test_indices(self: "FoldPlan", fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self: "FoldPlan", fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def sizes(self: "FoldPlan") -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)


def kfold_split(n: int, k: int, seed: int) -> FoldPlan:
    """
    Deterministic k-fold plan.

    Args:
        n: Number of examples
        k: Number of folds, 2 <= k <= n
        seed: Shuffle seed

    Returns:
        FoldPlan: The plan

    Raises:
        DomainError: If k < 2 or k > n
    """
    if k < 2:
        raise DomainError(f"need at least 2 folds, got {k}")
    if k > n:
        raise DomainError(f"cannot split {n} examples into {k} folds")
    order = np.random.default_rng(seed).permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    for fold, block in enumerate(np.array_split(order, k)):
        assignments[block] = fold
    return FoldPlan(k=k, assignments=assignments, seed=seed)
