"""
Error types for the golden-loss toolkit.

Every error raised on purpose by the package derives from GoldenNetError,
so the command line can map families of failures onto exit codes.
"""


class GoldenNetError(Exception):
    """Root of all toolkit errors."""


class DomainError(GoldenNetError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class ShapeError(GoldenNetError, ValueError):
    """Tensor shapes do not chain or do not match."""


class IdxFormatError(GoldenNetError):
    """An IDX file carries the wrong magic number."""


class IdxLengthError(GoldenNetError):
    """An IDX file is empty or shorter than its header announces."""


class PairingError(GoldenNetError):
    """Image and label files hold different numbers of items."""


class CheckpointError(GoldenNetError):
    """A GLNN or GLDS container is malformed."""


class RunningStatsError(GoldenNetError):
    """Batch normalization was asked to infer before any training step."""


class NonFiniteError(GoldenNetError):
    """A layer produced NaN or infinite activations."""


class ConfigError(GoldenNetError, ValueError):
    """A configuration value or flag is invalid."""


class TrainingDivergedError(GoldenNetError):
    """
    The training loss became non-finite.

    Attributes:
        fold: Fold index being trained
        epoch: Epoch index (0-based)
        batch: Batch index within the epoch (0-based)
    """

    def __init__(self: "TrainingDivergedError", fold: int, epoch: int, batch: int):
        self.fold = fold
        self.epoch = epoch
        self.batch = batch
        super().__init__(
            f"non-finite loss in fold {fold}, epoch {epoch}, batch {batch}"
        )


class ReportError(GoldenNetError):
    """A report's summary statistics disagree with its per-fold values."""
