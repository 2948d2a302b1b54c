"""
Configuration module for the golden-loss toolkit.

This module defines ExperimentConfig, its defaults (taken from the constants
module), the resolution of learning rate and momentum weight per loss kind,
and the key=value configuration file format:

    # comment
    loss = proposed
    epochs = 5
    batch-size = 64
"""

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from src.maths.golden import learning_rate, momentum_weight
from src.managers.optimizer import OptimizerConfig
from src.utils.constants import (
    DEFAULT_ANGLE_RANGE,
    DEFAULT_BATCH_SIZE,
    DEFAULT_DATASET_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_FOLDS,
    DEFAULT_REPEATS,
    DEFAULT_SEED,
    MAX_ROTATION_ANGLE,
    NUM_CLASSES,
    SSE_LEARNING_RATE,
    SSE_MOMENTUM,
)
from src.utils.errors import ConfigError
from src.utils.modes import LossKind

TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}

# Short names accepted in files, matching the command-line flags
ALIASES = {
    "loss": "loss_kind",
    "momentum": "momentum_enabled",
    "repeats": "repeats_per_fold",
    "images": "images_path",
    "labels": "labels_path",
    "cache": "cache_path",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything that defines one cross-validated training run.

    eta and alpha may be left as None; resolved() fills them in from the
    loss kind: the golden values for the proposed loss, 0.01 and 0.9 for
    SSE. alpha is forced to 0 when momentum is disabled.
    """

    loss_kind: LossKind = LossKind.PROPOSED
    momentum_enabled: bool = True
    eta: float | None = None
    alpha: float | None = None
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    folds: int = DEFAULT_FOLDS
    repeats_per_fold: int = DEFAULT_REPEATS
    seed: int = DEFAULT_SEED
    images_path: str | None = None
    labels_path: str | None = None
    angle_range: float = DEFAULT_ANGLE_RANGE
    dataset_size: int = DEFAULT_DATASET_SIZE
    cache_path: str | None = None
    checkpoint_dir: str | None = None

    def resolved(self: "ExperimentConfig") -> "ExperimentConfig":
        """
        Fill in the learning rate and momentum weight.

        Returns:
            ExperimentConfig: A copy with eta and alpha set
        """
        if self.loss_kind is LossKind.PROPOSED:
            eta, alpha = learning_rate(), momentum_weight()
        else:
            eta, alpha = SSE_LEARNING_RATE, SSE_MOMENTUM
        eta = eta if self.eta is None else self.eta
        alpha = alpha if self.alpha is None else self.alpha
        return replace(self, eta=eta, alpha=alpha if self.momentum_enabled else 0.0)

    def validate(self: "ExperimentConfig") -> "ExperimentConfig":
        """
        Check every field.

        Returns:
            ExperimentConfig: self, for chaining

        Raises:
            ConfigError: On the first invalid value
        """
        checks = [
            (self.epochs >= 0, f"epochs must be >= 0, got {self.epochs}"),
            (self.batch_size >= 1, f"batch size must be >= 1, got {self.batch_size}"),
            (self.folds >= 2, f"need at least 2 folds, got {self.folds}"),
            (self.repeats_per_fold >= 1, f"repeats must be >= 1, got {self.repeats_per_fold}"),
            (self.seed >= 0, f"seed must be non-negative, got {self.seed}"),
            (
                0.0 <= self.angle_range <= MAX_ROTATION_ANGLE,
                f"angle range must lie in [0, {MAX_ROTATION_ANGLE:g}], got {self.angle_range}",
            ),
            (
                self.dataset_size > 0 and self.dataset_size % NUM_CLASSES == 0,
                f"dataset size must be a positive multiple of {NUM_CLASSES}, got {self.dataset_size}",
            ),
            (self.folds <= self.dataset_size, "more folds than examples"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        self.optimizer_config()
        return self

    def optimizer_config(self: "ExperimentConfig") -> OptimizerConfig:
        cfg = self.resolved()
        return OptimizerConfig(eta=cfg.eta, alpha=cfg.alpha, momentum_enabled=cfg.momentum_enabled)

    def snapshot(self: "ExperimentConfig") -> dict:
        """Plain-value copy of the resolved configuration for reports."""
        values = asdict(self.resolved())
        values["loss_kind"] = self.loss_kind.value
        return values


def _convert(name: str, raw: str) -> object:
    field_type = {field.name: field.type for field in fields(ExperimentConfig)}[name]
    text = raw.strip()
    try:
        if name == "loss_kind":
            return LossKind(text.lower())
        if field_type is bool:
            lowered = text.lower()
            if lowered in TRUE_WORDS:
                return True
            if lowered in FALSE_WORDS:
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if text.lower() in ("", "none"):
            if type(None) not in getattr(field_type, "__args__", ()):
                raise ValueError(f"{name} cannot be empty")
            return None
        if field_type is int:
            return int(text)
        if field_type in (float, float | None):
            return float(text)
        return text
    except ValueError as e:
        raise ConfigError(f"bad value for {name}: {e}") from e


def parse_config_text(text: str) -> dict:
    """
    Parse key=value lines into ExperimentConfig keyword arguments.

    Args:
        text: File contents; blank lines and '#' comments are ignored

    Returns:
        dict: Converted values keyed by field name

    Raises:
        ConfigError: On a malformed line or an unknown key
    """
    known = {field.name for field in fields(ExperimentConfig)}
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected key=value, got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip().replace("-", "_")
        key = ALIASES.get(key, key)
        if key not in known:
            raise ConfigError(f"line {number}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    return values


def load_config_file(path: str | Path) -> dict:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))
