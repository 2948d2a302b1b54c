"""
Experiment Manager module for the golden-loss toolkit.

This module defines the Experiment class, which handles:
- Fold planning and per-fold seed streams
- The training loop (epochs x batches, selected loss and optimizer)
- Held-out evaluation and aggregation into an ExperimentReport
"""

import logging
import math
import statistics
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from src.data.dataset import one_hot_rows
from src.data.folds import kfold_split
from src.layers.checkpoint import save_checkpoint
from src.layers.network import Network, NetworkSpec, classifier_spec
from src.layers.tensor import ParamSet
from src.managers.optimizer import Optimizer
from src.maths.losses import (
    LossBatch,
    batch_proposed_grad,
    batch_proposed_loss,
    sse_grad,
    sse_loss,
)
from src.utils.config import ExperimentConfig
from src.utils.errors import NonFiniteError, ReportError, TrainingDivergedError
from src.utils.modes import LossKind, NormMode

logger = logging.getLogger(__name__)

LOSSES = {
    LossKind.SSE: (sse_loss, sse_grad),
    LossKind.PROPOSED: (batch_proposed_loss, batch_proposed_grad),
}


@dataclass
class ExperimentReport:
    """
    Outcome of a cross-validated run.

    Attributes:
        fold_accuracies: Held-out accuracy per fold, in percent
        mean: Mean of fold_accuracies
        std: Sample standard deviation of fold_accuracies (0 for one fold)
        seconds: Wall-clock duration
        config: Snapshot of the resolved configuration
        loss_traces: Per fold, the mean training loss of every epoch
    """

    fold_accuracies: list[float]
    mean: float
    std: float
    seconds: float
    config: dict
    loss_traces: list[list[float]] = field(default_factory=list)

    @classmethod
    def from_folds(
        cls: type["ExperimentReport"],
        fold_accuracies: list[float],
        seconds: float,
        config: dict,
        loss_traces: list[list[float]],
    ) -> "ExperimentReport":
        mean, std = summarize(fold_accuracies)
        return cls(fold_accuracies, mean, std, seconds, config, loss_traces)

    def verify(self: "ExperimentReport") -> "ExperimentReport":
        """
        Recompute the summary and range-check every accuracy.

        Raises:
            ReportError: If anything disagrees
        """
        mean, std = summarize(self.fold_accuracies)
        if abs(mean - self.mean) > 1e-12 or abs(std - self.std) > 1e-12:
            raise ReportError("mean/std do not match the per-fold accuracies")
        if any(not 0.0 <= accuracy <= 100.0 for accuracy in self.fold_accuracies):
            raise ReportError("accuracies must lie in [0, 100]")
        if any(not math.isfinite(value) for trace in self.loss_traces for value in trace):
            raise ReportError("training-loss trace holds non-finite values")
        return self


def summarize(values: list[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


class Experiment:
    """
    Cross-validated training of one configuration.

    The Experiment is responsible for:
    - Splitting the corpus into folds and seeding every (fold, repeat) run
    - Training a fresh parameter set per run
    - Scoring argmax accuracy on the held-out fold
    """

    def __init__(
        self: "Experiment",
        cfg: ExperimentConfig,
        images: np.ndarray,
        labels: np.ndarray,
        spec: NetworkSpec | None = None,
    ):
        """
        Initialize the experiment.

        Args:
            cfg: Run configuration (validated here)
            images: float64 images in [0, 1], shape (N, H, W)
            labels: Integer labels, shape (N,)
            spec: Network description, the digit classifier by default
        """
        self.cfg = cfg.validate().resolved()
        self.images = images
        self.labels = np.asarray(labels)
        self.network = Network(spec or classifier_spec())
        self.targets = one_hot_rows(self.labels, self.network.spec.shapes()[-1][0])
        self.loss_fn, self.grad_fn = LOSSES[self.cfg.loss_kind]

    def run(self: "Experiment") -> ExperimentReport:
        """
        Train and evaluate every fold.

        Returns:
            ExperimentReport: Per-fold accuracies and their summary
        """
        start = time.perf_counter()
        cfg = self.cfg
        plan = kfold_split(len(self.labels), cfg.folds, cfg.seed)
        streams = np.random.SeedSequence(cfg.seed).spawn(cfg.folds * cfg.repeats_per_fold)
        logger.info(
            "Running %s loss, momentum %s (eta=%.6g, alpha=%.6g), %d folds x %d epochs",
            cfg.loss_kind.value,
            "on" if cfg.momentum_enabled else "off",
            cfg.eta,
            cfg.alpha,
            cfg.folds,
            cfg.epochs,
        )

        accuracies, traces = [], []
        for fold in range(cfg.folds):
            runs, fold_traces = [], []
            for repeat in range(cfg.repeats_per_fold):
                rng = np.random.default_rng(streams[fold * cfg.repeats_per_fold + repeat])
                params, trace = self.train(fold, plan.train_indices(fold), rng)
                runs.append(self.evaluate(params, plan.test_indices(fold)))
                fold_traces.append(trace)
                self._save(params, fold, repeat)
            accuracies.append(statistics.fmean(runs))
            traces.append(np.mean(fold_traces, axis=0).tolist() if cfg.epochs else [])
            logger.info("Fold %d/%d accuracy %.2f%%", fold + 1, cfg.folds, accuracies[-1])

        report = ExperimentReport.from_folds(
            accuracies, time.perf_counter() - start, cfg.snapshot(), traces
        )
        logger.info("Mean accuracy %.2f%% (std %.3f)", report.mean, report.std)
        return report.verify()

    def train(
        self: "Experiment", fold: int, indices: np.ndarray, rng: np.random.Generator
    ) -> tuple[ParamSet, list[float]]:
        """
        Train a fresh parameter set on the given examples.

        Args:
            fold: Fold index, for diagnostics
            indices: Training examples
            rng: Stream for initialization and epoch shuffles

        Returns:
            tuple: (trained params, mean training loss per epoch)

        Raises:
            TrainingDivergedError: If a batch loss or activation is not finite
        """
        cfg = self.cfg
        params = self.network.init_params(rng)
        optimizer = Optimizer(cfg.optimizer_config())
        trace = []
        for epoch in range(cfg.epochs):
            order = rng.permutation(indices)
            total = 0.0
            # The last incomplete batch is kept
            for number, begin in enumerate(range(0, len(order), cfg.batch_size)):
                rows = order[begin : begin + cfg.batch_size]
                try:
                    predictions, caches = self.network.forward(params, self.images[rows], NormMode.TRAIN)
                except NonFiniteError as error:
                    raise TrainingDivergedError(fold, epoch, number) from error
                batch = LossBatch(predictions, self.targets[rows])
                loss = self.loss_fn(batch)
                if not math.isfinite(loss):
                    raise TrainingDivergedError(fold, epoch, number)
                grads = self.network.backward(params, caches, self.grad_fn(batch))
                optimizer.step(params, grads)
                total += loss * len(rows)
            trace.append(total / len(order))
            logger.debug("Fold %d epoch %d loss %.6f", fold + 1, epoch + 1, trace[-1])
        return params, trace

    def evaluate(self: "Experiment", params: ParamSet, indices: np.ndarray) -> float:
        """
        Argmax accuracy in percent; ties go to the lowest class index.

        An untrained parameter set has no running statistics, so it is
        scored with batch statistics on a copy of the parameters.
        """
        if self.cfg.epochs:
            probabilities = self.network.predict(params, self.images[indices])
        else:
            scratch = {key: value.copy() for key, value in params.items()}
            probabilities = self.network.forward(scratch, self.images[indices], NormMode.TRAIN)[0]
        hits = np.argmax(probabilities, axis=1) == self.labels[indices]
        return 100.0 * float(np.mean(hits))

    def _save(self: "Experiment", params: ParamSet, fold: int, repeat: int):
        if not self.cfg.checkpoint_dir:
            return
        directory = Path(self.cfg.checkpoint_dir)
        directory.mkdir(parents=True, exist_ok=True)
        save_checkpoint(directory / f"fold{fold:02d}_run{repeat:02d}.glnn", params)


def canonical_configs(base: ExperimentConfig) -> list[ExperimentConfig]:
    """
    The three compared setups, sharing everything but loss and step rule.

    SSE without momentum, SSE with momentum, and the proposed loss with
    momentum. Learning rates and momentum weights are left to resolved().
    """
    return [
        replace(base, loss_kind=LossKind.SSE, momentum_enabled=False, eta=None, alpha=None),
        replace(base, loss_kind=LossKind.SSE, momentum_enabled=True, eta=None, alpha=None),
        replace(base, loss_kind=LossKind.PROPOSED, momentum_enabled=True, eta=None, alpha=None),
    ]


def run_experiment(
    cfg: ExperimentConfig, images: np.ndarray, labels: np.ndarray
) -> ExperimentReport:
    return Experiment(cfg, images, labels).run()
