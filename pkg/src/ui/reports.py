"""
Report output for the golden-loss toolkit.

This module contains functions for writing results including:
- The golden constants table
- The loss sweep over the angular domain
- Per-fold experiment reports as CSV or a markdown comparison table
"""

import csv
import io
import sys
from pathlib import Path
from typing import TextIO

import numpy as np

from src.managers.experiment_manager import ExperimentReport
from src.maths.golden import SQRT2, golden_constants
from src.maths.losses import (
    HALF_PI,
    information_loss,
    proposed_loss,
    proposed_loss_grad,
    sigmoid_loss,
)
from src.utils.constants import CLAMP_EPSILON, CSV_HEADER, SWEEP_POINTS
from src.utils.errors import ReportError
from src.utils.modes import ReportFormat

SWEEP_HEADER = ["d", "L_I", "L", "Loss", "dLoss/dy"]


def _write(text: str, path: str | Path | None):
    """Write text to path, or to stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def format_constants() -> str:
    """
    Render the golden roots and the derived step parameters.

    Returns:
        str: One "name = value" line per constant plus the identity residuals
    """
    constants = golden_constants()
    lines = [
        f"p1    = {constants.p1!r}",
        f"p2    = {constants.p2!r}",
        f"alpha = {constants.alpha!r}",
        f"eta   = {constants.eta!r}",
        f"alpha / sqrt(2) - p1 = {constants.alpha / SQRT2 - constants.p1:.3e}",
        f"(1 - alpha)^2 - eta  = {(1.0 - constants.alpha) ** 2 - constants.eta:.3e}",
    ]
    return "\n".join(lines) + "\n"


def sweep_loss(path: str | Path | None = None, points: int = SWEEP_POINTS) -> np.ndarray:
    """
    Tabulate the loss family over an even grid of the clamped domain.

    Args:
        path: CSV destination, stdout when None
        points: Number of grid points

    Returns:
        np.ndarray: The table, one row per grid point, columns as SWEEP_HEADER
    """
    d = np.linspace(CLAMP_EPSILON, HALF_PI - CLAMP_EPSILON, points)
    table = np.column_stack(
        [
            d,
            information_loss(d),
            sigmoid_loss(d),
            proposed_loss(d),
            proposed_loss_grad(d),
        ]
    )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    writer.writerows([[repr(float(value)) for value in row] for row in table])
    _write(buffer.getvalue(), path)
    return table


def describe(config: dict) -> str:
    """Row label for a configuration snapshot."""
    if config["loss_kind"] == "sse":
        return "SSE with momentum" if config["momentum_enabled"] else "SSE without momentum"
    label = "Proposed loss"
    if not config["momentum_enabled"]:
        label += " without momentum"
    return label


def _csv_rows(report: ExperimentReport) -> list[list[str]]:
    config = report.config
    return [
        [
            config["loss_kind"],
            str(bool(config["momentum_enabled"])).lower(),
            repr(float(config["eta"])),
            repr(float(config["alpha"])),
            str(config["epochs"]),
            str(config["folds"]),
            str(fold),
            repr(float(accuracy)),
        ]
        for fold, accuracy in enumerate(report.fold_accuracies)
    ]


def _markdown(reports: list[ExperimentReport]) -> str:
    lines = ["| Loss | avg. accuracy (%) | std |", "|---|---|---|"]
    for report in reports:
        lines.append(f"| {describe(report.config)} | {report.mean:.1f} | {report.std:.1f} |")
    return "\n".join(lines) + "\n"


def emit_report(
    report: ExperimentReport | list[ExperimentReport],
    fmt: ReportFormat = ReportFormat.CSV,
    path: str | Path | None = None,
) -> str:
    """
    Verify and write one or more reports.

    CSV has one row per fold of every report under CSV_HEADER. Markdown has
    one row per report with mean accuracy and standard deviation.

    Args:
        report: A report or a list of reports (table rows)
        fmt: Output format
        path: Destination, stdout when None

    Returns:
        str: The emitted text

    Raises:
        ReportError: If a report's summary does not match its folds
    """
    reports = report if isinstance(report, list) else [report]
    for item in reports:
        item.verify()

    if fmt is ReportFormat.MARKDOWN:
        text = _markdown(reports)
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for item in reports:
            writer.writerows(_csv_rows(item))
        text = buffer.getvalue()

    _write(text, path)
    return text


def emit_comparison(reports: list[ExperimentReport], path: str | Path | None = None) -> str:
    return emit_report(reports, ReportFormat.MARKDOWN, path)


def parse_report_csv(stream: TextIO) -> dict[tuple, list[float]]:
    """
    Parse emitted CSV back into per-configuration fold accuracies.

    Args:
        stream: Readable text holding CSV_HEADER and rows

    Returns:
        dict: (loss, momentum, eta, alpha, epochs, folds) -> accuracies in fold order

    Raises:
        ReportError: On a wrong header or a malformed row
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ReportError(f"unexpected report header {header}")

    folds: dict[tuple, dict[int, float]] = {}
    for row in reader:
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise ReportError(f"malformed report row {row}")
        try:
            key = (row[0], row[1] == "true", float(row[2]), float(row[3]), int(row[4]), int(row[5]))
            folds.setdefault(key, {})[int(row[6])] = float(row[7])
        except ValueError as exc:
            raise ReportError(f"malformed report row {row}") from exc

    return {key: [values[fold] for fold in sorted(values)] for key, values in folds.items()}


def read_report_csv(path: str | Path) -> dict[tuple, list[float]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return parse_report_csv(handle)

