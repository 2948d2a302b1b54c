import io

import numpy as np
import pytest

from src.managers.experiment_manager import ExperimentReport
from src.maths.losses import HALF_PI, QUARTER_PI
from src.ui.reports import (
    SWEEP_HEADER,
    describe,
    emit_report,
    emit_comparison,
    format_constants,
    parse_report_csv,
    read_report_csv,
    sweep_loss,
)
from src.utils.config import ExperimentConfig
from src.utils.constants import CSV_HEADER
from src.utils.errors import ReportError
from src.utils.modes import LossKind, ReportFormat


def make_report(accuracies, **config):
    snapshot = ExperimentConfig(folds=len(accuracies), **config).snapshot()
    return ExperimentReport.from_folds(accuracies, 12.5, snapshot, [[0.3, 0.2]] * len(accuracies))


def test_constants_table():
    text = format_constants()
    assert "alpha = 0.874032" in text
    assert "eta   = 0.015867" in text
    assert "p1    = 0.618033" in text


def test_sweep_loss(tmp_path):
    path = tmp_path / "sweep.csv"
    table = sweep_loss(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert len(lines) == 1001

    parsed = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(parsed, table)
    d, information, loss = parsed[:, 0], parsed[:, 1], parsed[:, 3]
    # pi/4 sits midway between the two central grid points
    assert abs(d[np.argmin(loss)] - QUARTER_PI) <= (d[1] - d[0]) / 2 + 1e-12
    assert loss.min() == pytest.approx(0.25, abs=1e-5)

    interior = (d >= 0.01) & (d <= HALF_PI - 0.01)
    mirrored = information[::-1]
    assert np.max(np.abs(information[interior] - mirrored[interior])) < 1e-12


def test_sweep_to_stdout(capsys):
    sweep_loss(points=5)
    assert len(capsys.readouterr().out.splitlines()) == 6


def test_csv_report_round_trip(tmp_path):
    accuracies = [99.1, 99.4, 98.75, 99.0, 99.6, 99.2, 99.35, 98.9, 99.5, 99.05]
    path = tmp_path / "report.csv"
    emit_report(make_report(accuracies), ReportFormat.CSV, path)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 11
    assert lines[1].startswith("proposed,true,")

    parsed = read_report_csv(path)
    assert list(parsed.values()) == [accuracies]
    (key,) = parsed
    assert key[0] == "proposed" and key[1] is True and key[5] == 10


def test_csv_keeps_configurations_apart(tmp_path):
    path = tmp_path / "both.csv"
    emit_report(
        [make_report([70.0, 80.0], loss_kind=LossKind.SSE, momentum_enabled=False), make_report([99.0, 98.0])],
        ReportFormat.CSV,
        path,
    )
    parsed = read_report_csv(path)
    assert sorted(parsed.values()) == [[70.0, 80.0], [99.0, 98.0]]
    assert {key[:2] for key in parsed} == {("sse", False), ("proposed", True)}


def test_markdown_table_has_three_rows(capsys):
    reports = [
        make_report([70.0, 80.0, 82.2], loss_kind=LossKind.SSE, momentum_enabled=False),
        make_report([97.0, 99.0, 98.7], loss_kind=LossKind.SSE),
        make_report([99.3, 99.5, 99.4]),
    ]
    emit_comparison(reports)
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "| Loss | avg. accuracy (%) | std |"
    assert lines[2].startswith("| SSE without momentum | 77.4 |")
    assert lines[3].startswith("| SSE with momentum | 98.2 |")
    assert lines[4] == "| Proposed loss | 99.4 | 0.1 |"
    assert len(lines) == 5


def test_emission_verifies_reports():
    report = make_report([90.0, 91.0])
    report.std = 5.0
    with pytest.raises(ReportError):
        emit_report(report, ReportFormat.MARKDOWN)


def test_parse_rejects_bad_csv():
    with pytest.raises(ReportError):
        parse_report_csv(io.StringIO("a,b\n1,2\n"))
    with pytest.raises(ReportError):
        parse_report_csv(io.StringIO(",".join(CSV_HEADER) + "\nsse,true,0.01\n"))
    with pytest.raises(ReportError):
        parse_report_csv(io.StringIO(",".join(CSV_HEADER) + "\nsse,true,x,0.9,1,2,0,50\n"))


@pytest.mark.parametrize(
    "loss_kind, momentum, label",
    [
        ("sse", False, "SSE without momentum"),
        ("sse", True, "SSE with momentum"),
        ("proposed", True, "Proposed loss"),
        ("proposed", False, "Proposed loss without momentum"),
    ],
)
def test_describe(loss_kind, momentum, label):
    assert describe({"loss_kind": loss_kind, "momentum_enabled": momentum}) == label


def test_accuracies_written_exactly(tmp_path):
    accuracies = [100.0 / 3.0, 2.0 / 3.0 * 100.0]
    path = tmp_path / "report.csv"
    emit_report(make_report(accuracies), path=path)
    assert list(read_report_csv(path).values()) == [accuracies]
