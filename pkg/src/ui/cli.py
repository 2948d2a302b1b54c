"""
Command-line surface for the golden-loss toolkit.

Subcommands:
- constants: print the golden roots, momentum weight and learning rate
- losscheck: write the loss sweep as CSV
- gradcheck: run the finite-difference suite
- train: run one cross-validated configuration
- table1: run the three canonical configurations and print the comparison
"""

import argparse
import logging
import sys

from src.managers.experiment_manager import Experiment, canonical_configs
from src.managers.gradcheck_manager import run_gradcheck
from src.ui.reports import emit_report, emit_comparison, format_constants, sweep_loss
from src.utils.config import ALIASES, ExperimentConfig, load_config_file
from src.utils.constants import DEFAULT_SEED, SWEEP_POINTS
from src.utils.errors import ConfigError, DomainError, GoldenNetError, ReportError
from src.utils.modes import CheckScale, LossKind, ReportFormat
from src.utils.resource_manager import ResourceManager

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _add_experiment_flags(parser: argparse.ArgumentParser):
    # Every default is None so that only flags given explicitly override the config file
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--loss", choices=[kind.value for kind in LossKind], default=None)
    parser.add_argument("--momentum", dest="momentum", action="store_true", default=None)
    parser.add_argument("--no-momentum", dest="momentum", action="store_false", default=None)
    parser.add_argument("--eta", type=float, default=None, help="learning rate")
    parser.add_argument("--alpha", type=float, default=None, help="momentum weight")
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--folds", type=int, default=None)
    parser.add_argument("--repeats", type=int, default=None, help="runs averaged per fold")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--images", default=None, help="IDX image file")
    parser.add_argument("--labels", default=None, help="IDX label file")
    parser.add_argument("--angle-range", type=float, default=None, help="degrees")
    parser.add_argument("--dataset-size", type=int, default=None)
    parser.add_argument("--cache", default=None, help="rotated dataset cache file")
    parser.add_argument("--checkpoint-dir", default=None)
    parser.add_argument("--out", default=None, help="output file (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="golden-loss",
        description="Golden-ratio loss, learning rate and momentum toolkit",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("constants", help="print the golden constants")

    losscheck = commands.add_parser("losscheck", help="write the loss sweep as CSV")
    losscheck.add_argument("--points", type=int, default=SWEEP_POINTS)
    losscheck.add_argument("--out", default=None)

    gradcheck = commands.add_parser("gradcheck", help="finite-difference gradient checks")
    gradcheck.add_argument("--scale", choices=[scale.value for scale in CheckScale], default=CheckScale.TINY.value)
    gradcheck.add_argument("--seed", type=int, default=DEFAULT_SEED)

    train = commands.add_parser("train", help="cross-validate one configuration")
    _add_experiment_flags(train)
    train.add_argument("--format", choices=[fmt.value for fmt in ReportFormat], default=ReportFormat.CSV.value)

    table1 = commands.add_parser("table1", help="compare the three canonical configurations")
    _add_experiment_flags(table1)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """
    Merge defaults, the optional config file and explicit flags.

    Args:
        args: Parsed train or table1 arguments

    Returns:
        ExperimentConfig: The validated configuration

    Raises:
        ConfigError: On a bad file or an invalid combination
    """
    values = load_config_file(args.config) if args.config else {}
    flags = {
        "loss": args.loss,
        "momentum": args.momentum,
        "eta": args.eta,
        "alpha": args.alpha,
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "folds": args.folds,
        "repeats": args.repeats,
        "seed": args.seed,
        "images": args.images,
        "labels": args.labels,
        "angle_range": args.angle_range,
        "dataset_size": args.dataset_size,
        "cache": args.cache,
        "checkpoint_dir": args.checkpoint_dir,
    }
    for name, value in flags.items():
        if value is None:
            continue
        if name == "loss":
            value = LossKind(value)
        values[ALIASES.get(name, name)] = value

    cfg = ExperimentConfig(**values)
    if not cfg.images_path or not cfg.labels_path:
        raise ConfigError("--images and --labels are required")
    return cfg.validate()


def _load(resources: ResourceManager, cfg: ExperimentConfig):
    return resources.load_rotated(
        cfg.images_path,
        cfg.labels_path,
        cfg.dataset_size,
        cfg.angle_range,
        cfg.seed,
        cfg.cache_path,
    )


def command_constants(args: argparse.Namespace) -> int:
    sys.stdout.write(format_constants())
    return EXIT_OK


def command_losscheck(args: argparse.Namespace) -> int:
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    sweep_loss(args.out, args.points)
    return EXIT_OK


def command_gradcheck(args: argparse.Namespace) -> int:
    report = run_gradcheck(CheckScale(args.scale), args.seed)
    for entry in report.entries:
        status = "ok" if entry.passed else "FAILED"
        sys.stdout.write(f"{entry.component:<20} {entry.max_error:.3e} <= {entry.tolerance:.0e} {status}\n")
    if not report.passed:
        logger.error("Gradient check failed for: %s", ", ".join(report.failures()))
        return EXIT_INVALID
    return EXIT_OK


def command_train(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    images, labels = _load(ResourceManager(), cfg)
    report = Experiment(cfg, images, labels).run()
    emit_report(report, ReportFormat(args.format), args.out)
    logger.info(
        "Mean accuracy %.2f%% (std %.2f) in %.1fs", report.mean, report.std, report.seconds
    )
    return EXIT_OK


def command_compare(args: argparse.Namespace) -> int:
    overrides = {
        "--loss": args.loss,
        "--momentum/--no-momentum": args.momentum,
        "--eta": args.eta,
        "--alpha": args.alpha,
    }
    fixed = [flag for flag, value in overrides.items() if value is not None]
    if fixed:
        raise ConfigError(f"table1 runs its own loss and optimizer settings; drop {', '.join(fixed)}")
    base = config_from_args(args)
    images, labels = _load(ResourceManager(), base)
    reports = []
    for cfg in canonical_configs(base):
        logger.info("Running %s", cfg.snapshot())
        reports.append(Experiment(cfg.validate(), images, labels).run())
    emit_comparison(reports, args.out)
    return EXIT_OK


COMMANDS = {
    "constants": command_constants,
    "losscheck": command_losscheck,
    "gradcheck": command_gradcheck,
    "train": command_train,
    "table1": command_compare,
}


def run(argv: list[str] | None = None) -> int:
    """
    Parse argv, dispatch the subcommand and map errors to exit codes.

    Returns:
        int: 0 on success, 1 on a validation failure, 2 on a runtime error
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse reports usage errors with its own exit status
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError, ReportError) as e:
        logger.error("%s", e)
        return EXIT_INVALID
    except (GoldenNetError, OSError) as e:
        logger.error("%s", e)
        return EXIT_RUNTIME
