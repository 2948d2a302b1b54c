"""
Golden-loss toolkit main module.

This is the main entry point, which configures logging and hands the
command line to the CLI dispatcher.
"""

import logging
import sys

from src.ui.cli import run
from src.utils.constants import LOG_FORMAT, LOG_LEVEL


def main():
    """
    Main entry point for the golden-loss toolkit.

    Configures the root logger and exits with the subcommand's status.
    """
    logging.basicConfig(format=LOG_FORMAT, level=LOG_LEVEL)
    sys.exit(run())


if __name__ == "__main__":
    main()
