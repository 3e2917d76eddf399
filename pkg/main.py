"""Command-line entry point for Hypercheck."""

import argparse
import logging
import sys
from typing import List, Optional

from commands import SUBCOMMANDS
from commands.common import error_exit_code
from config import settings
from services.errors import HypercheckError


logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercheck",
        description="Verify double-series identities built on Kummer-type summation theorems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for module in SUBCOMMANDS:
        module.register(sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    logger.info(f"Starting {args.command}")
    try:
        code = args.handler(args)
    except HypercheckError as e:
        logger.error(f"{args.command} failed: {e}")
        return error_exit_code(e)
    logger.info(f"Finished {args.command} with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
