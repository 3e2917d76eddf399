"""Grid sweep command."""

import argparse
import logging
from collections import Counter
from pathlib import Path

from commands.common import RunConfig, add_output_arguments, add_precision_arguments, emit, exit_code, render_reports
from services.errors import ConfigError
from services.sweep_service import SweepService, load_grid


logger = logging.getLogger(__name__)


def register(sub: argparse._SubParsersAction) -> None:
    cmd = sub.add_parser("sweep", help="Verify every case of a JSON grid")
    cmd.add_argument("--grid", type=Path, required=True, help="JSON grid description")
    cmd.add_argument("--workers", type=int, default=None, help="Concurrent case evaluations")
    add_precision_arguments(cmd)
    add_output_arguments(cmd)
    cmd.set_defaults(handler=handle)


def run_sweep(config: RunConfig) -> int:
    ctx = config.context()
    cases = config.cases or load_grid(config.grid, ctx).expand()
    if not cases:
        raise ConfigError("grid expands to no cases")

    reports = SweepService(config.workers).run_sync(cases, ctx)
    emit(render_reports(reports, config.format, ctx), config.output_path)

    tally = Counter(r.verdict.value for r in reports)
    logger.info(f"Sweep finished: {dict(sorted(tally.items()))}")
    return exit_code(r.verdict for r in reports)


def handle(args: argparse.Namespace) -> int:
    return run_sweep(RunConfig.from_args(args))
