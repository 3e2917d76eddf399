"""Single-case verification command."""

import argparse
import logging

from commands.common import (
    RunConfig,
    add_case_arguments,
    add_output_arguments,
    add_precision_arguments,
    build_case,
    emit,
    exit_code,
    render_reports,
)
from services.identity_engine import verify


logger = logging.getLogger(__name__)


def register(sub: argparse._SubParsersAction) -> None:
    cmd = sub.add_parser("verify", help="Verify one identity case")
    add_case_arguments(cmd)
    add_precision_arguments(cmd)
    add_output_arguments(cmd)
    cmd.set_defaults(handler=handle)


def run_verify(config: RunConfig) -> int:
    ctx = config.context()
    reports = [verify(case, ctx) for case in config.cases]
    for report in reports:
        logger.info(f"{report.case.label}: {report.verdict.value}")
    emit(render_reports(reports, config.format, ctx), config.output_path)
    return exit_code(r.verdict for r in reports)


def handle(args: argparse.Namespace) -> int:
    return run_verify(RunConfig.from_args(args, [build_case(args)]))
