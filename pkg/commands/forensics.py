"""Misprint forensics command."""

import argparse
import csv
import io
import json
import logging
from typing import List, Optional

from pydantic import BaseModel

from commands.common import RunConfig, add_output_arguments, add_precision_arguments, emit
from services.delta import parse_delta
from services.forensics_service import ForensicsRow, ForensicsService, Misprint
from services.precision import PrecisionContext, format_real, format_scalar


logger = logging.getLogger(__name__)


class ForensicsRecord(BaseModel):
    misprint: str
    description: str
    digits: int
    oracle: str
    as_printed: Optional[str] = None
    corrected: Optional[str] = None
    as_printed_rel_error: Optional[str] = None
    corrected_rel_error: Optional[str] = None
    verdict: str
    message: Optional[str] = None

    @classmethod
    def from_row(cls, row: ForensicsRow, ctx: PrecisionContext) -> "ForensicsRecord":
        def scalar(value):
            return format_scalar(value, ctx) if value is not None else None

        def real(value):
            return format_real(value, ctx) if value is not None else None

        return cls(
            misprint=row.probe.name.value,
            description=row.probe.description,
            digits=row.digits,
            oracle=format_scalar(row.oracle, ctx),
            as_printed=scalar(row.as_printed),
            corrected=scalar(row.corrected),
            as_printed_rel_error=real(row.as_printed_rel_error),
            corrected_rel_error=real(row.corrected_rel_error),
            verdict=row.verdict,
            message=row.message,
        )


def register(sub: argparse._SubParsersAction) -> None:
    cmd = sub.add_parser("forensics", help="Adjudicate suspected misprints against an oracle")
    cmd.add_argument(
        "--only",
        type=str,
        action="append",
        choices=[m.value for m in Misprint],
        default=None,
        help="Restrict to one probe (repeatable)",
    )
    cmd.add_argument("--delta", type=str, default=None, help="Override the probe sequence")
    add_precision_arguments(cmd)
    add_output_arguments(cmd)
    cmd.set_defaults(handler=handle)


def render_rows(rows: List[ForensicsRow], fmt: str, ctx: PrecisionContext) -> str:
    records = [ForensicsRecord.from_row(row, ctx).model_dump() for row in rows]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(ForensicsRecord.model_fields), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        return buffer.getvalue()
    return json.dumps(records, indent=2) + "\n"


def run_forensics(config: RunConfig, only: Optional[List[str]] = None, delta: Optional[str] = None) -> int:
    ctx = config.context()
    rows = ForensicsService().run(
        ctx,
        only=[Misprint(name) for name in only] if only else None,
        delta=parse_delta(delta) if delta else None,
    )
    emit(render_rows(rows, config.format, ctx), config.output_path)
    return 3 if any(row.verdict == "inconclusive" for row in rows) else 0


def handle(args: argparse.Namespace) -> int:
    return run_forensics(RunConfig.from_args(args), only=args.only, delta=args.delta)
