"""Shared argument groups, run configuration and report writers."""

import argparse
import csv
import io
import json
import logging
from pathlib import Path
from typing import Iterable, List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, ValidationError

from config import settings
from services.errors import ConfigError, DivergenceError, DomainError, HypercheckError, ParseError, PoleError
from services.identity_engine import IdentityCase, Theorem, Verdict, VerificationReport
from services.precision import PrecisionContext, format_real, format_scalar
from services.summation import Mode


logger = logging.getLogger(__name__)

CSV_COLUMNS = ("theorem", "rho", "i", "x", "delta", "mode", "lhs", "rhs", "rel_error", "verdict")


class RunConfig(BaseModel):
    """Everything a command needs, resolved from flags and settings."""

    model_config = ConfigDict(frozen=True)

    command: Literal["verify", "sweep", "eval", "forensics"]
    cases: List[IdentityCase] = []
    grid: Optional[Path] = None
    digits: int = settings.digits
    max_terms: int = settings.max_terms
    workers: int = settings.workers
    output_path: Optional[Path] = None
    format: Literal["json", "csv"] = "json"

    def context(self) -> PrecisionContext:
        return PrecisionContext.from_settings(digits=self.digits, max_terms=self.max_terms)

    @classmethod
    def from_args(cls, args: argparse.Namespace, cases: Sequence[IdentityCase] = ()) -> "RunConfig":
        try:
            return cls(
                command=args.command,
                cases=list(cases),
                grid=getattr(args, "grid", None),
                digits=args.digits if args.digits is not None else settings.digits,
                max_terms=args.max_terms if args.max_terms is not None else settings.max_terms,
                workers=getattr(args, "workers", None) or settings.workers,
                output_path=getattr(args, "out", None),
                format=getattr(args, "format", None) or settings.report_format,
            )
        except ValidationError as e:
            raise ConfigError(f"Invalid run configuration: {e}") from e


class ReportRecord(BaseModel):
    """One verification report in the JSON report schema."""

    theorem: str
    rho: str
    i: int
    x: str
    delta: str
    mode: str
    digits: int
    lhs: Optional[str] = None
    rhs: Optional[str] = None
    abs_error: Optional[str] = None
    rel_error: Optional[str] = None
    lhs_tail: Optional[str] = None
    rhs_tail: Optional[str] = None
    verdict: Literal["pass", "fail", "inconclusive", "domain_error"]
    terms_used_lhs: int
    terms_used_rhs: int

    @classmethod
    def from_report(cls, report: VerificationReport, ctx: PrecisionContext) -> "ReportRecord":
        def scalar(value):
            return format_scalar(value, ctx) if value is not None else None

        def real(value):
            return format_real(value, ctx) if value is not None else None

        case = report.case
        return cls(
            theorem=case.theorem.value,
            rho=case.rho,
            i=case.i,
            x=case.x,
            delta=case.delta.spec,
            mode=case.mode.value,
            digits=report.digits,
            lhs=scalar(report.lhs),
            rhs=scalar(report.rhs),
            abs_error=real(report.abs_error),
            rel_error=real(report.rel_error),
            lhs_tail=real(report.lhs_tail),
            rhs_tail=real(report.rhs_tail),
            verdict=report.verdict.value,
            terms_used_lhs=report.terms_used_lhs,
            terms_used_rhs=report.terms_used_rhs,
        )


def add_precision_arguments(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--digits", type=int, default=None, help="Working precision in decimal digits")
    cmd.add_argument("--max-terms", type=int, default=None, help="Truncation budget per series")
    cmd.add_argument("--log-level", type=str, default=None, help="Diagnostic log level (stderr)")


def add_output_arguments(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--format", type=str, choices=["json", "csv"], default=None)
    cmd.add_argument("--out", type=Path, default=None, help="Report path; stdout when omitted")


def add_case_arguments(cmd: argparse.ArgumentParser, required: bool = True) -> None:
    cmd.add_argument("--theorem", type=str, choices=[t.value for t in Theorem], required=required)
    cmd.add_argument("--rho", type=str, required=required)
    cmd.add_argument("--i", type=int, default=0, help="Nonnegative shift i")
    cmd.add_argument("--x", type=str, required=required)
    cmd.add_argument("--delta", type=str, default="const:1", help="const:<c> | geom:<q> | harmonic | table:<v0,...;d>")
    cmd.add_argument("--mode", type=str, choices=[m.value for m in Mode], default=Mode.CORRECTED.value)


def build_case(args: argparse.Namespace) -> IdentityCase:
    try:
        return IdentityCase(
            theorem=args.theorem,
            rho=args.rho,
            i=args.i,
            x=args.x,
            delta=args.delta,
            mode=args.mode,
        )
    except ValidationError as e:
        raise ConfigError(f"Invalid case: {e}") from e


def render_reports(reports: Iterable[VerificationReport], fmt: str, ctx: PrecisionContext) -> str:
    """JSON array (canonical) or CSV projection; no timestamps, so output is reproducible."""
    records = [ReportRecord.from_report(r, ctx) for r in reports]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for record in records:
            writer.writerow(record.model_dump())
        return buffer.getvalue()
    return json.dumps([r.model_dump() for r in records], indent=2) + "\n"


def emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        print(text, end="")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    logger.info(f"Wrote {out}")


def exit_code(verdicts: Iterable[Verdict]) -> int:
    """0 all pass, 1 any fail, 3 any inconclusive, 2 when nothing could be decided."""
    decided = [Verdict(v) for v in verdicts if Verdict(v) is not Verdict.DOMAIN_ERROR]
    if not decided:
        return 2
    if Verdict.FAIL in decided:
        return 1
    if Verdict.INCONCLUSIVE in decided:
        return 3
    return 0


def error_exit_code(error: HypercheckError) -> int:
    """Exit code for an error that ended a command."""
    if isinstance(error, (ConfigError, ParseError, DomainError)):
        return 2
    if isinstance(error, PoleError):
        return 1
    if isinstance(error, DivergenceError):
        return 3
    return 2
