"""Evaluation command: one side of an identity, or a Kummer closed form."""

import argparse
import json
import logging
from typing import Dict

from commands.common import RunConfig, add_case_arguments, add_output_arguments, add_precision_arguments, build_case, emit
from services.errors import ConfigError
from services.hyper_series import SeriesResult, hyp2f1_reference
from services.identity_engine import (
    GENERAL,
    IdentityCase,
    Theorem,
    lhs_double_series,
    rhs_corollary_31,
    rhs_corollary_32,
    rhs_theorem,
)
from services.precision import PrecisionContext, format_real, format_scalar, mixed_error, parse_scalar, to_scalar
from services.summation import KST1, KummerInput, Mode, kummer_classical, kummer_general_minus, kummer_general_plus, minus_shape


logger = logging.getLogger(__name__)


def register(sub: argparse._SubParsersAction) -> None:
    cmd = sub.add_parser("eval", help="Evaluate one side of a case or a Kummer closed form")
    add_case_arguments(cmd, required=False)
    cmd.add_argument("--side", type=str, choices=["lhs", "rhs", "both"], default="both")
    cmd.add_argument("--kummer", type=str, choices=["classical", "plus", "minus"], default=None)
    cmd.add_argument("--a", type=str, default=None)
    cmd.add_argument("--b", type=str, default=None)
    add_precision_arguments(cmd)
    add_output_arguments(cmd)
    cmd.set_defaults(handler=handle)


def _series_payload(result: SeriesResult, ctx: PrecisionContext) -> Dict[str, object]:
    return {
        "value": format_scalar(result.value, ctx),
        "tail": format_real(result.tail_estimate, ctx),
        "terms_used": result.terms_used,
    }


def _rhs(case: IdentityCase, ctx: PrecisionContext) -> SeriesResult:
    if case.theorem in GENERAL:
        return rhs_theorem(case, ctx)
    if case.theorem is Theorem.C31:
        return rhs_corollary_31(case.rho, case.x, case.delta, ctx)
    if case.theorem is Theorem.C32:
        return rhs_corollary_32(case.rho, case.x, case.delta, case.mode, ctx)
    raise ConfigError(f"{case.theorem.value} is a product formula; use verify")


def evaluate_case(case: IdentityCase, side: str, ctx: PrecisionContext) -> Dict[str, object]:
    payload: Dict[str, object] = {
        "theorem": case.theorem.value,
        "rho": case.rho,
        "i": case.i,
        "x": case.x,
        "delta": case.delta.spec,
        "mode": case.mode.value,
        "digits": ctx.digits,
    }
    if side in ("lhs", "both"):
        payload["lhs"] = _series_payload(lhs_double_series(case, ctx), ctx)
    if side in ("rhs", "both"):
        payload["rhs"] = _series_payload(_rhs(case, ctx), ctx)
    return payload


def evaluate_kummer(kind: str, params: KummerInput, ctx: PrecisionContext) -> Dict[str, object]:
    """A closed form next to the hypergeometric reference at 20 extra digits."""
    a, b = to_scalar(params.a, ctx), to_scalar(params.b, ctx)
    if kind == "classical":
        value, c = kummer_classical(a, b, ctx), 1 + a - b
    elif kind == "plus":
        value, c = kummer_general_plus(params, ctx), KST1.lower_parameter(a, b, params.i)
    else:
        value, c = kummer_general_minus(params, ctx), minus_shape(params.mode).lower_parameter(a, b, params.i)

    strict = ctx.escalate()
    reference = hyp2f1_reference(a, b, c, -1, strict)
    return {
        "kummer": kind,
        "a": params.a,
        "b": params.b,
        "i": params.i if kind != "classical" else 0,
        "mode": params.mode.value,
        "c": format_scalar(c, ctx),
        "digits": ctx.digits,
        "closed_form": format_scalar(value, ctx),
        "reference": format_scalar(reference, ctx),
        "rel_error": format_real(mixed_error(reference, to_scalar(value, strict)), ctx),
    }


def handle(args: argparse.Namespace) -> int:
    if args.kummer:
        if args.a is None or args.b is None:
            raise ConfigError("--kummer needs --a and --b")
        config = RunConfig.from_args(args)
        ctx = config.context()
        parse_scalar(args.a, ctx)
        parse_scalar(args.b, ctx)
        params = KummerInput(a=args.a, b=args.b, i=args.i, mode=Mode(args.mode))
        payload = evaluate_kummer(args.kummer, params, ctx)
    else:
        if args.theorem is None or args.rho is None or args.x is None:
            raise ConfigError("eval needs --theorem, --rho and --x, or --kummer")
        config = RunConfig.from_args(args, [build_case(args)])
        payload = evaluate_case(config.cases[0], args.side, config.context())

    emit(json.dumps(payload, indent=2) + "\n", config.output_path)
    return 0
