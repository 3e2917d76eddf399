"""Adjudication of suspected misprints against high-precision oracles.

Each probe evaluates a formula as published and in its corrected reading at the
working precision, then compares both with an oracle computed 20 digits higher
and with twice the term budget.
"""

import logging
from enum import Enum
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict

from services.delta import DeltaSequence
from services.errors import HypercheckError
from services.hyper_series import hyp2f1_reference
from services.identity_engine import IdentityCase, Theorem, lhs_double_series, rhs_corollary_32, rhs_theorem
from services.precision import PrecisionContext, mixed_error, to_scalar
from services.summation import KST2, KST2_AS_PRINTED, Mode, closed_form


logger = logging.getLogger(__name__)

MISMATCH_THRESHOLD = "1e-6"


class Misprint(str, Enum):
    KST2 = "kst2"
    T22 = "t22"
    T23 = "t23"
    C32 = "c32"


class MisprintProbe(BaseModel):
    """One suspected misprint and the parameters it is probed at."""

    model_config = ConfigDict(frozen=True)

    name: Misprint
    description: str
    a: Optional[str] = None
    b: Optional[str] = None
    i: int = 0
    case: Optional[IdentityCase] = None

    def with_delta(self, delta: DeltaSequence) -> "MisprintProbe":
        if self.case is None:
            return self
        return self.model_copy(update={"case": self.case.model_copy(update={"delta": delta})})


DEFAULT_PROBES = (
    MisprintProbe(
        name=Misprint.KST2,
        description="Gamma(1+a-b+i) and +i/2 denominators in the minus-i Kummer form",
        a="3",
        b="1/2",
        i=1,
    ),
    MisprintProbe(
        name=Misprint.T22,
        description="sign factor with no bound index",
        case=IdentityCase(theorem=Theorem.T22, rho="1.3", i=1, x="0.5", delta="harmonic"),
    ),
    MisprintProbe(
        name=Misprint.T23,
        description="second prefactor denominator offset",
        case=IdentityCase(theorem=Theorem.T23, rho="0.7", i=1, x="0.5", delta="const:1"),
    ),
    MisprintProbe(
        name=Misprint.C32,
        description="Delta index in the odd series",
        case=IdentityCase(theorem=Theorem.C32, rho="0.7", x="0.3", delta="geom:0.5"),
    ),
)


class ForensicsRow(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probe: MisprintProbe
    digits: int
    oracle: Any
    as_printed: Optional[Any] = None
    corrected: Optional[Any] = None
    as_printed_rel_error: Optional[Any] = None
    corrected_rel_error: Optional[Any] = None
    verdict: str
    message: Optional[str] = None


def _candidate(probe: MisprintProbe, mode: Mode, ctx: PrecisionContext) -> Any:
    if probe.name is Misprint.KST2:
        shape = KST2 if mode is Mode.CORRECTED else KST2_AS_PRINTED
        return closed_form(probe.a, probe.b, probe.i, shape, ctx)
    case = probe.case.with_mode(mode)
    if case.theorem is Theorem.C32:
        return rhs_corollary_32(case.rho, case.x, case.delta, mode, ctx).value
    return rhs_theorem(case, ctx).value


def _oracle(probe: MisprintProbe, ctx: PrecisionContext) -> Any:
    if probe.name is Misprint.KST2:
        a, b = to_scalar(probe.a, ctx), to_scalar(probe.b, ctx)
        return hyp2f1_reference(a, b, 1 + a - b - probe.i, -1, ctx)
    return lhs_double_series(probe.case, ctx).value


def adjudicate(probe: MisprintProbe, ctx: PrecisionContext) -> ForensicsRow:
    """Name the mode that matches the oracle, or ``inconclusive``."""
    strict = ctx.escalate()
    oracle = _oracle(probe, strict)
    match = ctx.tolerance(20)
    mismatch = strict.mp.mpf(MISMATCH_THRESHOLD)

    values = {}
    errors = {}
    notes = []
    for mode in (Mode.AS_PRINTED, Mode.CORRECTED):
        try:
            values[mode] = _candidate(probe, mode, ctx)
        except HypercheckError as e:
            notes.append(f"{mode.value}: {e}")
            continue
        errors[mode] = mixed_error(oracle, to_scalar(values[mode], strict))

    def matches(mode: Mode) -> bool:
        return mode in errors and errors[mode] <= match

    def misses(mode: Mode) -> bool:
        return mode not in errors or errors[mode] > mismatch

    verdict = "inconclusive"
    for mode, other in ((Mode.CORRECTED, Mode.AS_PRINTED), (Mode.AS_PRINTED, Mode.CORRECTED)):
        if matches(mode) and misses(other) and not matches(other):
            verdict = mode.value

    if verdict == "inconclusive":
        logger.warning(f"{probe.name.value}: no single mode matches the oracle")
    else:
        logger.info(f"{probe.name.value}: {verdict} matches the oracle")

    return ForensicsRow(
        probe=probe,
        digits=ctx.digits,
        oracle=oracle,
        as_printed=values.get(Mode.AS_PRINTED),
        corrected=values.get(Mode.CORRECTED),
        as_printed_rel_error=errors.get(Mode.AS_PRINTED),
        corrected_rel_error=errors.get(Mode.CORRECTED),
        verdict=verdict,
        message="; ".join(notes) or None,
    )


class ForensicsService:
    """Runs a set of misprint probes."""

    def run(
        self,
        ctx: PrecisionContext,
        only: Optional[List[Misprint]] = None,
        delta: Optional[DeltaSequence] = None,
    ) -> List[ForensicsRow]:
        probes = [p for p in DEFAULT_PROBES if not only or p.name in only]
        if delta is not None:
            probes = [p.with_delta(delta) for p in probes]
        logger.info(f"Adjudicating {len(probes)} probe(s) at {ctx.digits} digits")
        return [adjudicate(probe, ctx) for probe in probes]
