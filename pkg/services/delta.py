"""Bounded coefficient sequences and their command-line mini-language.

    const:<c>                 every term equals c
    geom:<q>                  q^m, |q| <= 1
    harmonic                  1/(m+1)
    table:<v0,v1,...;d>       listed terms, then d forever

Any of these may be prefixed with ``<scale>*``, e.g. ``2*geom:1/2``.
"""

import logging
import re
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from services.errors import DomainError, ParseError
from services.precision import PrecisionContext, Scalar, conjugate_text, parse_scalar


logger = logging.getLogger(__name__)

_SCALED_RE = re.compile(r"^([^:*]+)\*(.+)$")

DeltaKind = Literal["const", "geom", "harmonic", "table"]


class DeltaSequence(BaseModel):
    """A bounded sequence Delta_m, kept as literals until bound to a context."""

    model_config = ConfigDict(frozen=True)

    kind: DeltaKind = "const"
    param: Optional[str] = "1"
    values: Tuple[str, ...] = ()
    default: str = "0"
    scale: str = "1"

    @property
    def spec(self) -> str:
        if self.kind == "harmonic":
            body = "harmonic"
        elif self.kind == "table":
            body = f"table:{','.join(self.values)};{self.default}"
        else:
            body = f"{self.kind}:{self.param}"
        return body if self.scale == "1" else f"{self.scale}*{body}"

    @property
    def is_constant(self) -> bool:
        return self.kind == "const"

    def conjugated(self) -> "DeltaSequence":
        return self.model_copy(
            update={
                "param": conjugate_text(self.param) if self.param is not None else None,
                "values": tuple(conjugate_text(v) for v in self.values),
                "default": conjugate_text(self.default),
                "scale": conjugate_text(self.scale),
            }
        )

    def scaled(self, factor: str) -> "DeltaSequence":
        """c * Delta; only an unscaled sequence can be scaled."""
        if self.scale != "1":
            raise DomainError(f"{self.spec} is already scaled")
        return self.model_copy(update={"scale": factor})

    def bind(self, ctx: PrecisionContext) -> "BoundDelta":
        return BoundDelta(self, ctx)

    def validate_bounded(self, ctx: PrecisionContext) -> None:
        """Parse every literal and reject unbounded geometric ratios."""
        bound = self.bind(ctx)
        if self.kind == "geom" and abs(bound.param) > 1:
            raise DomainError(f"geometric ratio {self.param} has modulus above 1; sequence is unbounded")


class BoundDelta:
    """A DeltaSequence with its literals parsed under one precision context."""

    def __init__(self, sequence: DeltaSequence, ctx: PrecisionContext):
        self.sequence = sequence
        self.ctx = ctx
        self.scale = parse_scalar(sequence.scale, ctx)
        self.param = parse_scalar(sequence.param, ctx) if sequence.kind in ("const", "geom") else None
        self.values = tuple(parse_scalar(v, ctx) for v in sequence.values)
        self.default = parse_scalar(sequence.default, ctx)

    def __call__(self, m: int) -> Scalar:
        kind = self.sequence.kind
        if kind == "const":
            value = self.param
        elif kind == "geom":
            value = self.param ** m
        elif kind == "harmonic":
            value = self.ctx.mp.mpc(1) / (m + 1)
        else:
            value = self.values[m] if m < len(self.values) else self.default
        return self.scale * value


def parse_delta(text: str) -> DeltaSequence:
    """Parse the Delta mini-language; literals are checked later against a context."""
    cleaned = text.strip().replace(" ", "")
    scale = "1"
    scaled = _SCALED_RE.match(cleaned)
    if scaled:
        scale, cleaned = scaled.group(1), scaled.group(2)

    if cleaned == "harmonic":
        return DeltaSequence(kind="harmonic", param=None, scale=scale)

    kind, sep, body = cleaned.partition(":")
    if not sep or not body:
        raise ParseError(f"Malformed delta spec: {text!r}")
    if kind in ("const", "geom"):
        return DeltaSequence(kind=kind, param=body, scale=scale)
    if kind == "table":
        listed, sep, default = body.partition(";")
        if not sep or not default:
            raise ParseError(f"table delta needs an explicit ';default': {text!r}")
        values = tuple(v for v in listed.split(",") if v)
        return DeltaSequence(kind="table", param=None, values=values, default=default, scale=scale)
    raise ParseError(f"Unknown delta kind {kind!r} in {text!r}")
