"""Precision contexts and complex scalar arithmetic.

Every number the services work with is an mpmath complex created by the
``MPContext`` owned by a :class:`PrecisionContext`. Values remember the context
that produced them, so their precision is inherited from it.
"""

import logging
import re
import threading
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any, Optional, Tuple

from mpmath import MPContext
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator, model_validator

from config import settings
from services.errors import ConfigError, ParseError


logger = logging.getLogger(__name__)

# An mpmath complex bound to the MPContext of a PrecisionContext.
Scalar = Any

MIN_DIGITS = 20

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_RATIONAL_RE = re.compile(r"^([+-]?\d+)/(\d+)$")
_COMPLEX_RE = re.compile(rf"^(?P<re>[+-]?{_NUMBER})(?:(?P<im>[+-]{_NUMBER})i)?$")
_IMAGINARY_RE = re.compile(rf"^(?P<im>[+-]?{_NUMBER})i$")


class PrecisionContext(BaseModel):
    """Working precision, truncation policy and tolerance bundle."""

    model_config = ConfigDict(frozen=True)

    digits: int = Field(default=50, ge=MIN_DIGITS)
    max_terms: int = Field(default=400, ge=10)
    tail_epsilon: Decimal
    consecutive_small: int = Field(default=5, ge=1)

    _local: threading.local = PrivateAttr(default_factory=threading.local)

    @model_validator(mode="before")
    @classmethod
    def _derive_tail_epsilon(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("tail_epsilon") is None:
            digits = int(data.get("digits", 50))
            data = {**data, "tail_epsilon": Decimal(10) ** (10 - digits)}
        return data

    @field_validator("tail_epsilon")
    @classmethod
    def _check_tail_epsilon(cls, value: Decimal) -> Decimal:
        if not Decimal(0) < value < Decimal(1):
            raise ValueError("tail_epsilon must lie strictly between 0 and 1")
        return value

    @property
    def mp(self) -> MPContext:
        """The mpmath context at this precision (one per thread)."""
        mp = getattr(self._local, "mp", None)
        if mp is None:
            mp = MPContext()
            mp.dps = self.digits
            self._local.mp = mp
        return mp

    @property
    def epsilon(self):
        """tail_epsilon as an mpmath real."""
        return self.mp.mpf(str(self.tail_epsilon))

    @property
    def pole_tolerance(self):
        return self.tolerance(5)

    def tolerance(self, slack: int):
        """10^-(digits - slack)."""
        return self.mp.mpf(10) ** (slack - self.digits)

    def escalate(self, extra_digits: int = 20, term_factor: int = 2) -> "PrecisionContext":
        """A stricter context for oracle evaluations."""
        return make_context(
            self.digits + extra_digits,
            max_terms=self.max_terms * term_factor,
            consecutive_small=self.consecutive_small,
        )

    @classmethod
    def from_settings(cls, digits: Optional[int] = None, max_terms: Optional[int] = None) -> "PrecisionContext":
        """Context from the global settings; explicit values win."""
        return make_context(
            digits if digits is not None else settings.digits,
            max_terms=max_terms if max_terms is not None else settings.max_terms,
            consecutive_small=settings.consecutive_small,
        )


def make_context(
    digits: int,
    max_terms: Optional[int] = None,
    tail_epsilon: Optional[Decimal] = None,
    consecutive_small: Optional[int] = None,
) -> PrecisionContext:
    """Build a context; unspecified policy values derive from ``digits``."""
    if digits < MIN_DIGITS:
        raise ConfigError(f"digits must be at least {MIN_DIGITS}, got {digits}")

    fields = {"digits": digits}
    if max_terms is not None:
        fields["max_terms"] = max_terms
    if tail_epsilon is not None:
        fields["tail_epsilon"] = Decimal(str(tail_epsilon))
    if consecutive_small is not None:
        fields["consecutive_small"] = consecutive_small

    try:
        return PrecisionContext(**fields)
    except ValidationError as e:
        raise ConfigError(f"Invalid precision context: {e}") from e


def _split(text: str) -> Tuple[str, str]:
    """Split a scalar literal into its real and imaginary literals."""
    cleaned = text.strip().replace(" ", "")
    if _RATIONAL_RE.match(cleaned):
        return cleaned, "0"
    match = _COMPLEX_RE.match(cleaned)
    if match:
        return match.group("re"), match.group("im") or "0"
    match = _IMAGINARY_RE.match(cleaned)
    if match:
        return "0", match.group("im")
    raise ParseError(f"Malformed scalar: {text!r}")


def _real(literal: str, mp: MPContext):
    rational = _RATIONAL_RE.match(literal)
    if rational:
        numerator, denominator = int(rational.group(1)), int(rational.group(2))
        if denominator == 0:
            raise ParseError(f"Zero denominator in {literal!r}")
        return mp.mpf(numerator) / denominator
    try:
        return mp.mpf(str(Decimal(literal)))
    except InvalidOperation as e:
        raise ParseError(f"Malformed number: {literal!r}") from e


def _join(re_part: str, im_part: str) -> str:
    if im_part.startswith("-"):
        return f"{re_part}{im_part}i"
    return f"{re_part}+{im_part.lstrip('+')}i"


def parse_scalar(text: str, ctx: PrecisionContext) -> Scalar:
    """Parse a decimal, rational or ``a+bi`` literal at ``ctx.digits``."""
    if not isinstance(text, str):
        raise ParseError(f"Expected a scalar literal, got {type(text).__name__}")
    re_part, im_part = _split(text)
    mp = ctx.mp
    return mp.mpc(_real(re_part, mp), _real(im_part, mp))


def to_scalar(value: Any, ctx: PrecisionContext) -> Scalar:
    """Coerce ints, floats, Fractions, literals and mpmath numbers."""
    mp = ctx.mp
    if isinstance(value, str):
        return parse_scalar(value, ctx)
    if isinstance(value, Fraction):
        return mp.mpc(mp.mpf(value.numerator) / value.denominator)
    if isinstance(value, complex):
        return mp.mpc(value.real, value.imag)
    if hasattr(value, "imag"):
        return mp.mpc(value.real, value.imag)
    return mp.mpc(value)


def format_scalar(z: Scalar, ctx: PrecisionContext) -> str:
    """Render ``z`` in the scalar grammar at full working precision."""
    mp = ctx.mp
    z = mp.mpc(z)
    re_part = mp.nstr(z.real, ctx.digits)
    if z.imag == 0:
        return re_part
    return _join(re_part, mp.nstr(z.imag, ctx.digits))


def format_real(value: Any, ctx: PrecisionContext) -> str:
    return ctx.mp.nstr(ctx.mp.mpf(value), ctx.digits)


def conjugate_text(text: str) -> str:
    """Conjugate a scalar literal without evaluating it."""
    re_part, im_part = _split(text)
    if im_part in ("0", "+0", "-0"):
        return text.strip()
    flipped = im_part[1:] if im_part.startswith("-") else "-" + im_part.lstrip("+")
    return _join(re_part, flipped)


def _context_of(*values: Any) -> MPContext:
    for value in values:
        mp = getattr(value, "context", None)
        if mp is not None:
            return mp
    raise TypeError("approx_equal needs at least one Scalar operand")


def approx_equal(a: Scalar, b: Scalar, rel_tol: Any) -> bool:
    """|a - b| <= rel_tol * (1 + max(|a|, |b|))."""
    mp = _context_of(a, b)
    tol = mp.mpf(str(rel_tol)) if isinstance(rel_tol, (Decimal, str)) else mp.mpf(rel_tol)
    if tol <= 0:
        raise ConfigError(f"rel_tol must be positive, got {rel_tol}")
    a, b = mp.mpc(a), mp.mpc(b)
    return abs(a - b) <= tol * (1 + max(abs(a), abs(b)))


def mixed_error(a: Scalar, b: Scalar):
    """The error measure approx_equal compares against rel_tol."""
    mp = _context_of(a, b)
    a, b = mp.mpc(a), mp.mpc(b)
    return abs(a - b) / (1 + max(abs(a), abs(b)))
