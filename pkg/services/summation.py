"""Kummer's summation theorem and its contiguous generalizations.

All closed forms evaluate 2F1(a, b; c; -1). The generalized forms share one
skeleton, described by a :class:`ClosedFormShape`:

    2^-a sqrt(pi) [Gamma(b-i)/Gamma(b)] Gamma(1+a-b+s i)
        * sum_r (+-1)^r C(i,r) Gamma(z+h_r) / (Gamma(z+g1) Gamma(z+g2) Gamma(a/2+(r-i+1)/2))

with z = a/2 - b. Offsets are exact rationals so integer gaps between the
numerator and a denominator cancel analytically.
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import Tuple

from pydantic import BaseModel, ConfigDict

from services.errors import DomainError
from services.gamma_kernel import binomial, gamma, gamma_ratio_shift, paired_gamma_ratio, rgamma, shift
from services.precision import PrecisionContext, Scalar, to_scalar


logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

# (constant part, coefficient of i)
Offset = Tuple[Fraction, Fraction]


class Mode(str, Enum):
    AS_PRINTED = "as-printed"
    CORRECTED = "corrected"


class KummerInput(BaseModel):
    """Parameters of a generalized Kummer evaluation."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: object
    b: object
    i: int = 0
    mode: Mode = Mode.CORRECTED


class ClosedFormShape(BaseModel):
    """One Kummer-type closed form."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    lower_sign: int
    gamma_sign: int
    ratio_factor: bool
    g1: Offset
    g2: Offset
    h: Offset
    alternating: bool

    def lower_parameter(self, a: Scalar, b: Scalar, i: int) -> Scalar:
        """The c in 2F1(a, b; c; -1) this shape claims to sum."""
        return 1 + a - b + self.lower_sign * i


def _at(offset: Offset, i: int) -> Fraction:
    return offset[0] + offset[1] * i


KST1 = ClosedFormShape(
    name="kst1",
    lower_sign=1,
    gamma_sign=1,
    ratio_factor=True,
    g1=(HALF, HALF),
    g2=(Fraction(1), HALF),
    h=(HALF, HALF),
    alternating=True,
)

KST2 = ClosedFormShape(
    name="kst2",
    lower_sign=-1,
    gamma_sign=-1,
    ratio_factor=False,
    g1=(HALF, -HALF),
    g2=(Fraction(1), -HALF),
    h=(HALF, -HALF),
    alternating=False,
)

# Gamma(1+a-b+i) and the +i/2 denominators of the plus form carried over verbatim.
KST2_AS_PRINTED = KST2.model_copy(
    update={"name": "kst2-as-printed", "gamma_sign": 1, "g1": (HALF, HALF), "g2": (Fraction(1), HALF)}
)


def closed_form(a: Scalar, b: Scalar, i: int, shape: ClosedFormShape, ctx: PrecisionContext) -> Scalar:
    """Evaluate ``shape`` at (a, b, i)."""
    if i < 0:
        raise DomainError(f"i must be a nonnegative integer, got {i}")
    mp = ctx.mp
    a, b = to_scalar(a, ctx), to_scalar(b, ctx)
    z = a / 2 - b
    g1, g2 = _at(shape.g1, i), _at(shape.g2, i)
    h0 = _at(shape.h, i)

    total = mp.mpc(0)
    for r in range(i + 1):
        denominator = rgamma(shift(a / 2, Fraction(r - i + 1, 2), ctx), ctx)
        if denominator == 0:
            continue
        term = binomial(i, r) * denominator * paired_gamma_ratio(z, h0 + Fraction(r, 2), g1, g2, ctx)
        if shape.alternating and r % 2:
            term = -term
        total += term

    sign = "+" if shape.gamma_sign > 0 else "-"
    prefactor = mp.power(2, -a) * mp.sqrt(mp.pi)
    prefactor *= gamma(1 + a - b + shape.gamma_sign * i, ctx, factor=f"Gamma(1+a-b{sign}i)")
    if shape.ratio_factor:
        prefactor *= gamma_ratio_shift(b, i, ctx)
    return prefactor * total


def kummer_classical(a: Scalar, b: Scalar, ctx: PrecisionContext) -> Scalar:
    """2F1(a, b; 1+a-b; -1) = Gamma(1+a/2) Gamma(1+a-b) / (Gamma(1+a) Gamma(1+a/2-b))."""
    a, b = to_scalar(a, ctx), to_scalar(b, ctx)
    numerator = gamma(1 + a / 2, ctx, factor="Gamma(1+a/2)") * gamma(1 + a - b, ctx, factor="Gamma(1+a-b)")
    denominator = gamma(1 + a, ctx, factor="Gamma(1+a)") * gamma(1 + a / 2 - b, ctx, factor="Gamma(1+a/2-b)")
    return numerator / denominator


def kummer_general_plus(params: KummerInput, ctx: PrecisionContext) -> Scalar:
    """2F1(a, b; 1+a-b+i; -1)."""
    return closed_form(params.a, params.b, params.i, KST1, ctx)


def minus_shape(mode: Mode) -> ClosedFormShape:
    return KST2 if Mode(mode) is Mode.CORRECTED else KST2_AS_PRINTED


def kummer_general_minus(params: KummerInput, ctx: PrecisionContext) -> Scalar:
    """2F1(a, b; 1+a-b-i; -1); the as-printed mode keeps the published prefactor."""
    return closed_form(params.a, params.b, params.i, minus_shape(params.mode), ctx)
