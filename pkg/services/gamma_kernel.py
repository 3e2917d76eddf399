"""Gamma-family kernels with pole-safe limits.

Denominator gammas go through :func:`rgamma` and singular gamma ratios through
:func:`gamma_ratio_shift` / :func:`paired_gamma_ratio`; a raw :func:`gamma` at a
nonpositive integer is always a :class:`PoleError`, never an infinity.
"""

import logging
import math
from fractions import Fraction
from typing import Optional

from services.errors import DomainError, PoleError, RatioPoleError
from services.precision import PrecisionContext, Scalar, to_scalar


logger = logging.getLogger(__name__)


def nearest_nonpositive_integer(z: Scalar, ctx: PrecisionContext) -> Optional[int]:
    """The nonpositive integer within pole tolerance of ``z``, if any."""
    mp = ctx.mp
    z = to_scalar(z, ctx)
    nearest = int(mp.nint(z.real))
    if nearest > 0:
        return None
    if abs(z - nearest) <= ctx.pole_tolerance:
        return nearest
    return None


def is_pole(z: Scalar, ctx: PrecisionContext) -> bool:
    return nearest_nonpositive_integer(z, ctx) is not None


def gamma(z: Scalar, ctx: PrecisionContext, factor: Optional[str] = None) -> Scalar:
    """Gamma(z); raises PoleError at nonpositive integers."""
    z = to_scalar(z, ctx)
    pole = nearest_nonpositive_integer(z, ctx)
    if pole is not None:
        raise PoleError(pole, factor)
    return ctx.mp.mpc(ctx.mp.gamma(z))


def loggamma(z: Scalar, ctx: PrecisionContext) -> Scalar:
    """Principal branch of log Gamma(z)."""
    z = to_scalar(z, ctx)
    pole = nearest_nonpositive_integer(z, ctx)
    if pole is not None:
        raise PoleError(pole, "loggamma")
    return ctx.mp.mpc(ctx.mp.loggamma(z))


def rgamma(z: Scalar, ctx: PrecisionContext) -> Scalar:
    """1/Gamma(z), exactly zero at nonpositive integers."""
    z = to_scalar(z, ctx)
    if is_pole(z, ctx):
        return ctx.mp.mpc(0)
    return ctx.mp.mpc(ctx.mp.rgamma(z))


def pochhammer(a: Scalar, n: int, ctx: PrecisionContext) -> Scalar:
    """Rising factorial a(a+1)...(a+n-1); the empty product is 1."""
    if n < 0:
        raise DomainError(f"Pochhammer length must be nonnegative, got {n}")
    a = to_scalar(a, ctx)
    product = ctx.mp.mpc(1)
    for k in range(n):
        product *= a + k
    return product


def gamma_ratio_shift(z: Scalar, i: int, ctx: PrecisionContext) -> Scalar:
    """Gamma(z - i) / Gamma(z) as 1 / (z - i)_i.

    This is the analytic-continuation limit when both gammas are singular.
    """
    if i < 0:
        raise DomainError(f"shift must be nonnegative, got {i}")
    z = to_scalar(z, ctx)
    for k in range(1, i + 1):
        if abs(z - k) <= ctx.pole_tolerance:
            raise RatioPoleError(k - i, f"Gamma(z-{i})/Gamma(z) at z={k}")
    return 1 / pochhammer(z - i, i, ctx)


def gamma_ratio_int(z: Scalar, k: int, ctx: PrecisionContext) -> Scalar:
    """Gamma(z + k) / Gamma(z) for any integer k."""
    if k >= 0:
        return pochhammer(z, k, ctx)
    return gamma_ratio_shift(z, -k, ctx)


def shift(z: Scalar, offset: Fraction, ctx: PrecisionContext) -> Scalar:
    """z + offset for an exact rational offset."""
    mp = ctx.mp
    return mp.mpc(z) + mp.mpf(offset.numerator) / offset.denominator


def paired_gamma_ratio(
    z: Scalar,
    h: Fraction,
    g1: Fraction,
    g2: Fraction,
    ctx: PrecisionContext,
) -> Scalar:
    """Gamma(z+h) / (Gamma(z+g1) Gamma(z+g2)) for exact half-integer offsets.

    A denominator whose offset differs from h by an integer cancels against the
    numerator through :func:`gamma_ratio_int`, which keeps the value finite when
    both gammas sit on poles.
    """
    for g, other in ((g1, g2), (g2, g1)):
        gap = h - g
        if gap.denominator == 1:
            rest = rgamma(shift(z, other, ctx), ctx)
            if rest == 0:
                return rest
            return gamma_ratio_int(shift(z, g, ctx), int(gap), ctx) * rest

    denominator = rgamma(shift(z, g1, ctx), ctx) * rgamma(shift(z, g2, ctx), ctx)
    if denominator == 0:
        return denominator
    return gamma(shift(z, h, ctx), ctx, factor="numerator") * denominator


def binomial(i: int, r: int) -> int:
    """Exact binomial coefficient C(i, r)."""
    if r < 0 or i < 0 or r > i:
        raise DomainError(f"binomial({i}, {r}) is outside 0 <= r <= i")
    return math.comb(i, r)
