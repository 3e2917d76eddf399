"""Truncated evaluation of generalized hypergeometric series."""

import logging
from typing import Any, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from services.errors import DivergenceError, DomainPoleError
from services.gamma_kernel import nearest_nonpositive_integer
from services.precision import PrecisionContext, Scalar, to_scalar


logger = logging.getLogger(__name__)

RATIO_LIMIT = 0.9


class HyperParams(BaseModel):
    """Upper parameters, lower parameters and argument of a pFq series."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    upper: Tuple[Any, ...] = ()
    lower: Tuple[Any, ...] = ()
    x: Any


class SeriesResult(BaseModel):
    """A truncated sum together with its truncation diagnostics."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: Any
    terms_used: int
    tail_estimate: Any
    terminated: bool = False
    terms: Tuple[Any, ...] = ()

    @model_validator(mode="after")
    def _finite_sums_have_no_tail(self) -> "SeriesResult":
        if self.terminated and self.tail_estimate != 0:
            raise ValueError("a terminated series cannot carry a tail estimate")
        return self


class TailMonitor:
    """Stopping rule shared by every truncated series.

    A series stops once ``consecutive_small`` successive terms satisfy
    |t_n| <= tail_epsilon * (1 + |S_n|). ``ratio_limit`` is the limit of the
    term ratio when known; the geometric tail bound never uses less.
    """

    def __init__(self, ctx: PrecisionContext, ratio_limit=None):
        self.ctx = ctx
        self.ratio_limit = ratio_limit
        self.eps = ctx.epsilon
        self.count = 0
        self.small_run = 0
        self.last = None
        self.previous = None

    def push(self, modulus, total) -> bool:
        """Record one term; True once the series has converged."""
        self.previous, self.last = self.last, modulus
        self.count += 1
        if modulus <= self.eps * (1 + abs(total)):
            self.small_run += 1
        else:
            self.small_run = 0
        return self.small_run >= self.ctx.consecutive_small

    @property
    def exhausted(self) -> bool:
        return self.count >= self.ctx.max_terms

    def growing(self) -> bool:
        return self.previous is not None and self.last >= self.previous

    def tail_estimate(self):
        mp = self.ctx.mp
        reference = self.last or self.previous
        if not reference:
            return mp.mpf(0)
        if self.last and self.previous:
            ratio = self.last / self.previous
            if self.ratio_limit is not None:
                ratio = max(ratio, self.ratio_limit)
            if ratio < RATIO_LIMIT:
                return self.last * ratio / (1 - ratio)
        return reference * self.ctx.max_terms


def _next_term(term: Scalar, upper: Sequence[Scalar], lower: Sequence[Scalar], x: Scalar, n: int) -> Scalar:
    numerator = 1
    for a in upper:
        numerator *= a + n
    denominator = 1
    for b in lower:
        denominator *= b + n
    return term * numerator / denominator * x / (n + 1)


def _terminating_length(upper: List[Scalar], lower: List[Scalar], ctx: PrecisionContext) -> Optional[int]:
    """Degree of a terminating series, or None; enforces the lower-parameter invariant."""
    upper_poles = [-p for p in (nearest_nonpositive_integer(a, ctx) for a in upper) if p is not None]
    lower_poles = [-p for p in (nearest_nonpositive_integer(b, ctx) for b in lower) if p is not None]
    degree = min(upper_poles) if upper_poles else None
    if lower_poles and (degree is None or degree >= min(lower_poles)):
        raise DomainPoleError(
            f"lower parameter -{min(lower_poles)} is a pole inside the summation range"
        )
    return degree


def _finite_sum(upper: List[Scalar], lower: List[Scalar], x: Scalar, degree: int, ctx: PrecisionContext) -> SeriesResult:
    term = ctx.mp.mpc(1)
    total = term
    terms = [term]
    for n in range(degree):
        term = _next_term(term, upper, lower, x, n)
        total += term
        terms.append(term)
    return SeriesResult(
        value=total,
        terms_used=degree + 1,
        tail_estimate=ctx.mp.mpf(0),
        terminated=True,
        terms=tuple(terms),
    )


def pfq(params: HyperParams, ctx: PrecisionContext) -> SeriesResult:
    """Partial sum of pFq(upper; lower; x) under the context's truncation policy."""
    mp = ctx.mp
    upper = [to_scalar(a, ctx) for a in params.upper]
    lower = [to_scalar(b, ctx) for b in params.lower]
    x = to_scalar(params.x, ctx)

    if x == 0:
        return SeriesResult(value=mp.mpc(1), terms_used=1, tail_estimate=mp.mpf(0), terminated=True, terms=(mp.mpc(1),))

    degree = _terminating_length(upper, lower, ctx)
    if degree is not None:
        return _finite_sum(upper, lower, x, degree, ctx)

    p, q = len(upper), len(lower)
    if p > q + 1:
        raise DivergenceError(f"{p}F{q} has zero radius of convergence")
    if p == q + 1 and abs(x) > RATIO_LIMIT:
        raise DivergenceError(
            f"{p}F{q} term ratio tends to |x| = {mp.nstr(abs(x), 8)} > {RATIO_LIMIT}; direct summation refused"
        )

    monitor = TailMonitor(ctx, ratio_limit=abs(x) if p == q + 1 else None)
    term = mp.mpc(1)
    total = term
    terms = [term]
    converged = monitor.push(abs(term), total)
    n = 0
    while not converged:
        if monitor.exhausted:
            if monitor.growing():
                raise DivergenceError(f"{p}F{q} terms stopped decreasing after {n + 1} terms")
            logger.warning(f"{p}F{q} hit max_terms={ctx.max_terms} before the tail rule was met")
            break
        term = _next_term(term, upper, lower, x, n)
        n += 1
        total += term
        terms.append(term)
        converged = monitor.push(abs(term), total)

    tail = monitor.tail_estimate()
    logger.debug(f"{p}F{q} summed {len(terms)} terms, tail {mp.nstr(tail, 5)}")
    return SeriesResult(value=total, terms_used=len(terms), tail_estimate=tail, terms=tuple(terms))


def f21_terminating(m: int, b: Scalar, c: Scalar, ctx: PrecisionContext) -> Scalar:
    """Finite sum 2F1(-m, b; c; -1)."""
    if m < 0:
        raise DomainPoleError(f"terminating degree must be nonnegative, got {m}")
    c = to_scalar(c, ctx)
    for k in range(m):
        if abs(c + k) <= ctx.pole_tolerance:
            raise DomainPoleError(f"(c)_n vanishes at n={k + 1} inside the terminating range")
    upper = [to_scalar(-m, ctx), to_scalar(b, ctx)]
    return _finite_sum(upper, [c], to_scalar(-1, ctx), m, ctx).value


def f01(b: Scalar, x: Scalar, ctx: PrecisionContext) -> SeriesResult:
    return pfq(HyperParams(lower=(b,), x=x), ctx)


def f03(b1: Scalar, b2: Scalar, b3: Scalar, x: Scalar, ctx: PrecisionContext) -> SeriesResult:
    return pfq(HyperParams(lower=(b1, b2, b3), x=x), ctx)


def pfq_reference(params: HyperParams, ctx: PrecisionContext) -> Scalar:
    """Independent oracle: mpmath's own pFq with acceleration and continuation."""
    mp = ctx.mp
    upper = [to_scalar(a, ctx) for a in params.upper]
    lower = [to_scalar(b, ctx) for b in params.lower]
    try:
        return mp.mpc(mp.hyper(upper, lower, to_scalar(params.x, ctx)))
    except mp.NoConvergence as e:
        raise DivergenceError(f"reference pFq did not converge: {e}") from e
    except (ValueError, ZeroDivisionError) as e:
        raise DomainPoleError(f"reference pFq undefined: {e}") from e


def hyp2f1_reference(a: Scalar, b: Scalar, c: Scalar, x: Scalar, ctx: PrecisionContext) -> Scalar:
    return pfq_reference(HyperParams(upper=(a, b), lower=(c,), x=x), ctx)
