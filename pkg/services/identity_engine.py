"""Double-series identities with a bounded coefficient sequence Delta.

Every left-hand side has the form

    sum_m sum_n (-1)^n Delta_{m+n} x^{m+n} / ((rho)_m (sigma)_n m! n!)

and is summed along the diagonals m + n = N. Re-indexing the inner sum turns
the diagonal block into c_N / ((rho)_N N!) with c_N = 2F1(-N, 1-rho-N; sigma; -1),
so each right-hand side is a single series over m whose coefficient comes from a
Kummer-type closed form.
"""

import logging
from enum import Enum
from fractions import Fraction
from itertools import count
from typing import Any, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from services.delta import DeltaSequence, parse_delta
from services.errors import DivergenceError, DomainError, HypercheckError, PoleError
from services.gamma_kernel import nearest_nonpositive_integer
from services.hyper_series import SeriesResult, TailMonitor, f01, f03, f21_terminating
from services.precision import (
    PrecisionContext,
    Scalar,
    conjugate_text,
    mixed_error,
    parse_scalar,
    to_scalar,
)
from services.summation import KST1, KST2, ClosedFormShape, Mode, closed_form


logger = logging.getLogger(__name__)


class Theorem(str, Enum):
    T21 = "T21"
    T22 = "T22"
    T23 = "T23"
    T24 = "T24"
    C31 = "C31"
    C32 = "C32"
    B11 = "B11"
    B12 = "B12"


GENERAL = (Theorem.T21, Theorem.T22, Theorem.T23, Theorem.T24)
FIXED_I = (Theorem.C31, Theorem.C32, Theorem.B11, Theorem.B12)
BAILEY = (Theorem.B11, Theorem.B12)
MODE_SENSITIVE = (Theorem.T22, Theorem.T23, Theorem.C32)

# Second prefactor denominator Gamma(m/2 - rho/2 + i/2) as published.
T23_AS_PRINTED = KST1.model_copy(
    update={"name": "t23-as-printed", "g2": (Fraction(-1, 2), Fraction(1, 2))}
)


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    DOMAIN_ERROR = "domain_error"


def as_literal(value: Any) -> Any:
    if isinstance(value, str):
        return value.strip()
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}i"
    if isinstance(value, (int, float)):
        return repr(value)
    return value


class IdentityCase(BaseModel):
    """One identity instance. Scalars stay literal so a case can be re-evaluated at any precision."""

    model_config = ConfigDict(frozen=True)

    theorem: Theorem
    rho: str
    i: int = 0
    x: str
    delta: DeltaSequence = DeltaSequence()
    mode: Mode = Mode.CORRECTED

    @field_validator("rho", "x", mode="before")
    @classmethod
    def _as_literal(cls, value: Any) -> Any:
        return as_literal(value)

    @field_validator("delta", mode="before")
    @classmethod
    def _parse_delta(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_delta(value)
        return value

    @model_validator(mode="before")
    @classmethod
    def _pin_fixed_parameters(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        try:
            theorem = Theorem(data.get("theorem"))
        except ValueError:
            return data
        data = dict(data)
        if theorem in FIXED_I:
            data["i"] = 0
        if theorem in BAILEY:
            data["delta"] = DeltaSequence()
        return data

    @property
    def key(self) -> Tuple[str, str, int, str, str, str]:
        return (self.theorem.value, self.rho, self.i, self.x, self.delta.spec, self.mode.value)

    @property
    def label(self) -> str:
        return f"{self.theorem.value}(rho={self.rho}, i={self.i}, x={self.x}, delta={self.delta.spec}, {self.mode.value})"

    def conjugated(self) -> "IdentityCase":
        return self.model_copy(
            update={
                "rho": conjugate_text(self.rho),
                "x": conjugate_text(self.x),
                "delta": self.delta.conjugated(),
            }
        )

    def with_mode(self, mode: Mode) -> "IdentityCase":
        return self.model_copy(update={"mode": Mode(mode)})


class VerificationReport(BaseModel):
    """Both sides of one case, their agreement and the resulting verdict."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    case: IdentityCase
    digits: int
    verdict: Verdict
    lhs: Optional[Any] = None
    rhs: Optional[Any] = None
    abs_error: Optional[Any] = None
    rel_error: Optional[Any] = None
    lhs_tail: Optional[Any] = None
    rhs_tail: Optional[Any] = None
    terms_used_lhs: int = 0
    terms_used_rhs: int = 0
    lhs_terms: Tuple[Any, ...] = ()
    rhs_terms: Tuple[Any, ...] = ()
    other_mode_rel_error: Optional[Any] = None
    message: Optional[str] = None


def _rho_x(case: IdentityCase, ctx: PrecisionContext) -> Tuple[Scalar, Scalar]:
    return parse_scalar(case.rho, ctx), parse_scalar(case.x, ctx)


def _sigma(theorem: Theorem, rho: Scalar, i: int) -> Scalar:
    if theorem is Theorem.T21:
        return rho + i
    if theorem is Theorem.T22:
        return rho - i
    if theorem is Theorem.T23:
        return 2 - rho + i
    if theorem is Theorem.T24:
        return 2 - rho - i
    if theorem in (Theorem.C31, Theorem.B11):
        return rho
    return 2 - rho


def second_parameter(case: IdentityCase, ctx: PrecisionContext) -> Scalar:
    """sigma, the lower parameter attached to the alternating index n."""
    return _sigma(case.theorem, parse_scalar(case.rho, ctx), case.i)


def validate_case(case: IdentityCase, ctx: PrecisionContext) -> None:
    """Reject cases whose Pochhammer denominators vanish or whose Delta is unbounded."""
    if case.i < 0:
        raise DomainError(f"i must be a nonnegative integer, got {case.i}")
    rho, _ = _rho_x(case, ctx)
    case.delta.validate_bounded(ctx)
    for name, value in (("rho", rho), ("sigma", _sigma(case.theorem, rho, case.i))):
        pole = nearest_nonpositive_integer(value, ctx)
        if pole is not None:
            raise DomainError(f"{name} = {pole} makes a Pochhammer denominator vanish")


def _sum_terms(terms: Iterator[Scalar], ctx: PrecisionContext, label: str) -> SeriesResult:
    monitor = TailMonitor(ctx)
    total = ctx.mp.mpc(0)
    summed: List[Scalar] = []
    for term in terms:
        total += term
        summed.append(term)
        if monitor.push(abs(term), total):
            break
        if monitor.exhausted:
            raise DivergenceError(f"{label} did not converge within {ctx.max_terms} terms")
    tail = monitor.tail_estimate()
    logger.debug(f"{label}: {len(summed)} terms, tail {ctx.mp.nstr(tail, 5)}")
    return SeriesResult(value=total, terms_used=len(summed), tail_estimate=tail, terms=tuple(summed))


class _Weights:
    """sign^k / ((p)_k k!), extended on demand."""

    def __init__(self, p: Scalar, sign: int, ctx: PrecisionContext):
        self.p = p
        self.sign = sign
        self.values = [ctx.mp.mpc(1)]

    def __getitem__(self, k: int) -> Scalar:
        while len(self.values) <= k:
            n = len(self.values)
            self.values.append(self.values[-1] * self.sign / ((self.p + n - 1) * n))
        return self.values[k]


class _Powers:
    """Delta_N x^N, extended on demand."""

    def __init__(self, case: IdentityCase, x: Scalar, ctx: PrecisionContext):
        self.delta = case.delta.bind(ctx)
        self.x = x
        self.powers = [ctx.mp.mpc(1)]
        self.values: List[Scalar] = []

    def __getitem__(self, n: int) -> Scalar:
        while len(self.values) <= n:
            k = len(self.values)
            if len(self.powers) <= k:
                self.powers.append(self.powers[-1] * self.x)
            self.values.append(self.delta(k) * self.powers[k])
        return self.values[n]


def _diagonal_blocks(case: IdentityCase, ctx: PrecisionContext) -> Iterator[Scalar]:
    rho, x = _rho_x(case, ctx)
    u = _Weights(rho, 1, ctx)
    v = _Weights(_sigma(case.theorem, rho, case.i), -1, ctx)
    weights = _Powers(case, x, ctx)
    for big_n in count():
        block = ctx.mp.fsum(u[big_n - n] * v[n] for n in range(big_n + 1))
        yield weights[big_n] * block


def lhs_double_series(case: IdentityCase, ctx: PrecisionContext) -> SeriesResult:
    """The double series summed by diagonal blocks m + n = N."""
    validate_case(case, ctx)
    return _sum_terms(_diagonal_blocks(case, ctx), ctx, f"{case.theorem.value} left-hand side")


def rectangular_double_series(case: IdentityCase, ctx: PrecisionContext) -> SeriesResult:
    """The same double series summed over growing squares m, n < L.

    Each shell max(m, n) = L - 1 is added as a whole; the stopping rule watches
    the shell's absolute sum.
    """
    validate_case(case, ctx)
    rho, x = _rho_x(case, ctx)
    u = _Weights(rho, 1, ctx)
    v = _Weights(_sigma(case.theorem, rho, case.i), -1, ctx)
    weights = _Powers(case, x, ctx)

    monitor = TailMonitor(ctx)
    total = ctx.mp.mpc(0)
    shells: List[Scalar] = []
    for edge in count():
        cells = [(edge, n) for n in range(edge + 1)] + [(m, edge) for m in range(edge)]
        terms = [weights[m + n] * u[m] * v[n] for m, n in cells]
        shell = ctx.mp.fsum(terms)
        total += shell
        shells.append(shell)
        if monitor.push(ctx.mp.fsum(abs(t) for t in terms), total):
            break
        if monitor.exhausted:
            raise DivergenceError(f"rectangular sum did not converge within {ctx.max_terms} shells")
    return SeriesResult(
        value=total,
        terms_used=len(shells),
        tail_estimate=monitor.tail_estimate(),
        terms=tuple(shells),
    )


def diagonal_reindex_check(case: IdentityCase, ctx: PrecisionContext) -> bool:
    """True when diagonal and rectangular truncations agree within their tails."""
    diagonal = lhs_double_series(case, ctx)
    rectangular = rectangular_double_series(case, ctx)
    scale = 1 + max(abs(diagonal.value), abs(rectangular.value))
    allowance = diagonal.tail_estimate + rectangular.tail_estimate + 10 * ctx.epsilon * scale
    return abs(diagonal.value - rectangular.value) <= allowance


def _shape(theorem: Theorem, mode: Mode) -> ClosedFormShape:
    if theorem is Theorem.T21:
        return KST1
    if theorem is Theorem.T23:
        return KST1 if mode is Mode.CORRECTED else T23_AS_PRINTED
    return KST2


def _coefficient(theorem: Theorem, mode: Mode, rho: Scalar, i: int, m: int, ctx: PrecisionContext) -> Scalar:
    if theorem not in GENERAL:
        raise DomainError(f"{theorem.value} has no closed-form inner coefficient")
    if theorem in (Theorem.T21, Theorem.T22):
        a, b = -m, 1 - rho - m
    else:
        a, b = 1 - rho - m, -m
    value = closed_form(a, b, i, _shape(theorem, mode), ctx)
    # The published sign factor names no bound index; m is the only one in scope.
    if theorem is Theorem.T22 and mode is Mode.AS_PRINTED and m % 2:
        value = -value
    return value


def theorem_coefficient(case: IdentityCase, m: int, ctx: PrecisionContext) -> Scalar:
    """c_m from the closed form selected by the case's theorem and mode."""
    return _coefficient(case.theorem, case.mode, parse_scalar(case.rho, ctx), case.i, m, ctx)


def inner_coefficient(case: IdentityCase, m: int, ctx: PrecisionContext) -> Scalar:
    """c_m as the finite sum 2F1(-m, 1-rho-m; sigma; -1)."""
    rho = parse_scalar(case.rho, ctx)
    return f21_terminating(m, 1 - rho - m, _sigma(case.theorem, rho, case.i), ctx)


def rhs_theorem(case: IdentityCase, ctx: PrecisionContext) -> SeriesResult:
    """sum_m Delta_m x^m c_m / ((rho)_m m!)."""
    validate_case(case, ctx)
    if case.theorem not in GENERAL:
        raise DomainError(f"{case.theorem.value} is not one of the general theorems")
    rho, x = _rho_x(case, ctx)
    delta = case.delta.bind(ctx)

    def terms() -> Iterator[Scalar]:
        weight = ctx.mp.mpc(1)
        for m in count():
            yield delta(m) * weight * _coefficient(case.theorem, case.mode, rho, case.i, m, ctx)
            weight *= x / ((rho + m) * (m + 1))

    return _sum_terms(terms(), ctx, f"{case.theorem.value} right-hand side")


def _bound(delta: Any, ctx: PrecisionContext):
    if isinstance(delta, str):
        delta = parse_delta(delta)
    return delta.bind(ctx)


def rhs_corollary_31(rho: Any, x: Any, delta: Any, ctx: PrecisionContext) -> SeriesResult:
    """sum_m Delta_{2m} (-x^2/4)^m / ((rho)_m (rho/2)_m (rho/2+1/2)_m m!)."""
    rho, x = to_scalar(rho, ctx), to_scalar(x, ctx)
    bound = _bound(delta, ctx)
    half = ctx.mp.mpf(1) / 2
    y = -x * x / 4

    def terms() -> Iterator[Scalar]:
        weight = ctx.mp.mpc(1)
        for m in count():
            yield bound(2 * m) * weight
            weight *= y / ((rho + m) * (rho / 2 + m) * (rho / 2 + half + m) * (m + 1))

    return _sum_terms(terms(), ctx, "C31 right-hand side")


def rhs_corollary_32(rho: Any, x: Any, delta: Any, mode: Mode, ctx: PrecisionContext) -> SeriesResult:
    """Even part plus 2(1-rho)x/(rho(2-rho)) times the odd part.

    The odd part reads Delta_m as published and Delta_{2m+1} when corrected.
    """
    rho, x = to_scalar(rho, ctx), to_scalar(x, ctx)
    for excluded in (0, 2):
        if abs(rho - excluded) <= ctx.pole_tolerance:
            raise DomainError(f"rho = {excluded} makes the odd-part prefactor singular")
    bound = _bound(delta, ctx)
    corrected = Mode(mode) is Mode.CORRECTED
    half = ctx.mp.mpf(1) / 2
    y = -x * x / 4
    prefactor = 2 * (1 - rho) * x / (rho * (2 - rho))

    def terms() -> Iterator[Scalar]:
        even = ctx.mp.mpc(1)
        odd = ctx.mp.mpc(1)
        for m in count():
            yield bound(2 * m) * even + prefactor * bound(2 * m + 1 if corrected else m) * odd
            even *= y / ((half + m) * (rho / 2 + half + m) * (3 * half - rho / 2 + m) * (m + 1))
            odd *= y / ((3 * half + m) * (rho / 2 + 1 + m) * (2 - rho / 2 + m) * (m + 1))

    return _sum_terms(terms(), ctx, "C32 right-hand side")


def _composite(value: Scalar, tail: Any, parts: Tuple[SeriesResult, ...], ctx: PrecisionContext) -> SeriesResult:
    terminated = all(p.terminated for p in parts)
    return SeriesResult(
        value=value,
        terms_used=max(p.terms_used for p in parts),
        tail_estimate=ctx.mp.mpf(0) if terminated else tail,
        terminated=terminated,
    )


def _product(rho: Scalar, sigma: Scalar, x: Scalar, c: Scalar, ctx: PrecisionContext) -> SeriesResult:
    f = f01(rho, x, ctx)
    g = f01(sigma, -x, ctx)
    tail = abs(c) * (abs(g.value) * f.tail_estimate + abs(f.value) * g.tail_estimate)
    return _composite(c * f.value * g.value, tail, (f, g), ctx)


def product_oracle(case: IdentityCase, ctx: PrecisionContext) -> SeriesResult:
    """c 0F1(;rho;x) 0F1(;sigma;-x), the closed product for a constant Delta = c."""
    validate_case(case, ctx)
    if not case.delta.is_constant:
        raise DomainError(f"product oracle needs a constant sequence, got {case.delta.spec}")
    rho, x = _rho_x(case, ctx)
    return _product(rho, _sigma(case.theorem, rho, case.i), x, case.delta.bind(ctx)(0), ctx)


def _bailey_rhs(case: IdentityCase, ctx: PrecisionContext) -> SeriesResult:
    rho, x = _rho_x(case, ctx)
    half = ctx.mp.mpf(1) / 2
    y = -x * x / 4
    if case.theorem is Theorem.B11:
        return f03(rho, rho / 2, rho / 2 + half, y, ctx)
    first = f03(half, rho / 2 + half, 3 * half - rho / 2, y, ctx)
    second = f03(3 * half, rho / 2 + 1, 2 - rho / 2, y, ctx)
    prefactor = 2 * (1 - rho) * x / (rho * (2 - rho))
    tail = first.tail_estimate + abs(prefactor) * second.tail_estimate
    return _composite(first.value + prefactor * second.value, tail, (first, second), ctx)


def _lhs_for(case: IdentityCase, ctx: PrecisionContext) -> SeriesResult:
    if case.theorem in BAILEY:
        return product_oracle(case, ctx)
    return lhs_double_series(case, ctx)


def _rhs_for(case: IdentityCase, ctx: PrecisionContext) -> SeriesResult:
    if case.theorem in GENERAL:
        return rhs_theorem(case, ctx)
    if case.theorem is Theorem.C31:
        return rhs_corollary_31(case.rho, case.x, case.delta, ctx)
    if case.theorem is Theorem.C32:
        return rhs_corollary_32(case.rho, case.x, case.delta, case.mode, ctx)
    return _bailey_rhs(case, ctx)


def _other_mode_error(case: IdentityCase, lhs: SeriesResult, ctx: PrecisionContext) -> Optional[Any]:
    other = case.with_mode(Mode.CORRECTED if case.mode is Mode.AS_PRINTED else Mode.AS_PRINTED)
    try:
        rhs = _rhs_for(other, ctx)
    except HypercheckError as e:
        logger.debug(f"{other.label}: {e}")
        return None
    return mixed_error(lhs.value, rhs.value)


def _judge(case: IdentityCase, lhs: SeriesResult, rhs: SeriesResult, ctx: PrecisionContext) -> VerificationReport:
    tolerance = ctx.tolerance(15)
    scale = 1 + max(abs(lhs.value), abs(rhs.value))
    abs_error = abs(lhs.value - rhs.value)
    rel_error = abs_error / scale
    tails_small = max(lhs.tail_estimate, rhs.tail_estimate) <= tolerance / 10 * scale

    if not tails_small:
        verdict = Verdict.INCONCLUSIVE
    elif rel_error <= tolerance:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL

    other_error = None
    message = None
    if case.theorem in MODE_SENSITIVE:
        other_error = _other_mode_error(case, lhs, ctx)
        if other_error is not None and (other_error <= tolerance) != (rel_error <= tolerance):
            message = (
                f"modes disagree: {case.mode.value} rel_error {ctx.mp.nstr(rel_error, 5)}, "
                f"other mode rel_error {ctx.mp.nstr(other_error, 5)}"
            )
            logger.warning(f"{case.label}: {message}")

    return VerificationReport(
        case=case,
        digits=ctx.digits,
        verdict=verdict,
        lhs=lhs.value,
        rhs=rhs.value,
        abs_error=abs_error,
        rel_error=rel_error,
        lhs_tail=lhs.tail_estimate,
        rhs_tail=rhs.tail_estimate,
        terms_used_lhs=lhs.terms_used,
        terms_used_rhs=rhs.terms_used,
        lhs_terms=lhs.terms,
        rhs_terms=rhs.terms,
        other_mode_rel_error=other_error,
        message=message,
    )


def verify(case: IdentityCase, ctx: PrecisionContext) -> VerificationReport:
    """Evaluate both sides and classify their agreement.

    Library errors become verdicts: a domain violation is ``domain_error``, an
    uncancelled gamma pole is ``fail`` and a non-converging series is
    ``inconclusive``.
    """
    lhs: Optional[SeriesResult] = None
    try:
        validate_case(case, ctx)
        lhs = _lhs_for(case, ctx)
        rhs = _rhs_for(case, ctx)
    except DomainError as e:
        logger.warning(f"{case.label}: domain error: {e}")
        return VerificationReport(case=case, digits=ctx.digits, verdict=Verdict.DOMAIN_ERROR, message=str(e))
    except (PoleError, DivergenceError) as e:
        verdict = Verdict.FAIL if isinstance(e, PoleError) else Verdict.INCONCLUSIVE
        logger.warning(f"{case.label}: {verdict.value}: {e}")
        return VerificationReport(
            case=case,
            digits=ctx.digits,
            verdict=verdict,
            lhs=lhs.value if lhs is not None else None,
            lhs_tail=lhs.tail_estimate if lhs is not None else None,
            terms_used_lhs=lhs.terms_used if lhs is not None else 0,
            message=str(e),
        )

    report = _judge(case, lhs, rhs, ctx)
    logger.debug(f"{case.label}: {report.verdict.value}, rel_error {ctx.mp.nstr(report.rel_error, 5)}")
    return report


def bailey_product_check(rho: Any, x: Any, which: Theorem, ctx: PrecisionContext) -> VerificationReport:
    """Compare the 0F1 product with its 0F3 form."""
    which = Theorem(which)
    if which not in BAILEY:
        raise DomainError(f"{which.value} is not a product formula")
    return verify(IdentityCase(theorem=which, rho=rho, x=x), ctx)
