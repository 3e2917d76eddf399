import itertools

import pytest
from hypothesis import given, settings, strategies as st

from services import identity_engine
from services.delta import parse_delta
from services.errors import DivergenceError, DomainError, PoleError
from services.identity_engine import (
    GENERAL,
    as_literal,
    IdentityCase,
    Theorem,
    Verdict,
    bailey_product_check,
    diagonal_reindex_check,
    inner_coefficient,
    lhs_double_series,
    product_oracle,
    rectangular_double_series,
    rhs_corollary_31,
    rhs_corollary_32,
    rhs_theorem,
    second_parameter,
    theorem_coefficient,
    validate_case,
    verify,
)
from services.precision import approx_equal
from services.summation import Mode

BAILEY_VALUE = "0.833730025131149"


def case(theorem="T21", rho="0.5", i=0, x="0.25", delta="const:1", mode=Mode.CORRECTED):
    return IdentityCase(theorem=theorem, rho=rho, i=i, x=x, delta=delta, mode=mode)


def test_bailey_reduction_value(ctx):
    mp = ctx.mp
    report = verify(case(), ctx)
    assert report.verdict is Verdict.PASS
    assert report.rel_error < mp.mpf("1e-35")
    assert approx_equal(report.lhs, mp.cosh(1) * mp.cos(1), ctx.tolerance(15))
    assert mp.nstr(report.lhs.real, 15) == BAILEY_VALUE
    corollary = rhs_corollary_31("0.5", "0.25", "const:1", ctx)
    assert approx_equal(corollary.value, report.rhs, ctx.tolerance(15))


def test_fixed_theorems_pin_shift_and_sequence():
    pinned = IdentityCase(theorem="B11", rho="0.5", i=3, x="0.25", delta="geom:1/2")
    assert pinned.i == 0
    assert pinned.delta.is_constant
    assert IdentityCase(theorem="C31", rho="0.5", i=2, x="1").i == 0


def test_case_literals_are_normalized():
    built = IdentityCase(theorem="T21", rho=0.5, i=1, x=" 1/4 ")
    assert built.rho == "0.5"
    assert built.x == "1/4"
    assert built.key == ("T21", "0.5", 1, "1/4", "const:1", "corrected")


def test_second_parameter(ctx):
    mp = ctx.mp
    expected = {"T21": "4.3", "T22": "-1.7", "T23": "3.7", "T24": "-2.3", "C31": "1.3", "C32": "0.7"}
    for theorem, sigma in expected.items():
        value = second_parameter(case(theorem=theorem, rho="1.3", i=3), ctx)
        assert approx_equal(value, mp.mpf(sigma), ctx.tolerance(5)), theorem


@pytest.mark.parametrize(
    "broken",
    [
        case(rho="-1"),
        case(rho="0"),
        case(theorem="T22", rho="2", i=2),
        case(theorem="T24", rho="0.5", i=2, delta="geom:2"),
    ],
)
def test_validate_case_rejects(ctx, broken):
    with pytest.raises(DomainError):
        validate_case(broken, ctx)


def test_domain_error_verdict(ctx):
    report = verify(case(rho="-1"), ctx)
    assert report.verdict is Verdict.DOMAIN_ERROR
    assert report.lhs is None
    assert report.rel_error is None
    assert "rho" in report.message


@pytest.mark.parametrize("theorem", [*GENERAL, Theorem.C31, Theorem.C32])
def test_degenerate_table_sequence(ctx, theorem):
    only_first = case(theorem=theorem, rho="1.3", i=2, x="0.5", delta="table:1;0")
    lhs = lhs_double_series(only_first, ctx)
    assert lhs.value == 1
    assert lhs.tail_estimate == 0
    report = verify(only_first, ctx)
    assert report.verdict is Verdict.PASS
    assert approx_equal(report.rhs, 1, ctx.tolerance(10))


def test_lhs_matches_product_for_constant_sequence(ctx):
    for theorem in GENERAL:
        instance = case(theorem=theorem, rho="1.3", i=2, x="0.5", delta="const:2")
        lhs = lhs_double_series(instance, ctx)
        product = product_oracle(instance, ctx)
        assert approx_equal(lhs.value, product.value, ctx.tolerance(15))


def test_product_oracle_needs_constant_sequence(ctx):
    with pytest.raises(DomainError):
        product_oracle(case(delta="harmonic"), ctx)


def test_lhs_self_oracle_at_higher_precision(ctx):
    instance = case(rho="1.3", i=2, x="0.5")
    value = lhs_double_series(instance, ctx).value
    stricter = lhs_double_series(instance, ctx.escalate()).value
    assert approx_equal(value, stricter, ctx.tolerance(15))


@pytest.mark.parametrize(
    "instance",
    [
        case(rho="0.5", x="0.25"),
        case(rho="2.5", i=1, x="1", delta="geom:0.9"),
        case(theorem="T24", rho="0.7", i=1, x="-2", delta="harmonic"),
        case(rho="1.3", x="0"),
    ],
)
def test_diagonal_and_rectangular_sums_agree(ctx, instance):
    assert diagonal_reindex_check(instance, ctx)


def test_zero_argument_sums_to_first_sequence_term(ctx):
    instance = case(rho="1.3", x="0", delta="const:3")
    assert lhs_double_series(instance, ctx).value == 3
    assert rectangular_double_series(instance, ctx).value == 3


@pytest.mark.parametrize("theorem", GENERAL)
@pytest.mark.parametrize("i", [0, 1, 3])
def test_closed_form_coefficient_matches_finite_sum(ctx, theorem, i):
    instance = case(theorem=theorem, rho="1.3", i=i)
    for m in range(9):
        closed = theorem_coefficient(instance, m, ctx)
        finite = inner_coefficient(instance, m, ctx)
        assert approx_equal(closed, finite, ctx.tolerance(15)), m


def test_stray_sign_as_printed(ctx):
    corrected = case(theorem="T22", rho="1.3", i=1)
    printed = corrected.with_mode(Mode.AS_PRINTED)
    for m in range(6):
        expected = theorem_coefficient(corrected, m, ctx) * (-1) ** m
        assert theorem_coefficient(printed, m, ctx) == expected


def test_gamma_offset_as_printed_differs(ctx):
    corrected = case(theorem="T23", rho="0.7", i=1)
    printed = corrected.with_mode(Mode.AS_PRINTED)
    assert not approx_equal(theorem_coefficient(printed, 2, ctx), theorem_coefficient(corrected, 2, ctx), "1e-6")


def test_odd_coefficients_vanish_without_shift(ctx):
    instance = case(rho="1.3", i=0)
    for m in (1, 3, 5, 7):
        assert theorem_coefficient(instance, m, ctx) == 0


@given(
    rho=st.floats(min_value=0.2, max_value=3.0),
    x=st.floats(min_value=-2.0, max_value=2.0),
    delta=st.sampled_from(["const:1", "geom:1/2", "harmonic", "table:1,2,3,4;0", "2*geom:-0.5"]),
)
@settings(max_examples=20, deadline=None)
def test_first_corollary_is_the_even_part_of_the_first_theorem(ctx, rho, x, delta):
    general = rhs_theorem(case(rho=rho, x=x, delta=delta), ctx)
    corollary = rhs_corollary_31(as_literal(rho), as_literal(x), delta, ctx)
    for k in range(min(len(corollary.terms), len(general.terms) // 2)):
        assert approx_equal(general.terms[2 * k], corollary.terms[k], ctx.tolerance(10))
        assert general.terms[2 * k + 1] == 0
    assert approx_equal(general.value, corollary.value, ctx.tolerance(15))


@pytest.mark.parametrize("delta", ["const:1", "geom:1/2", "harmonic"])
def test_first_corollary_against_lhs(ctx, delta):
    instance = case(theorem="C31", rho="0.7", x="0.3", delta=delta)
    assert verify(instance, ctx).verdict is Verdict.PASS


def test_second_corollary_sequence_index(ctx):
    strict = ctx.escalate()
    lhs = lhs_double_series(case(theorem="C32", rho="0.7", x="0.3", delta="geom:0.5"), strict).value
    corrected = rhs_corollary_32("0.7", "0.3", "geom:0.5", Mode.CORRECTED, ctx).value
    printed = rhs_corollary_32("0.7", "0.3", "geom:0.5", Mode.AS_PRINTED, ctx).value
    assert approx_equal(lhs, corrected, ctx.tolerance(15))
    assert not approx_equal(lhs, printed, "1e-6")


def test_second_corollary_modes_coincide_for_constant_sequence(ctx):
    corrected = rhs_corollary_32("0.7", "0.3", "const:1", Mode.CORRECTED, ctx).value
    printed = rhs_corollary_32("0.7", "0.3", "const:1", Mode.AS_PRINTED, ctx).value
    assert corrected == printed


@pytest.mark.parametrize("rho", ["0", "2"])
def test_second_corollary_singular_prefactor(ctx, rho):
    with pytest.raises(DomainError):
        rhs_corollary_32(rho, "0.3", "const:1", Mode.CORRECTED, ctx)


@pytest.mark.parametrize(
    "rho, x, which",
    [("1/2", "0.25", Theorem.B11), ("3/2", "1", Theorem.B11), ("1", "0.5", Theorem.B12), ("0.7", "-2", Theorem.B12)],
)
def test_bailey_products(ctx, rho, x, which):
    report = bailey_product_check(rho, x, which, ctx)
    assert report.verdict is Verdict.PASS


def test_bailey_value(ctx):
    report = bailey_product_check("1/2", "0.25", Theorem.B11, ctx)
    assert approx_equal(report.rhs, ctx.mp.cosh(1) * ctx.mp.cos(1), ctx.tolerance(15))


def test_bailey_check_rejects_other_theorems(ctx):
    with pytest.raises(DomainError):
        bailey_product_check("1/2", "0.25", Theorem.T21, ctx)


def test_stray_sign_fails_with_mode_diagnostic(ctx):
    printed = case(theorem="T22", rho="1.3", i=1, x="0.5", delta="harmonic", mode=Mode.AS_PRINTED)
    report = verify(printed, ctx)
    assert report.verdict is Verdict.FAIL
    assert report.other_mode_rel_error <= ctx.tolerance(15)
    assert "modes disagree" in report.message
    assert verify(printed.with_mode(Mode.CORRECTED), ctx).verdict is Verdict.PASS


def test_pole_maps_to_fail(ctx, monkeypatch):
    def broken(case, ctx):
        raise PoleError(-2, "Gamma(1+a-b-i)")

    monkeypatch.setattr(identity_engine, "_rhs_for", broken)
    report = verify(case(), ctx)
    assert report.verdict is Verdict.FAIL
    assert report.lhs is not None
    assert report.rhs is None
    assert "Gamma(1+a-b-i)" in report.message


def test_divergence_maps_to_inconclusive(ctx, monkeypatch):
    def stuck(case, ctx):
        raise DivergenceError("no convergence")

    monkeypatch.setattr(identity_engine, "_lhs_for", stuck)
    report = verify(case(), ctx)
    assert report.verdict is Verdict.INCONCLUSIVE
    assert report.lhs is None


@given(
    re_rho=st.floats(min_value=0.2, max_value=3.0),
    im_rho=st.floats(min_value=-1.0, max_value=1.0),
    re_x=st.floats(min_value=-1.5, max_value=1.5),
    im_x=st.floats(min_value=-1.5, max_value=1.5),
    i=st.integers(min_value=0, max_value=3),
)
@settings(max_examples=50, deadline=None)
def test_conjugation_symmetry(ctx, re_rho, im_rho, re_x, im_x, i):
    instance = IdentityCase(
        theorem="T21", rho=complex(re_rho, im_rho), i=i, x=complex(re_x, im_x), delta="1-1i*geom:0.5i"
    )
    for side in (lhs_double_series, rhs_theorem):
        value = side(instance, ctx).value
        mirrored = side(instance.conjugated(), ctx).value
        assert approx_equal(mirrored, value.conjugate(), ctx.tolerance(15))


@pytest.mark.parametrize("factor", ["2", "-1/3", "1+1i"])
def test_linearity_in_sequence(ctx, factor):
    base = case(theorem="T23", rho="0.7", i=1, x="0.5", delta="harmonic")
    scaled = base.model_copy(update={"delta": base.delta.scaled(factor)})
    ratio = parse_delta(f"{factor}*const:1").bind(ctx)(0)
    assert approx_equal(lhs_double_series(scaled, ctx).value, ratio * lhs_double_series(base, ctx).value, ctx.tolerance(15))
    assert approx_equal(rhs_theorem(scaled, ctx).value, ratio * rhs_theorem(base, ctx).value, ctx.tolerance(15))


def gate_cases(theorems, shifts, rhos, xs, deltas):
    for theorem, i, rho, x, delta in itertools.product(theorems, shifts, rhos, xs, deltas):
        yield case(theorem=theorem, rho=rho, i=i, x=x, delta=delta)


@pytest.mark.parametrize(
    "instance",
    list(gate_cases(GENERAL, [0, 2], ["0.7", "2.6"], ["0.5", "-2", "1+0.5i"], ["const:1", "harmonic"])),
    ids=lambda c: c.label,
)
def test_oracle_gate_slice(ctx, instance):
    report = verify(instance, ctx)
    assert report.verdict is Verdict.PASS, report.message


@pytest.mark.slow
@pytest.mark.parametrize(
    "instance",
    list(
        gate_cases(
            GENERAL,
            range(6),
            ["0.3", "0.7", "1.3", "2.6"],
            ["0.5", "-0.5", "2", "-2", "1+0.5i"],
            ["const:1", "geom:1/2", "harmonic"],
        )
    ),
    ids=lambda c: c.label,
)
def test_oracle_gate_full(ctx, instance):
    report = verify(instance, ctx)
    assert report.verdict is Verdict.PASS, report.message
