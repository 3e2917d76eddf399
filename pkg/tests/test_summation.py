import pytest
from hypothesis import assume, given, settings, strategies as st

from services.errors import DomainError, DomainPoleError, PoleError
from services.hyper_series import f21_terminating, hyp2f1_reference
from services.precision import approx_equal, mixed_error, to_scalar
from services.summation import (
    KST1,
    KST2,
    KST2_AS_PRINTED,
    KummerInput,
    Mode,
    closed_form,
    kummer_classical,
    kummer_general_minus,
    kummer_general_plus,
)


def off_integers(value: float, margin: float = 1e-3) -> bool:
    return abs(value - round(value)) > margin


def test_classical_quarter_pi(ctx):
    mp = ctx.mp
    value = kummer_classical(1, "1/2", ctx)
    assert approx_equal(value, mp.pi / 4, ctx.tolerance(5))
    assert approx_equal(value, hyp2f1_reference(1, "1/2", "3/2", -1, ctx), ctx.tolerance(5))


def test_classical_trivial_and_pole(ctx):
    assert approx_equal(kummer_classical(0, "0.37", ctx), 1, ctx.tolerance(5))
    with pytest.raises(PoleError) as info:
        kummer_classical(1, 2, ctx)
    assert info.value.factor == "Gamma(1+a-b)"


@given(
    a=st.floats(min_value=0.1, max_value=3.0, allow_nan=False),
    b=st.floats(min_value=-2.0, max_value=0.9, allow_nan=False),
)
@settings(max_examples=100, deadline=None)
def test_generalizations_reduce_to_classical(ctx, a, b):
    classical = kummer_classical(a, b, ctx)
    plus = kummer_general_plus(KummerInput(a=a, b=b, i=0), ctx)
    minus = kummer_general_minus(KummerInput(a=a, b=b, i=0), ctx)
    assert approx_equal(plus, classical, ctx.tolerance(10))
    assert approx_equal(minus, classical, ctx.tolerance(10))


def test_plus_against_reference(ctx):
    mp = ctx.mp
    value = kummer_general_plus(KummerInput(a=1, b="1/2", i=1), ctx)
    assert approx_equal(value, 3 * mp.pi / 4 - mp.mpf(3) / 2, ctx.tolerance(10))
    assert approx_equal(value, hyp2f1_reference(1, "1/2", "5/2", -1, ctx), ctx.tolerance(15))


def test_plus_terminating_with_integer_b(ctx):
    # 2F1(-4, -6; 5; -1) summed by hand
    value = kummer_general_plus(KummerInput(a=-4, b=-6, i=2), ctx)
    assert approx_equal(value, ctx.mp.mpf(9) / 70, ctx.tolerance(10))
    assert approx_equal(value, f21_terminating(4, -6, 5, ctx), ctx.tolerance(10))


def test_minus_corrected_against_reference(ctx):
    mp = ctx.mp
    reference = hyp2f1_reference(3, "1/2", "5/2", -1, ctx)
    corrected = kummer_general_minus(KummerInput(a=3, b="1/2", i=1), ctx)
    printed = kummer_general_minus(KummerInput(a=3, b="1/2", i=1, mode=Mode.AS_PRINTED), ctx)
    assert approx_equal(corrected, reference, ctx.tolerance(15))
    assert approx_equal(corrected, mp.mpf(3) / 16 * (2 + mp.pi / 2), ctx.tolerance(10))
    assert mixed_error(printed, reference) > mp.mpf("1e-6")


def test_minus_with_pole_in_lower_parameter(ctx):
    # c = 1 + a - b - i = -2, so the series itself is undefined
    with pytest.raises(PoleError):
        kummer_general_minus(KummerInput(a=-4, b=-2, i=1), ctx)
    with pytest.raises(DomainPoleError):
        f21_terminating(4, -2, -2, ctx)


def test_negative_shift_rejected(ctx):
    with pytest.raises(DomainError):
        closed_form(1, "0.5", -1, KST1, ctx)


@pytest.mark.parametrize("mode", [Mode.AS_PRINTED, Mode.CORRECTED])
def test_modes_agree_at_zero_shift(ctx, mode):
    value = kummer_general_minus(KummerInput(a="2.3", b="0.4", i=0, mode=mode), ctx)
    assert approx_equal(value, kummer_classical("2.3", "0.4", ctx), ctx.tolerance(10))


@pytest.mark.parametrize("i", [1, 2, 3, 4, 5])
def test_modes_disagree_for_positive_shift(ctx, i):
    corrected = closed_form("2.3", "0.4", i, KST2, ctx)
    printed = closed_form("2.3", "0.4", i, KST2_AS_PRINTED, ctx)
    assert not approx_equal(corrected, printed, "1e-6")


@given(
    m=st.integers(min_value=1, max_value=10),
    b=st.floats(min_value=-4.9, max_value=4.9, allow_nan=False),
    i=st.integers(min_value=0, max_value=5),
)
@settings(max_examples=200, deadline=None)
def test_terminating_oracle_plus(ctx, strict, m, b, i):
    assume(off_integers(b))
    a = -2 * m
    value = kummer_general_plus(KummerInput(a=a, b=b, i=i), ctx)
    bb = to_scalar(b, strict)
    truth = f21_terminating(2 * m, bb, 1 + a - bb + i, strict)
    assert mixed_error(truth, to_scalar(value, strict)) <= ctx.tolerance(10)


@given(
    m=st.integers(min_value=1, max_value=10),
    b=st.floats(min_value=-4.9, max_value=4.9, allow_nan=False),
    i=st.integers(min_value=0, max_value=5),
)
@settings(max_examples=200, deadline=None)
def test_terminating_oracle_minus(ctx, strict, m, b, i):
    assume(off_integers(b))
    a = -2 * m
    value = kummer_general_minus(KummerInput(a=a, b=b, i=i), ctx)
    bb = to_scalar(b, strict)
    truth = f21_terminating(2 * m, bb, 1 + a - bb - i, strict)
    assert mixed_error(truth, to_scalar(value, strict)) <= ctx.tolerance(10)


@pytest.mark.parametrize("i", [0, 1, 2, 3, 4, 5])
def test_convergent_oracle(ctx, i):
    a, b = ctx.mp.mpf("0.7"), ctx.mp.mpf("0.3")
    plus = closed_form(a, b, i, KST1, ctx)
    minus = closed_form(a, b, i, KST2, ctx)
    assert approx_equal(plus, hyp2f1_reference(a, b, KST1.lower_parameter(a, b, i), -1, ctx), ctx.tolerance(15))
    assert approx_equal(minus, hyp2f1_reference(a, b, KST2.lower_parameter(a, b, i), -1, ctx), ctx.tolerance(15))
