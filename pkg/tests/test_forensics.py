import pytest

from services.delta import parse_delta
from services.forensics_service import DEFAULT_PROBES, ForensicsService, Misprint, adjudicate
from services.precision import make_context


@pytest.fixture(scope="module")
def default_rows(ctx):
    return ForensicsService().run(ctx)


def test_default_run_names_the_corrected_mode(default_rows):
    assert [row.probe.name for row in default_rows] == [Misprint.KST2, Misprint.T22, Misprint.T23, Misprint.C32]
    assert all(row.verdict == "corrected" for row in default_rows)


def test_rows_carry_both_errors(ctx, default_rows):
    for row in default_rows:
        assert row.digits == ctx.digits
        assert row.corrected_rel_error <= ctx.tolerance(20)
        assert row.as_printed_rel_error > ctx.mp.mpf("1e-6")
        assert row.message is None


def test_only_filter(ctx):
    rows = ForensicsService().run(ctx, only=[Misprint.T23])
    assert len(rows) == 1
    assert rows[0].probe.name is Misprint.T23


def test_constant_sequence_cannot_separate_corollary_modes(ctx):
    rows = ForensicsService().run(ctx, only=[Misprint.C32], delta=parse_delta("const:1"))
    assert rows[0].verdict == "inconclusive"
    assert rows[0].as_printed == rows[0].corrected


def test_delta_override_leaves_kummer_probe_alone():
    probe = DEFAULT_PROBES[0]
    assert probe.with_delta(parse_delta("harmonic")) is probe


def test_low_precision_match_threshold_is_too_loose():
    # at 20 digits the match threshold is 1, so the as-printed value also "matches"
    row = adjudicate(DEFAULT_PROBES[0], make_context(20))
    assert row.verdict == "inconclusive"
