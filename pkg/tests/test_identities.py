import time

import pytest

from identities import (
    COROLLARY_IDS, IDENTITY_IDS, MAIN_IDS, STARRED_IDS, compare, error_record, eval_appell_form, eval_double_sum,
    eval_form, eval_hecke_form, identity_entry, limit_sides, starred_parts, verify_identity,
)
from qseries_types import STATUS_EQUAL, STATUS_ERROR, STATUS_MISMATCH, NonConvergent, UnknownIdentityId
from series_core import ONE, QSeries, series_eq_upto

N = 12


def test_catalog_ids():
    assert len(MAIN_IDS) == 23
    assert set(COROLLARY_IDS) <= set(IDENTITY_IDS)
    assert set(STARRED_IDS) == {"W2", "M2", "M8", "M15"}


def test_unknown_identity():
    with pytest.raises(UnknownIdentityId, match="unknown id: M99"):
        identity_entry("M99")
    with pytest.raises(UnknownIdentityId):
        eval_form("M5", "bogus_form", N)


def test_forms_list_starts_with_the_double_sum():
    assert identity_entry("M5").forms == ["double_sum", "hecke_form", "appell_form"]
    assert identity_entry("C8b").forms == ["double_sum", "classical_form"]


def test_hickerson_mortenson_parameters():
    assert not identity_entry("W1").hm_spec.generic
    spec = identity_entry("M2").hm_spec
    assert (spec.n, spec.p) == (1, 2)
    assert spec.generic


@pytest.mark.parametrize("identity_id", MAIN_IDS + COROLLARY_IDS)
def test_all_forms_agree(identity_id):
    records = verify_identity(identity_id, N)
    assert records
    assert all(record.status == STATUS_EQUAL for record in records), [r.to_dict() for r in records]


def test_m5_double_sum_is_one_plus_q_omega():
    expected = QSeries({0: 1, 1: 1, 2: 2, 3: 3}, 2)
    assert series_eq_upto(eval_double_sum("M5", 2), expected, 2).equal


@pytest.mark.parametrize("identity_id", STARRED_IDS)
def test_starred_sums_have_distinct_even_and_odd_limits(identity_id):
    parts = starred_parts(identity_id, N)
    assert not series_eq_upto(parts.even, parts.odd, N).equal


def test_starred_parts_needs_a_starred_sum():
    with pytest.raises(UnknownIdentityId):
        starred_parts("M5", N)


@pytest.mark.parametrize("identity_id", ["M5", "M1", "W2"])
def test_limit_sides_match_double_sum_and_hecke_form(identity_id):
    lhs, rhs = limit_sides(identity_id, N)
    assert series_eq_upto(lhs, eval_form(identity_id, "double_sum", N), N).equal
    assert series_eq_upto(rhs, eval_form(identity_id, "hecke_form", N), N).equal


def test_small_row_cap_is_reported():
    with pytest.raises(NonConvergent):
        eval_double_sum("M4", 30, row_cap=2)


def test_compare_builds_records():
    started = time.perf_counter()
    equal = compare("X", "a=b", ONE, ONE, 5, started)
    assert equal.status == STATUS_EQUAL
    assert equal.first_mismatch is None

    mismatch = compare("X", "a=b", ONE, QSeries({0: 1, 2: 3}), 5, started)
    assert mismatch.status == STATUS_MISMATCH
    assert mismatch.first_mismatch.exponent == 2
    assert (mismatch.first_mismatch.left, mismatch.first_mismatch.right) == (0, 3)

    error = error_record("X", "a=b", 5, UnknownIdentityId("unknown id: X"), started)
    assert error.status == STATUS_ERROR
    assert error.detail == "UnknownIdentityId: unknown id: X"


@pytest.mark.parametrize("identity_id", ["M3", "M5", "M7"])
def test_hecke_and_appell_forms_match_double_sum(identity_id):
    entry = identity_entry(identity_id)
    double_sum = eval_double_sum(identity_id, N)
    if entry.hecke_form is not None:
        assert series_eq_upto(eval_hecke_form(identity_id, N), double_sum, N).equal
    if entry.appell_form is not None:
        assert series_eq_upto(eval_appell_form(identity_id, N), double_sum, N).equal
