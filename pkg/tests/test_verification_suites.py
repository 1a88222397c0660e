import pytest

from qseries_types import STATUS_EQUAL, STATUS_ERROR, InvalidSpec, UnknownIdentityId, UnknownPairId
from series_core import render_series, series_eq_upto
from verification_suites import (
    CHAINS, LAW_IDS, VERIFY_SETS, Check, chain_checks, derive_checks, execute_check, expand_target, hm_checks,
    _littlefact2_sides, identity_checks, law_checks, pair_checks, transform_checks, verify_checks,
)
from identities import MAIN_IDS, eval_form

ORDER = 12
N_MAX = 3


def statuses(records):
    return {(record.id, record.label): record.status for record in records}


def assert_all_equal(records):
    assert records
    failing = [record.to_dict() for record in records if record.status != STATUS_EQUAL]
    assert not failing, failing


def test_pair_check_produces_relation_and_inversion_records():
    records = execute_check(Check("pair", "bk", "pair", ORDER, N_MAX))
    assert set(statuses(records)) == {("bk", "pair_relation"), ("bk", "alpha_from_beta")}
    assert_all_equal(records)


def test_unknown_suite_becomes_error_record():
    [record] = execute_check(Check("nosuch", "x", "label", ORDER))
    assert record.status == STATUS_ERROR
    assert record.detail == "InvalidSpec: unknown suite 'nosuch'"


def test_failing_check_becomes_error_record():
    [record] = execute_check(Check("pair", "nope", "pair", ORDER, N_MAX))
    assert record.status == STATUS_ERROR
    assert record.detail.startswith("UnknownPairId")


def test_pair_checks_validate_ids():
    assert len(pair_checks(ORDER, N_MAX)) == 24
    with pytest.raises(UnknownPairId):
        pair_checks(ORDER, N_MAX, ["bk", "nope"])


def test_transform_grid_skips_non_generic_steps():
    checks = transform_checks(ORDER, N_MAX)
    labels = {(check.item_id, check.label) for check in checks}
    assert ("unit", "step(q,inf) pair_relation") not in labels
    assert ("bk_q", "step(q,inf) pair_relation") in labels
    assert ("cor1", "step(-1,inf)=d1") in labels
    assert len([c for c in checks if c.param("op") == "composition"]) == 4


@pytest.mark.parametrize("check", transform_checks(ORDER, N_MAX), ids=lambda c: f"{c.item_id}:{c.label}")
def test_transform_checks_pass(check):
    assert_all_equal(execute_check(check))


@pytest.mark.parametrize("check", chain_checks(ORDER, N_MAX), ids=lambda c: c.item_id)
def test_chain_checks_pass(check):
    assert_all_equal(execute_check(check))


def test_derive_chains():
    assert [c.item_id for c in derive_checks("bk-to-andrews", ORDER, N_MAX)] == ["andrews1", "andrews2", "andrews0"]
    assert len(derive_checks("slater-to-corollaries", ORDER, N_MAX)) == 6
    assert set(CHAINS) == {"bk-to-andrews", "slater-to-corollaries"}
    with pytest.raises(InvalidSpec, match="unknown chain: sideways"):
        derive_checks("sideways", ORDER, N_MAX)


def test_identity_checks_use_heavy_order():
    [check] = [c for c in identity_checks(40, 25, ["M6"]) if c.suite == "identity"]
    assert check.order == 25
    [light] = [c for c in identity_checks(40, 25, ["M5"]) if c.suite == "identity"]
    assert light.order == 40


def test_identity_checks_for_starred_entries():
    suites = {c.suite for c in identity_checks(ORDER, ORDER, ["W2"])}
    assert suites == {"identity", "starred", "cross_path"}


def test_identity_checks_reject_unknown_ids():
    with pytest.raises(UnknownIdentityId):
        identity_checks(ORDER, ORDER, ["M99"])


@pytest.mark.parametrize("identity_id", ["W2", "M2"])
def test_starred_check(identity_id):
    records = execute_check(Check("starred", identity_id, "starred", ORDER))
    assert {r.label for r in records} == {"even!=odd", "average=hecke_form", "average=appell_form"}
    assert_all_equal(records)
    [split] = [r for r in records if r.label == "even!=odd"]
    assert split.detail.startswith("first difference at q^")


@pytest.mark.parametrize("identity_id", ["M5", "M9"])
def test_cross_path_check(identity_id):
    assert_all_equal(execute_check(Check("cross_path", identity_id, "limit", ORDER)))


@pytest.mark.parametrize("name", ["T0", "omega", "A", "U1"])
def test_classical_check(name):
    assert_all_equal(execute_check(Check("classical", name, "sum=appell_form", ORDER)))


def test_hm_checks_skip_non_generic_specs_by_default():
    ids = {check.item_id for check in hm_checks(40)}
    assert not ids & {"W1", "W2", "W3", "W4"}
    assert ids <= set(MAIN_IDS)
    assert all(check.order <= 30 for check in hm_checks(40) if "p=4" in check.label)


def test_hm_check_on_non_generic_spec_is_an_error():
    [check] = hm_checks(ORDER, ["W1"])
    [record] = execute_check(check)
    assert record.status == STATUS_ERROR


@pytest.mark.parametrize("identity_id", ["M2", "M5", "M6", "M8"])
def test_hm_check_passes(identity_id):
    [check] = hm_checks(ORDER, [identity_id])
    assert_all_equal(execute_check(check))


@pytest.mark.parametrize("check", law_checks(ORDER, N_MAX), ids=lambda c: c.item_id)
def test_function_laws(check):
    assert_all_equal(execute_check(check))


def test_law_ids_cover_every_family():
    assert {"m1", "m2", "m3", "mprod", "j1", "j2", "theta_product", "littlefact1", "littlefact2",
            "chu_vandermonde", "heine"} == set(LAW_IDS)


def test_verify_sets():
    assert VERIFY_SETS == ("pairs", "transforms", "identities", "hm", "props", "all")
    everything = verify_checks("all", ORDER, N_MAX, ORDER)
    suites = {check.suite for check in everything}
    assert suites == {"pair", "transform", "chain", "identity", "classical", "starred", "cross_path", "hm", "law"}
    assert {c.item_id for c in verify_checks("identities", ORDER, N_MAX, ORDER, ["M5"])} == {"M5"}
    with pytest.raises(InvalidSpec):
        verify_checks("everything", ORDER, N_MAX, ORDER)


def test_expand_targets():
    assert render_series(expand_target("omega", 3)) == "1 + 2*q + 3*q^2 + 4*q^3"
    assert series_eq_upto(expand_target("M5", ORDER), eval_form("M5", "double_sum", ORDER), ORDER).equal
    assert series_eq_upto(expand_target("M5.appell_form", ORDER), expand_target("M5", ORDER), ORDER).equal
    assert expand_target("bk.beta.0", ORDER).is_zero
    assert series_eq_upto(expand_target("J1", ORDER), expand_target("J1,3", ORDER), ORDER).equal


@pytest.mark.parametrize("target", ["nothing", "bk.gamma.1", "bk.beta.x", "M5.bogus"])
def test_expand_unknown_targets(target):
    with pytest.raises(UnknownIdentityId, match="unknown id"):
        expand_target(target, ORDER)


@pytest.mark.parametrize("n", range(4))
def test_littlefact2_with_r_zero(n):
    left, right = _littlefact2_sides(n, 0, ORDER)
    assert series_eq_upto(left, right, ORDER).equal
