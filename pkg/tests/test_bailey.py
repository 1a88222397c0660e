from fractions import Fraction

import pytest

from bailey import (
    INF, PAIR_IDS, SQRT, LemmaWeights, PairBase, RhoParam, SequenceMismatch, base_change, bailey_step,
    catalog_pair, change_of_base_beta_closed_form, compare_pairs, convergent_sum, dilate_pair, limit_identity,
    make_pair, pair_alpha_from_beta, pair_beta_from_alpha, scale_pair, starred_sum, thm_main1, thm_main1_inverse, thm_main2,
    thm_main3, verify_pair,
)
from qproducts import ThetaArg, poch_infinite
from qseries_types import (
    InvalidSpec, NonConvergent, NonGenericRho, PreconditionFailed, StabilizationFailure, UnknownPairId,
)
from series_core import ONE, QSeries, constant, monomial, series_add, series_eq_upto, series_invert, zero

N = 16
N_MAX = 4


@pytest.mark.parametrize("pair_id", PAIR_IDS)
def test_catalog_pairs_satisfy_the_pair_relation(pair_id):
    n_max, order = (3, 12) if pair_id.endswith("_step") else (N_MAX, N)
    assert verify_pair(catalog_pair(pair_id), n_max, order).equal


@pytest.mark.parametrize("pair_id", ["unit", "slater1", "bk", "bk_q", "andrews2"])
def test_alpha_is_recovered_from_beta(pair_id):
    pair = catalog_pair(pair_id)
    recovered = pair_alpha_from_beta(pair.beta, pair.base, N_MAX, N, pair.step)
    for n, value in enumerate(recovered):
        assert series_eq_upto(value, pair.alpha(n, N), N).equal


def test_unknown_pair_id():
    with pytest.raises(UnknownPairId, match="unknown id: nope"):
        catalog_pair("nope")


def test_broken_pair_is_reported_with_index():
    unit = catalog_pair("unit")
    broken = make_pair(PairBase.ONE, unit.alpha, lambda n, order: ONE if n < 2 else zero(order), "broken")
    report = verify_pair(broken, N_MAX, N)
    assert isinstance(report, SequenceMismatch)
    assert report.component == "beta"
    assert report.index == 1


def test_slater_seed_gives_the_bk_pairs():
    seed = catalog_pair("slater0")
    assert compare_pairs(thm_main1(seed), catalog_pair("bk"), N_MAX, N).equal
    assert compare_pairs(thm_main3(seed), catalog_pair("bk_q"), N_MAX, N).equal


@pytest.mark.parametrize("seed,first,third", [
    ("slater1", "cor1", "cor1q"),
    ("slater2", "cor2", "cor2q"),
    ("slater3", "cor3", "cor3q"),
])
def test_corollary_pairs_come_from_slater_seeds(seed, first, third):
    pair = catalog_pair(seed)
    assert compare_pairs(thm_main1(pair), catalog_pair(first), N_MAX, N).equal
    assert compare_pairs(thm_main3(pair), catalog_pair(third), N_MAX, N).equal


def test_composition_and_round_trip():
    seed = catalog_pair("slater1")
    assert compare_pairs(thm_main3(seed), thm_main2(thm_main1(seed)), N_MAX, N).equal
    assert compare_pairs(thm_main1_inverse(thm_main1(seed)), seed, N_MAX, N).equal


def test_change_of_base_chain():
    andrews1 = catalog_pair("andrews1")
    changed = scale_pair(base_change(catalog_pair("bk")), -2)
    assert compare_pairs(changed, dilate_pair(andrews1, 2), N_MAX, N).equal
    assert compare_pairs(thm_main2(scale_pair(andrews1, -1)), catalog_pair("andrews2"), N_MAX, N).equal
    assert compare_pairs(thm_main1_inverse(scale_pair(andrews1, -1)), catalog_pair("andrews0"), N_MAX, N).equal


def test_change_of_base_beta_closed_form():
    changed = base_change(catalog_pair("bk"))
    for n in range(N_MAX + 1):
        assert series_eq_upto(changed.beta(n, N), change_of_base_beta_closed_form(n, N), N).equal


def test_theorem_preconditions():
    with pytest.raises(PreconditionFailed):
        thm_main1(catalog_pair("cor1"))
    with pytest.raises(PreconditionFailed):
        thm_main2(catalog_pair("bk_q"))
    with pytest.raises(PreconditionFailed):
        thm_main1_inverse(catalog_pair("slater1"))


def test_compare_pairs_needs_matching_bases():
    with pytest.raises(InvalidSpec):
        compare_pairs(catalog_pair("bk"), catalog_pair("bk_q"), N_MAX, N)


def test_dilated_pair_keeps_the_pair_relation():
    pair = dilate_pair(catalog_pair("slater1"), 2)
    assert pair.step == 2
    assert verify_pair(pair, N_MAX, N).equal


def test_scaled_pair_keeps_the_pair_relation():
    assert verify_pair(scale_pair(catalog_pair("bk"), Fraction(-1, 3)), N_MAX, N).equal


@pytest.mark.parametrize("rho1,rho2", [
    (INF, INF),
    (RhoParam.finite(ThetaArg(-1, 0)), INF),
    (RhoParam.finite(ThetaArg(-1, 1)), RhoParam.finite(ThetaArg(-1, 0))),
    (SQRT, SQRT),
])
def test_bailey_lemma_output_is_a_pair(rho1, rho2):
    assert verify_pair(bailey_step(catalog_pair("unit"), rho1, rho2), 3, 12).equal


def test_non_generic_rho_is_rejected():
    with pytest.raises(NonGenericRho):
        LemmaWeights(0, 1, RhoParam.finite(ThetaArg(1, 1)), INF)
    with pytest.raises(InvalidSpec):
        LemmaWeights(0, 1, SQRT, INF)


def test_limiting_form_gives_the_durfee_identity():
    # sum q^{n^2} / (q)_n^2 = 1 / (q)_inf
    lhs, rhs = limit_identity(catalog_pair("unit"), INF, INF, 1, 20)
    expected = series_invert(poch_infinite(ThetaArg(1, 1), 1, 20), 20)
    assert series_eq_upto(lhs, expected, 20).equal
    assert series_eq_upto(rhs, expected, 20).equal


def test_convergent_sum_stops_after_quiet_terms():
    total = convergent_sum(lambda n: monomial(1, n), 5)
    assert total == QSeries({e: 1 for e in range(6)}, 5)


def test_convergent_sum_raises_when_terms_persist():
    with pytest.raises(NonConvergent):
        convergent_sum(lambda n: constant(1), 5, row_cap=5)


def test_starred_sum_averages_even_and_odd_limits():
    result = starred_sum(lambda n: constant(-1 if n % 2 else 1), 5)
    assert result.even == constant(1, 5)
    assert result.odd == zero(5)
    assert result.value == constant(Fraction(1, 2), 5)
    assert result.rows == 6


def test_starred_sum_raises_when_partial_sums_drift():
    with pytest.raises(StabilizationFailure):
        starred_sum(lambda n: constant(1), 5, row_cap=8)


@pytest.mark.parametrize("pair_id", ["bk", "slater1", "andrews1"])
def test_beta_from_alpha_reproduces_catalog_beta(pair_id):
    pair = catalog_pair(pair_id)
    betas = pair_beta_from_alpha(pair.alpha, pair.base, 3, 12, pair.step)
    for n, beta in enumerate(betas):
        assert series_eq_upto(beta, pair.beta(n, 12), 12).equal, n


def test_slater3_alpha_terms_are_three_n_apart():
    pair = catalog_pair("slater3")
    assert series_eq_upto(pair.alpha(1, N), series_add(monomial(-1, -2), monomial(-1, 1)), N).equal
    assert series_eq_upto(pair.alpha(2, N), series_add(monomial(1, -5), monomial(1, 1)), N).equal
    assert verify_pair(pair, 6, N).equal


def test_base_change_keeps_alpha_zero():
    pair = catalog_pair("bk")
    changed = base_change(pair)
    assert series_eq_upto(changed.alpha(0, N), pair.alpha(0, N), N).equal
