import pytest

from hecke_appell import (
    AppellForm, AppellSpec, AppellTerm, FSpec, appell_change_of_z, appell_m, default_row_cap, hecke_f,
    hecke_f_bruteforce, hm_expand, hm_g, hm_theta_quotients, minus_one_correction_quotients, theta_correction,
)
from qproducts import ThetaArg
from qseries_types import DivisionByZeroTheta, InvalidSpec, NonTerminating, PoleAtTerm
from series_core import QSeries, series_add, series_eq_upto, series_scale, series_shift, series_sub

N = 25


def q(k):
    return ThetaArg(1, k)


def mq(k):
    return ThetaArg(-1, k)


def test_default_row_cap_grows_with_order_and_offsets():
    assert default_row_cap(10) == 104
    assert default_row_cap(10, 3, -5) == 112


@pytest.mark.parametrize("spec", [
    FSpec(1, 2, 1, q(1), q(3), 2),
    FSpec(1, 3, 1, mq(1), mq(3)),
    FSpec(3, 5, 3, q(4), q(6)),
    FSpec(1, 2, 1, mq(5), mq(9), 4),
])
def test_quadrant_scan_matches_bruteforce(spec):
    assert series_eq_upto(hecke_f(spec, N), hecke_f_bruteforce(spec, N, 30), N).equal


def test_hecke_form_rejects_bad_parameters():
    with pytest.raises(InvalidSpec):
        FSpec(0, 1, 1, q(1), q(1))
    with pytest.raises(InvalidSpec):
        FSpec(1, 2, 1, q(1), q(1), 0)


def test_hecke_scan_reports_truncated_rows():
    with pytest.raises(NonTerminating):
        hecke_f(FSpec(1, 2, 1, q(1), q(3), 2), 40, row_cap=2)


def test_swapped_spec_gives_the_same_series():
    spec = FSpec(1, 3, 1, mq(1), mq(3))
    assert hecke_f(spec, N) == hecke_f(spec.swapped(), N)


def test_appell_spec_genericity():
    with pytest.raises(DivisionByZeroTheta):
        AppellSpec(q(1), 2, q(4))
    with pytest.raises(PoleAtTerm):
        AppellSpec(q(1), 2, q(1))


def test_appell_sum_inversion_symmetry():
    # m(x, q^M, z) = x^{-1} m(x^{-1}, q^M, z^{-1})
    x, z = mq(1), mq(1)
    direct = appell_m(AppellSpec(x, 3, z), N)
    mirrored = appell_m(AppellSpec(x.inverse(), 3, z.inverse()), N + 1)
    assert series_eq_upto(direct, series_scale(series_shift(mirrored, -1), -1), N).equal


def test_appell_sum_quasi_periodicity_in_x():
    # m(q x, q, z) = 1 - x m(x, q, z)
    x, z = q(1), mq(2)
    shifted = appell_m(AppellSpec(x.shift(1), 1, z), N)
    base = appell_m(AppellSpec(x, 1, z), N)
    expected = series_sub(QSeries({0: 1}), series_shift(base, 1))
    assert series_eq_upto(shifted, expected, N).equal


def test_change_of_z_is_a_theta_quotient():
    x, z, z0 = mq(1), mq(1), q(2)
    difference = series_sub(appell_m(AppellSpec(x, 3, z), N), appell_m(AppellSpec(x, 3, z0), N))
    quotient = appell_change_of_z(x, 3, z, z0).evaluate(N)
    assert series_eq_upto(difference, quotient, N).equal


def test_appell_form_sums_its_parts():
    term = AppellTerm(2, 1, AppellSpec(mq(1), 3, mq(1)))
    form = AppellForm((term,), (), ((0, 5),))
    expected = series_add(QSeries({0: 5}), series_scale(series_shift(appell_m(term.spec, N - 1), 1), 2))
    assert series_eq_upto(form.evaluate(N), expected, N).equal


@pytest.mark.parametrize("n,p,x,y,d", [
    (1, 1, q(1), q(3), 2),
    (1, 2, mq(1), mq(3), 1),
    (3, 2, q(4), q(6), 1),
    (1, 4, mq(2), mq(3), 1),
    (1, 4, mq(1), mq(4), 1),
    (1, 4, q(5), q(7), 2),
    (3, 4, q(5), q(6), 1),
    (3, 4, q(2), q(5), 1),
])
def test_hickerson_mortenson_expansion(n, p, x, y, d):
    direct = hecke_f(FSpec(n, n + p, n, x, y, d), N)
    assert series_eq_upto(direct, hm_expand(n, p, x, y, d, N), N).equal


def evaluate_all(quotients):
    total = QSeries({}, N)
    for quotient in quotients:
        total = series_add(total, quotient.evaluate(N))
    return total


@pytest.mark.parametrize("n,p,x,y,d", [
    (1, 1, q(1), q(3), 2),
    (1, 1, mq(1), mq(2), 1),
    (1, 2, mq(1), mq(3), 1),
    (1, 4, mq(2), mq(3), 1),
    (3, 4, q(3), q(4), 1),
])
def test_expansion_at_minus_one(n, p, x, y, d):
    direct = hecke_f(FSpec(n, n + p, n, x, y, d), N)
    g = hm_g(n, n + p, n, x, y, mq(0), mq(0), d, N)
    expected = series_add(g, evaluate_all(hm_theta_quotients(n, p, x, y, d)))
    assert series_eq_upto(direct, expected, N).equal


@pytest.mark.parametrize("n,x,y", [
    (1, mq(1), mq(3)),
    (3, q(4), q(6)),
])
def test_closed_form_theta_2_matches_minus_one_route(n, x, y):
    closed = theta_correction(n, 2, x, y, 1, N)
    assert series_eq_upto(closed, evaluate_all(minus_one_correction_quotients(n, 2, x, y)), N).equal


def test_theta_4_is_g_minus_f():
    x, y = mq(2), mq(3)
    g = hm_g(1, 5, 1, x, y, y / x, x / y, 1, N)
    difference = series_sub(g, hecke_f(FSpec(1, 5, 1, x, y), N))
    assert series_eq_upto(difference, theta_correction(1, 4, x, y, 1, N), N).equal


def test_theta_quotients_need_coprime_parameters():
    with pytest.raises(InvalidSpec):
        hm_theta_quotients(2, 4, q(1), q(3))
    assert len(hm_theta_quotients(3, 4, q(5), q(6))) == 16


def test_hm_expand_rejects_unsupported_p():
    with pytest.raises(InvalidSpec):
        hm_expand(1, 3, q(1), q(3), 1, N)
    with pytest.raises(InvalidSpec):
        hm_expand(2, 2, q(1), q(3), 1, N)


def test_expansion_is_g_minus_theta_correction():
    x, y = ThetaArg(-1, 1), ThetaArg(-1, 3)
    g = hm_g(1, 3, 1, x, y, y / x, x / y, 1, N)
    expected = series_sub(g, theta_correction(1, 2, x, y, 1, N))
    assert series_eq_upto(expected, hm_expand(1, 2, x, y, 1, N), N).equal


def test_theta_correction_needs_odd_n():
    with pytest.raises(InvalidSpec):
        theta_correction(2, 4, q(1), q(3), 1, N)
