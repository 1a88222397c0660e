import pytest

from classical_mocks import CLASSICAL_MOCKS, classical_mock, eval_classical
from qseries_types import UnknownIdentityId
from series_core import QSeries, series_eq_upto


def test_omega_expansion():
    assert eval_classical("omega", 3) == QSeries({0: 1, 1: 2, 2: 3, 3: 4}, 3)


@pytest.mark.parametrize("name", [name for name, mock in CLASSICAL_MOCKS.items() if mock.appell_form])
def test_defining_sum_matches_appell_form(name):
    N = 20
    assert series_eq_upto(eval_classical(name, N), CLASSICAL_MOCKS[name].appell_form.evaluate(N), N).equal


@pytest.mark.parametrize("name", ["S1", "T1"])
def test_sums_without_appell_form_still_evaluate(name):
    assert eval_classical(name, 10).order == 10


def test_unknown_mock():
    with pytest.raises(UnknownIdentityId, match="unknown id: psi"):
        classical_mock("psi")
