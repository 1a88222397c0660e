"""Classical mock theta functions by their defining q-hypergeometric sums.

T0, U1, S1 and T1 are of order 8, omega of order 3 and A of order 2. The first
four also carry their Appell-Lerch expressions, which the identity suite
checks against the sums.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional

from bailey import convergent_sum
from hecke_appell import AppellForm, AppellSpec, AppellTerm
from qproducts import ThetaArg, parse_theta_quotient, poch_finite
from qseries_types import UnknownIdentityId
from series_core import QSeries, monomial, series_divide, series_mul, series_shift

logger = logging.getLogger(__name__)


def _poch(sign: int, exp: int, step: int, n: int) -> QSeries:
    return poch_finite(ThetaArg(sign, exp), step, n)


def _term(exponent: int, numerator: QSeries, denominator: QSeries, N: int) -> QSeries:
    return series_divide(series_shift(numerator, exponent), denominator, N)


def _t0(n: int, N: int) -> QSeries:
    return _term((n + 1) * (n + 2), _poch(-1, 2, 2, n), _poch(-1, 1, 2, n + 1), N)


def _omega(n: int, N: int) -> QSeries:
    den = _poch(1, 1, 2, n + 1)
    return _term(2 * n * (n + 1), monomial(1, 0), series_mul(den, den), N)


def _a(n: int, N: int) -> QSeries:
    return _term(n + 1, _poch(-1, 2, 2, n), _poch(1, 1, 2, n + 1), N)


def _u1(n: int, N: int) -> QSeries:
    return _term((n + 1) ** 2, _poch(-1, 1, 2, n), _poch(-1, 2, 4, n + 1), N)


def _s1(n: int, N: int) -> QSeries:
    return _term(n * (n + 2), _poch(-1, 1, 2, n), _poch(-1, 2, 2, n), N)


def _t1(n: int, N: int) -> QSeries:
    return _term(n * (n + 1), _poch(-1, 2, 2, n), _poch(-1, 1, 2, n + 1), N)


def _m(coeff, shift: int, x: ThetaArg, modulus: int, z: ThetaArg) -> AppellTerm:
    return AppellTerm(Fraction(coeff), shift, AppellSpec(x, modulus, z))


@dataclass(frozen=True)
class ClassicalMock:
    name: str
    term: Callable[[int, int], QSeries]
    appell_form: Optional[AppellForm] = None


CLASSICAL_MOCKS: Dict[str, ClassicalMock] = {
    "T0": ClassicalMock("T0", _t0, AppellForm(
        appell_terms=(_m(-1, 0, ThetaArg(-1, 3), 8, ThetaArg(1, 2)),),
    )),
    "omega": ClassicalMock("omega", _omega, AppellForm(
        appell_terms=(_m(-2, -1, ThetaArg(1, 1), 6, ThetaArg(1, 2)),),
        quotients=(parse_theta_quotient("J6^3 / J2 J3,6"),),
    )),
    "A": ClassicalMock("A", _a, AppellForm(
        appell_terms=(_m(-1, 0, ThetaArg(1, 1), 4, ThetaArg(1, 2)),),
    )),
    "U1": ClassicalMock("U1", _u1, AppellForm(
        appell_terms=(_m(-1, 0, ThetaArg(-1, 1), 4, ThetaArg(-1, 2)),),
    )),
    "S1": ClassicalMock("S1", _s1),
    "T1": ClassicalMock("T1", _t1),
}


def classical_mock(name: str) -> ClassicalMock:
    try:
        return CLASSICAL_MOCKS[name]
    except KeyError:
        raise UnknownIdentityId(f"unknown id: {name}") from None


def eval_classical(name: str, N: int, row_cap: Optional[int] = None) -> QSeries:
    """Defining sum of the named classical mock theta function to order N."""
    mock = classical_mock(name)
    logger.debug(f"Evaluating classical {name} to order {N}")
    return convergent_sum(lambda n: mock.term(n, N), N, row_cap, label=name)
