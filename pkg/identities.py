"""Catalog of mock theta double-sum identities and the engine that verifies them.

Every entry has up to four forms of the same function: the q-hypergeometric
double sum, an indefinite theta series with a product prefactor, an
Appell-Lerch expression, and (for the corollary identities) a combination of
classical mock theta functions. Forms are transcribed as printed.
"""

import itertools
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from bailey import CONVERGENCE_PATIENCE, INF, SQRT, RhoParam, catalog_pair, limit_identity, starred_sum
from classical_mocks import eval_classical
from hecke_appell import AppellForm, AppellSpec, AppellTerm, FSpec, default_row_cap, hecke_f
from qproducts import ThetaArg, ThetaQuotient, binom2, parse_theta_quotient, poch_finite, poch_infinite
from qseries_types import (
    STATUS_EQUAL, STATUS_ERROR, STATUS_MISMATCH, MismatchDetail, NonConvergent, QSeriesError,
    UnknownIdentityId, VerificationRecord,
)
from series_core import (
    ONE, QSeries, evaluate_to_order, from_terms, series_add, series_dilate, series_divide, series_eq_upto,
    series_mul, series_negate_q, series_scale, series_shift, series_truncate, zero,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Term:
    """``sign * q^exponent * prod(numerators) / prod(denominators)`` with exact factors."""
    sign: int
    exponent: int
    numerators: Tuple[QSeries, ...] = ()
    denominators: Tuple[QSeries, ...] = ()

    @property
    def lowest_exponent(self) -> int:
        low = self.exponent
        for factor in self.numerators:
            low += factor.min_exp
        for factor in self.denominators:
            low -= factor.min_exp
        return low

    def evaluate(self, N: int) -> QSeries:
        numerator = ONE
        for factor in self.numerators:
            numerator = series_mul(numerator, factor)
        denominator = ONE
        for factor in self.denominators:
            denominator = series_mul(denominator, factor)
        return series_divide(series_scale(series_shift(numerator, self.exponent), self.sign), denominator, N)


@dataclass(frozen=True)
class DoubleSum:
    """``scale * sum_{n >= start} sum_{j=start}^{n} rule(n, j)``, starred when only even/odd partial sums settle."""
    rule: Callable[[int, int], Term]
    start: int = 1
    starred: bool = False
    scale: Fraction = Fraction(1)

    def row(self, n: int, N: int) -> Tuple[QSeries, bool]:
        """Row n to order N and whether every term in it lies beyond N."""
        total = zero(N)
        beyond = True
        for j in range(self.start, n + 1):
            term = self.rule(n, j)
            if any(f.is_exact and f.is_zero for f in term.numerators):
                continue
            if term.lowest_exponent > N:
                continue
            beyond = False
            total = series_add(total, term.evaluate(N))
        return total, beyond


@dataclass(frozen=True)
class HeckeForm:
    """``coeff * q^shift * prod (x; q^m)_inf / prod (x; q^m)_inf * f_{a,b,c}(x, y, q^d)``."""
    coeff: Fraction
    shift: int
    numerators: Tuple[Tuple[ThetaArg, int], ...]
    denominators: Tuple[Tuple[ThetaArg, int], ...]
    spec: FSpec


@dataclass(frozen=True)
class ClassicalTerm:
    """``coeff * q^shift * F(+-q^dilation)`` for a classical mock theta function F."""
    coeff: Fraction
    shift: int
    name: str
    dilation: int = 1
    negate: bool = False


@dataclass(frozen=True)
class ClassicalForm:
    terms: Tuple[ClassicalTerm, ...]
    quotients: Tuple[ThetaQuotient, ...] = ()
    constants: Tuple[Tuple[int, Fraction], ...] = ()


@dataclass(frozen=True)
class LimitTuple:
    """Bailey-lemma specialization whose limiting form reproduces the double sum, up to ``coeff * q^shift``."""
    pair_id: str
    rho1: RhoParam
    rho2: RhoParam
    dilation: int = 1
    coeff: Fraction = Fraction(1)
    shift: int = 0
    starred: bool = False


@dataclass(frozen=True)
class HmSpec:
    n: int
    p: int
    x: ThetaArg
    y: ThetaArg
    base_dilation: int

    @property
    def generic(self) -> bool:
        return self.x != self.y


@dataclass(frozen=True)
class IdentityEntry:
    id: str
    double_sum: DoubleSum
    hecke_form: Optional[HeckeForm] = None
    appell_form: Optional[AppellForm] = None
    classical_form: Optional[ClassicalForm] = None
    limit: Optional[LimitTuple] = None
    heavy: bool = False

    @property
    def hm_spec(self) -> Optional[HmSpec]:
        """Hickerson-Mortenson parameters of the Hecke form, when it is ``f_{n,n+p,n}``."""
        if self.hecke_form is None:
            return None
        spec = self.hecke_form.spec
        if spec.a != spec.c:
            return None
        return HmSpec(spec.a, spec.b - spec.a, spec.x, spec.y, spec.base_dilation)

    @property
    def forms(self) -> List[str]:
        names = ["double_sum"]
        for name in ("hecke_form", "appell_form", "classical_form"):
            if getattr(self, name) is not None:
                names.append(name)
        return names


def _q(k: int) -> ThetaArg:
    return ThetaArg(1, k)


def _mq(k: int) -> ThetaArg:
    return ThetaArg(-1, k)


def _p(sign: int, exp: int, step: int, n: int) -> QSeries:
    return poch_finite(ThetaArg(sign, exp), step, n)


def _qq(n: int) -> QSeries:
    """(q; q)_n"""
    return _p(1, 1, 1, n)


def _q2(n: int) -> QSeries:
    """(q^2; q^2)_n"""
    return _p(1, 2, 2, n)


def _one_minus(k: int) -> QSeries:
    return from_terms({0: 1, k: -1}, None)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _terms(*pairs) -> Tuple[Tuple[int, Fraction], ...]:
    return tuple((e, Fraction(c)) for e, c in pairs)


def _m(coeff, shift: int, x: ThetaArg, modulus: int, z: ThetaArg) -> AppellTerm:
    return AppellTerm(Fraction(coeff), shift, AppellSpec(x, modulus, z))


def _j(text: str, coeff=1, shift: int = 0) -> ThetaQuotient:
    return parse_theta_quotient(text, coeff, _q(shift))


# Product prefactors of the Hecke forms.
_OVER_Q = ((), ((_q(1), 1),))
_ODD_OVER_EVEN = (((_q(1), 2),), ((_q(2), 2),))
_MINUS_Q_OVER_Q = (((_mq(1), 1),), ((_q(1), 1),))


def _hecke(coeff, shift: int, prefactor, a: int, b: int, c: int, x: ThetaArg, y: ThetaArg, d: int = 1) -> HeckeForm:
    numerators, denominators = prefactor
    return HeckeForm(Fraction(coeff), shift, numerators, denominators, FSpec(a, b, c, x, y, d))


# Double-sum rules; ``n`` is the outer index and ``j`` the inner one.

def _w1(n, j):
    return Term(_sign(j), n * n + binom2(j + 1), (_p(-1, 0, 1, j), _p(1, 1, 2, j - 1)),
                (_p(-1, 1, 1, n), _qq(n - j), _qq(2 * j - 1)))


def _w2(n, j):
    return Term(_sign(n + j), binom2(j + 1), (_p(1, 1, 2, n), _p(-1, 0, 1, j), _p(1, 1, 2, j - 1)),
                (_p(-1, 1, 1, n), _qq(n - j), _qq(2 * j - 1)))


def _w3(n, j):
    return Term(_sign(n + j), n * n + j * j + j, (_p(1, 1, 2, n), _p(-1, 0, 2, j), _p(1, 2, 4, j - 1)),
                (_p(-1, 2, 2, n), _q2(n - j), _q2(2 * j - 1)))


def _w4(n, j):
    return Term(_sign(j), n * n + n + binom2(j + 1), (_p(-1, 1, 1, j), _p(1, 1, 2, j)),
                (_p(-1, 1, 1, n), _qq(n - j), _qq(2 * j + 1)))


def _m1(n, j):
    return Term(_sign(j), n * n + binom2(j), (_p(-1, 0, 1, j),),
                (_p(-1, 1, 1, n), _qq(n - j), _q2(j - 1), _one_minus(2 * j - 1)))


def _m2(n, j):
    return Term(_sign(n + j), binom2(j), (_p(1, 1, 2, n), _p(-1, 0, 1, j)),
                (_p(-1, 1, 1, n), _qq(n - j), _q2(j - 1), _one_minus(2 * j - 1)))


def _m3(n, j):
    return Term(_sign(n + j), n * n + j * j - j, (_p(1, 1, 2, n), _p(-1, 0, 2, j)),
                (_p(-1, 2, 2, n), _q2(n - j), _p(1, 4, 4, j - 1), _one_minus(4 * j - 2)))


def _m4(n, j):
    return Term(_sign(j), n * n + n + binom2(j), (),
                (_p(-1, 1, 1, n), _qq(n - j), _qq(j), _one_minus(2 * j + 1)))


def _m5(n, j):
    return Term(_sign(j), binom2(n + 1) + binom2(j), (), (_qq(n - j), _qq(j), _one_minus(2 * j + 1)))


def _m6(n, j):
    return Term(_sign(j), n * n + binom2(j + 1), (), (_qq(n - j), _qq(j - 1), _one_minus(2 * j - 1)))


def _m7(n, j):
    return Term(_sign(j), binom2(n + 1) + binom2(j + 1), (_p(-1, 0, 1, n),),
                (_qq(n - j), _qq(j - 1), _one_minus(2 * j - 1)))


def _m8(n, j):
    return Term(_sign(n + j), binom2(j + 1), (_p(1, 1, 2, n),), (_qq(n - j), _qq(j - 1), _one_minus(2 * j - 1)))


def _m9(n, j):
    return Term(_sign(n + j), n * n + j * j + j, (_p(1, 1, 2, n),), (_q2(n - j), _q2(j - 1), _one_minus(4 * j - 2)))


def _m10(n, j):
    return Term(_sign(j), n + j * j + j, (_p(-1, 0, 1, 2 * n),), (_q2(n - j), _q2(j - 1), _one_minus(4 * j - 2)))


def _m11(n, j):
    return Term(_sign(j), n * n + n + binom2(j + 1), (), (_qq(n - j), _qq(j), _one_minus(2 * j + 1)))


def _m12(n, j):
    return Term(_sign(j), binom2(n + 1) + binom2(j + 1), (_p(-1, 1, 1, n),),
                (_qq(n - j), _qq(j), _one_minus(2 * j + 1)))


def _m13(n, j):
    return Term(_sign(j), n * n + binom2(j), (), (_qq(n - j), _qq(j - 1), _one_minus(2 * j - 1)))


def _m14(n, j):
    return Term(_sign(j), binom2(n + 1) + binom2(j), (_p(-1, 0, 1, n),),
                (_qq(n - j), _qq(j - 1), _one_minus(2 * j - 1)))


def _m15(n, j):
    return Term(_sign(n + j), binom2(j), (_p(1, 1, 2, n),), (_qq(n - j), _qq(j - 1), _one_minus(2 * j - 1)))


def _m16(n, j):
    return Term(_sign(n + j), n * n + j * j - j, (_p(1, 1, 2, n),), (_q2(n - j), _q2(j - 1), _one_minus(4 * j - 2)))


def _m17(n, j):
    return Term(_sign(j), n + j * j - j, (_p(-1, 0, 1, 2 * n),), (_q2(n - j), _q2(j - 1), _one_minus(4 * j - 2)))


def _m18(n, j):
    return Term(_sign(j), n * n + n + binom2(j), (), (_qq(n - j), _qq(j), _one_minus(2 * j + 1)))


def _m19(n, j):
    return Term(_sign(j), binom2(n + 1) + binom2(j), (_p(-1, 1, 1, n),), (_qq(n - j), _qq(j), _one_minus(2 * j + 1)))


def _finite(arg: ThetaArg) -> RhoParam:
    return RhoParam.finite(arg)


_CATALOG_ENTRIES = [
    IdentityEntry(
        "W1", DoubleSum(_w1),
        _hecke(-2, 2, _OVER_Q, 3, 5, 3, _q(5), _q(5)),
        AppellForm(
            (_m(4, 0, _mq(17), 48, _q(24)), _m(-4, -5, _mq(1), 48, _q(24))),
            (_j("J8 J12 J96 J7,16 Jb4,24 J6,48 J30,96 / J24 J48 J3,8 J2,12 J14,96 J46,96", -2, 2),),
        ),
        limit=LimitTuple("bk_step", INF, INF),
    ),
    IdentityEntry(
        "W2", DoubleSum(_w2, starred=True),
        _hecke(1, 1, _ODD_OVER_EVEN, 1, 3, 1, _mq(2), _mq(2)),
        AppellForm(
            (_m(4, 0, _mq(1), 8, _q(4)),),
            (_j("J1,8^2 J3,8^3 J2,16 / J8^4 J16", 1, 1),),
        ),
        limit=LimitTuple("bk_step", SQRT, SQRT, starred=True),
    ),
    IdentityEntry(
        "W3", DoubleSum(_w3),
        _hecke(2, 3, _ODD_OVER_EVEN, 1, 2, 1, _mq(7), _mq(7), 4),
        AppellForm(
            (_m(4, 0, _mq(1), 12, _q(4)),),
            (_j("Jb1,12^2 / Jb1,4", 2, 3),),
        ),
        limit=LimitTuple("bk_step", _finite(_q(1)), INF, dilation=2),
    ),
    IdentityEntry(
        "W4", DoubleSum(_w4, start=0),
        _hecke(1, 0, _OVER_Q, 3, 5, 3, _q(3), _q(3)),
        AppellForm(
            (_m(-2, -4, _mq(5), 48, _q(24)), _m(-2, -2, _mq(11), 48, _q(24))),
            (_j("J8 J12 J96 J3,16 Jb4,24 J6,48 J18,96 J30,96 / J24 J48 J1,8 J2,12 J6,96 J26,96 J38,96"),),
        ),
        limit=LimitTuple("bk_q_step", INF, INF),
    ),
    IdentityEntry(
        "M1", DoubleSum(_m1),
        _hecke(-2, 1, _OVER_Q, 3, 5, 3, _q(4), _q(6)),
        AppellForm(
            (_m(4, -3, _mq(7), 48, _q(24)), _m(4, 0, _mq(25), 48, _q(-24))),
            (_j("J8 J12 J96 J1,16 Jb4,24 J6,48 J18,96 / J24 J48 J3,8 J2,12 J2,96 J34,96", -2),),
            _terms((0, -2)),
        ),
        limit=LimitTuple("d1", INF, INF, shift=-1),
    ),
    IdentityEntry(
        "M2", DoubleSum(_m2, starred=True),
        _hecke(1, 0, _ODD_OVER_EVEN, 1, 3, 1, _mq(1), _mq(3)),
        AppellForm(
            (_m(4, 0, _mq(5), 8, _q(4)),),
            (_j("J1,8^3 J3,8^2 J6,16 / J8^4 J16", -1),),
            _terms((0, -2)),
        ),
        limit=LimitTuple("d1", SQRT, SQRT, shift=-1, starred=True),
    ),
    IdentityEntry(
        "M3", DoubleSum(_m3),
        _hecke(2, 1, _ODD_OVER_EVEN, 1, 2, 1, _mq(5), _mq(9), 4),
        AppellForm(
            (_m(4, 0, _mq(7), 12, _q(4)),),
            (_j("J12^3 Jb5,12 / J4,12 Jb1,12 Jb3,12", 2),),
            _terms((0, -2)),
        ),
        limit=LimitTuple("d1", _finite(_q(1)), INF, dilation=2, shift=-2),
    ),
    IdentityEntry(
        "M4", DoubleSum(_m4, start=0),
        _hecke(1, 0, _OVER_Q, 3, 5, 3, _q(2), _q(4)),
        AppellForm(
            (_m(2, 0, _mq(29), 48, _q(24)), _m(-2, -1, _mq(13), 48, _q(-24))),
            (_j("J8 J12 J96^3 J5,16 Jb4,24 J6,48 J18,48 / J24 J48^2 J1,8 J2,12 J10,96 J22,96 J42,96", 1, 1),),
            _terms((0, -1)),
        ),
        limit=LimitTuple("d1q", INF, INF),
    ),
    IdentityEntry(
        "M5", DoubleSum(_m5, start=0),
        _hecke(1, 0, _MINUS_Q_OVER_Q, 1, 2, 1, _q(1), _q(3), 2),
        AppellForm(
            (_m(2, 0, _q(5), 6, _q(2)),),
            (_j("J6^3 / J2,6 J3,6", -1, 1),),
            _terms((0, -1)),
        ),
        limit=LimitTuple("d1q", _finite(_mq(1)), INF),
    ),
    IdentityEntry(
        "M6", DoubleSum(_m6),
        _hecke(-1, 2, _OVER_Q, 3, 7, 3, _q(5), _q(6)),
        AppellForm(
            (
                _m(1, 0, _mq(49), 120, _q(-3)), _m(-1, -3, _mq(89), 120, _q(-3)),
                _m(1, -14, _mq(119), 120, _q(3)), _m(-1, -1, _mq(79), 120, _q(3)),
            ),
            (
                _j("J12,48 J16,40 J2,20 J3,40 Jb17,40 J40 / J1 J3,120 Jb6,40 J20 J80", -1, -11),
                _j("J24,48 J1,40 J4,40 Jb1,40 J8,20 Jb4,40 J18,40 J80 / J1 J3,120 Jb6,40 Jb2,40 J20^2 J40", 1, -4),
                _j("J24,48 J1,40 J4,40 Jb1,40 J8,20 Jb16,40 J42,80^2 / J1 J3,120 Jb6,40 Jb2,40 J20^2 J80", 1, -12),
            ),
            _terms((-3, 1), (-14, -1), (-1, 1)),
        ),
        limit=LimitTuple("d2", INF, INF),
        heavy=True,
    ),
    IdentityEntry(
        "M7", DoubleSum(_m7),
        _hecke(-2, 2, _MINUS_Q_OVER_Q, 1, 3, 1, _q(4), _q(5), 2),
        AppellForm(
            (_m(2, -1, _mq(1), 16, _q(-1)),),
            (_j("J4,8 J16,32 J1,16 J14,32 / J1,2 Jb2,16 Jb0,16", -2, -1),),
        ),
        limit=LimitTuple("d2", _finite(_mq(0)), INF),
    ),
    IdentityEntry(
        "M8", DoubleSum(_m8, starred=True, scale=Fraction(2)),
        _hecke(1, 1, _ODD_OVER_EVEN, 1, 5, 1, _mq(2), _mq(3)),
        AppellForm(
            (_m(2, 0, _mq(7), 24, _q(6)), _m(2, -2, _mq(1), 24, _q(-6))),
            (_j("J1 J3,8 J2,16 / J2 J16", 1, 1),),
        ),
        limit=LimitTuple("d2", SQRT, SQRT, coeff=Fraction(2), starred=True),
    ),
    IdentityEntry(
        "M9", DoubleSum(_m9),
        _hecke(1, 3, _ODD_OVER_EVEN, 1, 3, 1, _mq(7), _mq(9), 4),
        AppellForm(
            (_m(1, 0, _mq(8), 32, _q(-2)),),
            (
                _j("J64^2 J28,64 / J32 J4,64", -1, -1),
                _j("J8,16 J32,64 J4,32 J24,64 / Jb1,4 Jb6,32 Jb2,32", 1, -1),
            ),
        ),
        limit=LimitTuple("d2", _finite(_q(1)), INF, dilation=2),
    ),
    IdentityEntry(
        "M10", DoubleSum(_m10),
        _hecke(-2, 3, _MINUS_Q_OVER_Q, 1, 5, 1, _q(5), _q(7), 2),
        AppellForm(
            (_m(-2, -1, _mq(10), 48, _q(-2)), _m(-2, -4, _mq(2), 48, _q(-2))),
            (
                _j("J8,32 J20,48 Jb22,48 J2,24 J6,48 J96 / J1,2 Jb8,48 Jb0,48 J24 J2,48", -4, -3),
                _j("J16,32 J4,48 Jb2,48 J10,24 Jb4,48 J20,48 J96 / J1,2 Jb8,48 Jb0,48 J24^2 J48", 2, 6),
                _j("J16,32 J4,48 Jb2,48 J10,24 Jb20,48 J44,96^2 / J1,2 Jb8,48 Jb0,48 J24^2 J96", 2, -4),
            ),
        ),
        limit=LimitTuple("d2", _finite(_mq(0)), _finite(_mq(1)), dilation=2),
    ),
    IdentityEntry(
        "M11", DoubleSum(_m11, start=0),
        _hecke(1, 0, _OVER_Q, 3, 7, 3, _q(3), _q(4)),
        AppellForm(
            (
                _m(1, -8, _mq(17), 120, _q(-3)), _m(1, -6, _mq(23), 120, _q(3)),
                _m(-1, -1, _mq(47), 120, _q(3)), _m(1, -12, _mq(7), 120, _q(3)),
            ),
            (
                _j("J12,48 J1,40 J8,40 Jb19,40 J6,20 Jb12,40 J18,40 J40^2 / J1 J3,120 Jb14,40 Jb10,40 J20^3 J80",
                   1, -9),
                _j("J12,48 J1,40 J8,40 Jb19,40 J6,20 Jb8,40 J19,40^2 Jb1,40^2 "
                   "/ J1 J3,120 Jb14,40 Jb10,40 J20^3 J40 J80", 1, -4),
                _j("J24,48 J1,40 J12,40 Jb1,40 J4,20 Jb12,40 J18,40 J80 / J1 J3,120 Jb14,40 Jb10,40 J20^2 J40",
                   -1, -4),
                _j("J24,48 J1,40 J12,40 Jb1,40 J4,20 Jb8,40 J38,80^2 / J1 J3,120 Jb14,40 Jb10,40 J20^2 J80", -1, -8),
            ),
        ),
        limit=LimitTuple("d2q", INF, INF),
        heavy=True,
    ),
    IdentityEntry(
        "M12", DoubleSum(_m12, start=0),
        _hecke(1, 0, _MINUS_Q_OVER_Q, 1, 3, 1, _q(2), _q(3), 2),
        AppellForm(
            (_m(-1, -1, _mq(3), 16, _q(1)),),
            (_j("J4,8 J16,32 J5,16 J6,32 / J1,2 Jb6,16 Jb4,16", 1, 1),),
        ),
        limit=LimitTuple("d2q", _finite(_mq(1)), INF),
    ),
    IdentityEntry(
        "M13", DoubleSum(_m13),
        _hecke(-1, 1, _OVER_Q, 3, 7, 3, _q(4), _q(7)),
        AppellForm(
            (
                _m(1, 0, _mq(59), 120, _q(-9)), _m(-1, -7, _mq(19), 120, _q(-9)),
                _m(-1, -4, _mq(29), 120, _q(9)), _m(-1, -10, _mq(11), 120, _q(-9)),
            ),
            (
                _j("J12,48 J3,40 J16,40 Jb17,40 J2,20 Jb4,40 J14,40 J40^2 / J1 J9,120 Jb10,40 Jb2,40 J20^3 J80",
                   -1, -8),
                _j("J12,48 J3,40 J16,40 Jb17,40 J2,20 Jb16,40 J17,40^2 Jb3,40^2 "
                   "/ J1 J9,120 Jb10,40 Jb2,40 J20^3 J40 J80", -1, -9),
                _j("J24,48 J3,40 J4,40 Jb3,40 J8,20 Jb4,40 J14,40 J80 / J1 J9,120 Jb10,40 Jb2,40 J20^2 J40", 1, -2),
                _j("J24,48 J3,40 J4,40 Jb3,40 J8,20 Jb16,40 J34,80^2 / J1 J9,120 Jb10,40 Jb2,40 J20^2 J80", 1, -10),
            ),
        ),
        limit=LimitTuple("d3", INF, INF, shift=-1),
        heavy=True,
    ),
    IdentityEntry(
        "M14", DoubleSum(_m14),
        _hecke(-2, 1, _MINUS_Q_OVER_Q, 1, 3, 1, _q(3), _q(6), 2),
        AppellForm(
            (_m(2, 0, _mq(7), 16, _q(-3)),),
            (_j("J4,8 J16,32 J1,16 J14,32 / J1,2 Jb2,16 Jb4,16", -2),),
        ),
        limit=LimitTuple("d3", _finite(_mq(0)), INF, shift=-1),
    ),
    IdentityEntry(
        "M15", DoubleSum(_m15, starred=True, scale=Fraction(2)),
        _hecke(1, 0, _ODD_OVER_EVEN, 1, 5, 1, _mq(1), _mq(4)),
        AppellForm(
            (_m(2, 0, _mq(13), 24, _q(2)), _m(-2, -1, _mq(5), 24, _q(2))),
            (_j("J1 J1,8 J6,16 / J2 J16"),),
        ),
        limit=LimitTuple("d3", SQRT, SQRT, coeff=Fraction(2), shift=-1, starred=True),
    ),
    IdentityEntry(
        "M16", DoubleSum(_m16),
        _hecke(1, 1, _ODD_OVER_EVEN, 1, 3, 1, _mq(5), _mq(11), 4),
        AppellForm(
            (_m(-1, -1, _mq(8), 32, _q(-6)),),
            (
                _j("J32^3 J10,32 Jb6,32 / J6,32 J16,32 Jb0,32 Jb10,32"),
                _j("J8,16 J32,64 J4,32 J24,64 / Jb1,4 Jb2,32 Jb10,32", 1, -1),
            ),
            _terms((0, Fraction(1, 2))),
        ),
        limit=LimitTuple("d3", _finite(_q(1)), INF, dilation=2, shift=-2),
    ),
    IdentityEntry(
        "M17", DoubleSum(_m17),
        _hecke(-2, 1, _MINUS_Q_OVER_Q, 1, 5, 1, _q(3), _q(9), 2),
        AppellForm(
            (_m(2, 0, _mq(22), 48, _q(-6)), _m(2, -1, _mq(14), 48, _q(-6))),
            (
                _j("J8,32 J20,48 Jb18,48 J2,24 Jb4,48 J12,48 J48^2 / J1,2 Jb16,48 Jb8,48 J24^3 J96", -2, 3),
                _j("J8,32 J20,48 Jb18,48 J2,24 Jb20,48 J18,48^2 Jb6,48^2 / J1,2 Jb16,48 Jb8,48 J24^3 J48 J96",
                   -2, -1),
                _j("J16,32 J4,48 Jb6,48 J10,24 Jb4,48 J12,48 J96 / J1,2 Jb16,48 Jb8,48 J24^2 J48", 2, 10),
                _j("J16,32 J4,48 Jb6,48 J10,24 Jb20,48 J36,96^2 / J1,2 Jb16,48 Jb8,48 J24^2 J96", 2),
            ),
        ),
        limit=LimitTuple("d3", _finite(_mq(0)), _finite(_mq(1)), dilation=2, shift=-2),
    ),
    IdentityEntry(
        "M18", DoubleSum(_m18, start=0),
        _hecke(1, 0, _OVER_Q, 3, 7, 3, _q(2), _q(5)),
        AppellForm(
            (
                _m(1, 0, _mq(67), 120, _q(-9)), _m(1, -9, _mq(13), 120, _q(9)),
                _m(-1, -2, _mq(37), 120, _q(9)), _m(-1, -1, _mq(43), 120, _q(-9)),
            ),
            (
                _j("J12,48 J3,40 J8,40 Jb17,40 J6,20 Jb12,40 J14,40 J40^2 / J1 J9,120 Jb18,40 Jb6,40 J20^3 J80",
                   1, -7),
                _j("J12,48 J3,40 J8,40 Jb17,40 J6,20 Jb8,40 J17,40^2 Jb3,40^2 "
                   "/ J1 J9,120 Jb18,40 Jb6,40 J20^3 J40 J80", 1, -4),
                _j("J24,48 J3,40 J12,40 Jb3,40 J4,20 Jb12,40 J14,40 J80 / J1 J9,120 Jb18,40 Jb6,40 J20^2 J40",
                   -1, -3),
                _j("J24,48 J3,40 J12,40 Jb3,40 J4,20 Jb8,40 J34,80^2 / J1 J9,120 Jb18,40 Jb6,40 J20^2 J80", -1, -7),
            ),
        ),
        limit=LimitTuple("d3q", INF, INF),
        heavy=True,
    ),
    IdentityEntry(
        "M19", DoubleSum(_m19, start=0),
        _hecke(1, 0, _MINUS_Q_OVER_Q, 1, 3, 1, _q(1), _q(4), 2),
        AppellForm(
            (_m(1, 0, _mq(11), 16, _q(-3)),),
            (_j("J4,8 J16,32 J5,16 J6,32 / J1,2 Jb8,16 Jb2,16", 1, 1),),
        ),
        limit=LimitTuple("d3q", _finite(_mq(1)), INF),
    ),
]

CATALOG: Dict[str, IdentityEntry] = {entry.id: entry for entry in _CATALOG_ENTRIES}

# Identities between double sums and classical mock theta functions.
CATALOG.update({
    "C8a": IdentityEntry(
        "C8a", CATALOG["M2"].double_sum,
        classical_form=ClassicalForm(
            (ClassicalTerm(Fraction(4), 0, "T0"),),
            (
                _j("J8^3 J4,8 / J2,8^2 Jb1,8", -2),
                _j("J2,4 J8,16 J1,8 J6,16 / Jb1,4 Jb1,8 Jb3,8"),
            ),
            _terms((0, 2)),
        ),
    ),
    "C8b": IdentityEntry(
        "C8b", CATALOG["M5"].double_sum,
        classical_form=ClassicalForm((ClassicalTerm(Fraction(1), 1, "omega"),), (), _terms((0, 1))),
    ),
    "C8c": IdentityEntry(
        "C8c", CATALOG["M9"].double_sum,
        classical_form=ClassicalForm(
            (ClassicalTerm(Fraction(-1), 0, "A", dilation=8, negate=True),),
            (
                _j("J32^3 J14,32 Jb10,32 / J16,32 J2,32 Jb6,32 Jb8,32"),
                _j("J64^2 J28,64 / J32 J4,64", -1, -1),
                _j("J8,16 J32,64 J4,32 J24,64 / Jb1,4 Jb6,32 Jb2,32", 1, -1),
            ),
        ),
    ),
    "C8d": IdentityEntry(
        "C8d", CATALOG["M16"].double_sum,
        classical_form=ClassicalForm(
            (ClassicalTerm(Fraction(1), -1, "U1", dilation=8),),
            (
                _j("J32^3 Jb10,32 J14,32 / Jb16,32 J6,32 J8,32 Jb2,32", -1, -1),
                _j("J32^3 J10,32 Jb6,32 / J6,32 J16,32 Jb0,32 Jb10,32"),
                _j("J8,16 J32,64 J4,32 J24,64 / Jb1,4 Jb2,32 Jb10,32", 1, -1),
            ),
            _terms((0, Fraction(1, 2))),
        ),
    ),
    "ID0": IdentityEntry(
        "ID0", CATALOG["W2"].double_sum,
        classical_form=ClassicalForm(
            (ClassicalTerm(Fraction(2), 1, "T1"), ClassicalTerm(Fraction(-1), 1, "S1")),
        ),
    ),
})

IDENTITY_IDS = tuple(CATALOG)
MAIN_IDS = tuple(entry.id for entry in _CATALOG_ENTRIES)
COROLLARY_IDS = ("C8a", "C8b", "C8c", "C8d", "ID0")
STARRED_IDS = tuple(entry.id for entry in _CATALOG_ENTRIES if entry.double_sum.starred)


def identity_entry(identity_id: str) -> IdentityEntry:
    try:
        return CATALOG[identity_id]
    except KeyError:
        raise UnknownIdentityId(f"unknown id: {identity_id}") from None


@dataclass(frozen=True)
class StarredParts:
    """Even and odd limits of a starred double sum, before scaling."""
    even: QSeries
    odd: QSeries
    value: QSeries


def _sum_rows(double_sum: DoubleSum, N: int, row_cap: Optional[int], label: str) -> QSeries:
    cap = row_cap or default_row_cap(N)
    total = zero(N)
    quiet = 0
    for n in range(double_sum.start, double_sum.start + cap + 1):
        row, beyond = double_sum.row(n, N)
        total = series_add(total, row)
        quiet = quiet + 1 if beyond else 0
        if quiet >= CONVERGENCE_PATIENCE:
            return total
    raise NonConvergent(f"{label}: rows still reach order {N} after {cap} rows")


def starred_parts(identity_id: str, N: int, row_cap: Optional[int] = None) -> StarredParts:
    """Even and odd partial-sum limits of a starred entry."""
    double_sum = identity_entry(identity_id).double_sum
    if not double_sum.starred:
        raise UnknownIdentityId(f"unknown id: {identity_id} (not a starred sum)")
    result = starred_sum(lambda n: double_sum.row(n, N)[0], N, row_cap, start=double_sum.start)
    return StarredParts(result.even, result.odd, result.value)


def eval_double_sum(identity_id: str, N: int, row_cap: Optional[int] = None) -> QSeries:
    """The defining double sum to order N; starred sums average their even and odd limits."""
    double_sum = identity_entry(identity_id).double_sum
    if double_sum.starred:
        value = starred_sum(lambda n: double_sum.row(n, N)[0], N, row_cap, start=double_sum.start).value
    else:
        value = _sum_rows(double_sum, N, row_cap, identity_id)
    return series_scale(value, double_sum.scale)


def _prefactor(form: HeckeForm, N: int) -> QSeries:
    def build(working: int) -> QSeries:
        numerator = ONE
        for arg, step in form.numerators:
            numerator = series_mul(numerator, poch_infinite(arg, step, working))
        denominator = ONE
        for arg, step in form.denominators:
            denominator = series_mul(denominator, poch_infinite(arg, step, working))
        return series_divide(numerator, denominator, working)

    return evaluate_to_order(build, N)


def eval_hecke_form(identity_id: str, N: int, row_cap: Optional[int] = None) -> QSeries:
    form = identity_entry(identity_id).hecke_form
    if form is None:
        raise UnknownIdentityId(f"unknown id: {identity_id}.hecke_form")
    working = N - form.shift
    value = series_mul(_prefactor(form, working), hecke_f(form.spec, working, row_cap))
    return series_truncate(series_scale(series_shift(value, form.shift), form.coeff), N)


def eval_appell_form(identity_id: str, N: int, row_cap: Optional[int] = None) -> QSeries:
    form = identity_entry(identity_id).appell_form
    if form is None:
        raise UnknownIdentityId(f"unknown id: {identity_id}.appell_form")
    return form.evaluate(N, row_cap)


def _classical_term(term: ClassicalTerm, N: int, row_cap: Optional[int]) -> QSeries:
    target = N - term.shift
    base_order = -((-(target + 1)) // term.dilation) - 1
    value = eval_classical(term.name, base_order, row_cap)
    if term.negate:
        value = series_negate_q(value)
    value = series_dilate(value, term.dilation)
    return series_scale(series_shift(value, term.shift), term.coeff)


def eval_classical_form(identity_id: str, N: int, row_cap: Optional[int] = None) -> QSeries:
    form = identity_entry(identity_id).classical_form
    if form is None:
        raise UnknownIdentityId(f"unknown id: {identity_id}.classical_form")
    total = QSeries(dict(form.constants), N)
    for term in form.terms:
        total = series_add(total, _classical_term(term, N, row_cap))
    for quotient in form.quotients:
        total = series_add(total, quotient.evaluate(N))
    return series_truncate(total, N)


_EVALUATORS: Dict[str, Callable[[str, int, Optional[int]], QSeries]] = {
    "double_sum": eval_double_sum,
    "hecke_form": eval_hecke_form,
    "appell_form": eval_appell_form,
    "classical_form": eval_classical_form,
}


def eval_form(identity_id: str, form: str, N: int, row_cap: Optional[int] = None) -> QSeries:
    if form not in _EVALUATORS:
        raise UnknownIdentityId(f"unknown id: {identity_id}.{form}")
    return _EVALUATORS[form](identity_id, N, row_cap)


def limit_sides(identity_id: str, N: int, row_cap: Optional[int] = None) -> Tuple[QSeries, QSeries]:
    """Both sides of the entry's Bailey-lemma limit, scaled to the normalization of the double sum."""
    limit = identity_entry(identity_id).limit
    if limit is None:
        raise UnknownIdentityId(f"unknown id: {identity_id} (no Bailey-lemma specialization)")
    working = N - limit.shift
    lhs, rhs = limit_identity(catalog_pair(limit.pair_id), limit.rho1, limit.rho2, limit.dilation, working,
                              starred=limit.starred, row_cap=row_cap)

    def normalize(series: QSeries) -> QSeries:
        return series_truncate(series_scale(series_shift(series, limit.shift), limit.coeff), N)

    return normalize(lhs), normalize(rhs)


def compare(item_id: str, label: str, left: QSeries, right: QSeries, N: int, started: float) -> VerificationRecord:
    """Record for one series comparison; ``started`` is a ``time.perf_counter`` stamp."""
    report = series_eq_upto(left, right, N)
    elapsed = (time.perf_counter() - started) * 1000
    if report.equal:
        return VerificationRecord(item_id, label, STATUS_EQUAL, N, elapsed_ms=elapsed)
    detail = MismatchDetail(report.exponent, Fraction(report.left), Fraction(report.right))
    logger.warning(f"{item_id} {label}: first mismatch at q^{report.exponent}")
    return VerificationRecord(item_id, label, STATUS_MISMATCH, N, detail, elapsed)


def error_record(item_id: str, label: str, N: int, error: Exception, started: float) -> VerificationRecord:
    elapsed = (time.perf_counter() - started) * 1000
    return VerificationRecord(item_id, label, STATUS_ERROR, N, elapsed_ms=elapsed,
                              detail=f"{type(error).__name__}: {error}")


def verify_identity(identity_id: str, N: int, row_cap: Optional[int] = None) -> List[VerificationRecord]:
    """Pairwise comparisons among every form the entry carries."""
    entry = identity_entry(identity_id)
    started = time.perf_counter()
    values: Dict[str, QSeries] = {}
    failures: Dict[str, Exception] = {}
    for form in entry.forms:
        try:
            values[form] = eval_form(identity_id, form, N, row_cap)
        except QSeriesError as e:
            logger.exception(f"Evaluating {identity_id}.{form} failed")
            failures[form] = e
    records = []
    for left, right in itertools.combinations(entry.forms, 2):
        label = f"{left}={right}"
        if left in failures or right in failures:
            records.append(error_record(identity_id, label, N, failures.get(left) or failures[right], started))
        else:
            records.append(compare(identity_id, label, values[left], values[right], N, started))
    return records
