"""Pochhammer products, theta functions and theta quotients at arguments +-q^k."""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Optional, Tuple

from qseries_types import DivisionByZeroTheta, InvalidSpec, NonTerminating, ZeroFactor
from series_core import (
    ONE, ZERO, Number, QSeries, evaluate_to_order, from_terms, monomial,
    series_invert, series_mul, series_pow, series_scale, series_shift, zero,
)

logger = logging.getLogger(__name__)

# Guard for head factors of an infinite product with nonpositive exponent.
MAX_HEAD_FACTORS = 100_000


@dataclass(frozen=True, order=True)
class ThetaArg:
    """The monomial ``sign * q^exp``."""
    sign: int
    exp: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidSpec(f"ThetaArg sign must be +1 or -1, got {self.sign}")

    @classmethod
    def q(cls, exp: int) -> 'ThetaArg':
        return cls(1, exp)

    @classmethod
    def minus_q(cls, exp: int) -> 'ThetaArg':
        return cls(-1, exp)

    def inverse(self) -> 'ThetaArg':
        return ThetaArg(self.sign, -self.exp)

    def negated(self) -> 'ThetaArg':
        return ThetaArg(-self.sign, self.exp)

    def shift(self, k: int) -> 'ThetaArg':
        """Multiply by q^k."""
        return ThetaArg(self.sign, self.exp + k)

    def __mul__(self, other: 'ThetaArg') -> 'ThetaArg':
        return ThetaArg(self.sign * other.sign, self.exp + other.exp)

    def __truediv__(self, other: 'ThetaArg') -> 'ThetaArg':
        return self * other.inverse()

    def __pow__(self, k: int) -> 'ThetaArg':
        return ThetaArg(self.sign if k % 2 else 1, self.exp * k)

    def dilate(self, d: int) -> 'ThetaArg':
        return ThetaArg(self.sign, self.exp * d)

    def as_series(self) -> QSeries:
        return monomial(self.sign, self.exp)

    def __str__(self) -> str:
        if self.exp == 0:
            return "1" if self.sign == 1 else "-1"
        body = "q" if self.exp == 1 else f"q^{self.exp}"
        return body if self.sign == 1 else f"-{body}"


def binom2(n: int) -> int:
    """n choose 2, valid for negative n."""
    return n * (n - 1) // 2


def _times_binomial(coeffs: Dict[int, Number], sign: int, exponent: int, limit: Optional[int]) -> Dict[int, Number]:
    """Multiply a coefficient dict by ``1 - sign*q^exponent``, dropping exponents above ``limit``."""
    result = dict(coeffs)
    for e, c in coeffs.items():
        target = e + exponent
        if limit is not None and target > limit:
            continue
        result[target] = result.get(target, 0) - sign * c
    return {e: c for e, c in result.items() if c}


def poch_finite(x: ThetaArg, m: int, n: int) -> QSeries:
    """Exact ``(x; q^m)_n`` as a Laurent polynomial."""
    if m < 1:
        raise InvalidSpec(f"Pochhammer step must be positive, got {m}")
    if n < 0:
        raise InvalidSpec(f"finite Pochhammer length must be nonnegative, got {n}")
    return _poch_finite_cached(x, m, n)


@lru_cache(maxsize=8192)
def _poch_finite_cached(x: ThetaArg, m: int, n: int) -> QSeries:
    coeffs: Dict[int, Number] = {0: 1}
    for k in range(n):
        coeffs = _times_binomial(coeffs, x.sign, x.exp + k * m, None)
    return from_terms(coeffs, None)


def poch_infinite(x: ThetaArg, m: int, N: int) -> QSeries:
    """``(x; q^m)_inf`` certified to order N.

    Factors with a nonpositive exponent are multiplied exactly; the remaining
    factors only matter up to ``N - low(head)``.
    """
    if m < 1:
        raise InvalidSpec(f"Pochhammer step must be positive, got {m}")
    if x.exp <= 0 and (-x.exp) % m == 0 and x.sign == 1:
        raise ZeroFactor(f"({x}; q^{m})_inf contains the factor 1 - q^0")
    return _poch_infinite_cached(x, m, N)


@lru_cache(maxsize=4096)
def _poch_infinite_cached(x: ThetaArg, m: int, N: int) -> QSeries:
    head_count = 0 if x.exp > 0 else (-x.exp) // m + 1
    if head_count > MAX_HEAD_FACTORS:
        raise NonTerminating(f"({x}; q^{m})_inf has {head_count} factors with nonpositive exponent")
    head = poch_finite(x, m, head_count)
    limit = N - head.min_exp
    coeffs: Dict[int, Number] = {0: 1}
    exponent = x.exp + head_count * m
    while exponent <= limit:
        coeffs = _times_binomial(coeffs, x.sign, exponent, limit)
        exponent += m
    tail = from_terms(coeffs, limit)
    return series_mul(head, tail)


def _theta_zero(x: ThetaArg, m: int) -> bool:
    return x.sign == 1 and x.exp % m == 0


@lru_cache(maxsize=4096)
def _theta_reduced(sign: int, r: int, m: int, N: int) -> QSeries:
    """Bilateral sum for ``j(sign*q^r, q^m)`` with ``0 <= r < m``."""
    coeffs: Dict[int, int] = {}
    n = 0
    while True:
        exponent = m * binom2(n) + r * n
        if exponent > N:
            break
        coeffs[exponent] = coeffs.get(exponent, 0) + (-sign) ** n
        n += 1
    n = -1
    while True:
        exponent = m * binom2(n) + r * n
        if exponent > N:
            break
        coeffs[exponent] = coeffs.get(exponent, 0) + (-sign) ** (-n)
        n -= 1
    return from_terms(coeffs, N)


def theta_j(x: ThetaArg, m: int, N: int) -> QSeries:
    """``j(x, q^m)`` to order N; the exponent of x is first reduced into [0, m)."""
    if m < 1:
        raise InvalidSpec(f"theta modulus must be positive, got {m}")
    if _theta_zero(x, m):
        return ZERO
    r = x.exp % m
    n0 = (x.exp - r) // m
    # j(q^{n0 m} x', q^m) = (-1)^n0 q^{-m C(n0,2)} x'^{-n0} j(x', q^m)
    offset = -m * binom2(n0) - r * n0
    inner = _theta_reduced(x.sign, r, m, N - offset)
    factor = (-x.sign) ** abs(n0)
    return series_scale(series_shift(inner, offset), factor)


def theta_j_product(x: ThetaArg, m: int, N: int) -> QSeries:
    """Triple-product form ``(x)_inf (q^m/x)_inf (q^m;q^m)_inf``; cross-check for :func:`theta_j`."""
    if m < 1:
        raise InvalidSpec(f"theta modulus must be positive, got {m}")
    if _theta_zero(x, m):
        return ZERO
    partner = ThetaArg(x.sign, m - x.exp)

    def build(working: int) -> QSeries:
        product = series_mul(poch_infinite(x, m, working), poch_infinite(partner, m, working))
        return series_mul(product, poch_infinite(ThetaArg(1, m), m, working))

    return evaluate_to_order(build, N)


class JKind(Enum):
    PLAIN = "J"
    BARRED = "Jbar"
    INDEX = "Jm"


def j_symbol(kind: JKind, a: int, m: int, N: int) -> QSeries:
    """``J_{a,m}``, ``Jbar_{a,m}`` or, for :attr:`JKind.INDEX`, ``J_m = J_{m,3m}`` (``a`` unused)."""
    if m < 1:
        raise InvalidSpec(f"J-symbol modulus must be positive, got {m}")
    if kind is JKind.INDEX:
        return poch_infinite(ThetaArg(1, m), m, N)
    sign = -1 if kind is JKind.BARRED else 1
    return theta_j(ThetaArg(sign, a), m, N)


@dataclass(frozen=True)
class ThetaFactor:
    """``j(arg, q^modulus) ** power``."""
    arg: ThetaArg
    modulus: int
    power: int = 1

    def __post_init__(self):
        if self.modulus < 1 or self.power < 1:
            raise InvalidSpec(f"invalid theta factor modulus={self.modulus} power={self.power}")

    @classmethod
    def index(cls, m: int, power: int = 1) -> 'ThetaFactor':
        return cls(ThetaArg(1, m), 3 * m, power)

    @property
    def is_zero(self) -> bool:
        return _theta_zero(self.arg, self.modulus)

    def dilate(self, d: int) -> 'ThetaFactor':
        return ThetaFactor(self.arg.dilate(d), self.modulus * d, self.power)

    def evaluate(self, N: int) -> QSeries:
        return series_pow(theta_j(self.arg, self.modulus, N), self.power)

    def __str__(self) -> str:
        text = f"j({self.arg}, q^{self.modulus})"
        return text if self.power == 1 else f"{text}^{self.power}"


@dataclass(frozen=True)
class ThetaQuotient:
    """``coeff * prefactor * prod(numerators) / prod(denominators)``."""
    coeff: Fraction = Fraction(1)
    prefactor: ThetaArg = field(default_factory=lambda: ThetaArg(1, 0))
    numerators: Tuple[ThetaFactor, ...] = ()
    denominators: Tuple[ThetaFactor, ...] = ()

    def times(self, other: 'ThetaQuotient') -> 'ThetaQuotient':
        return ThetaQuotient(
            Fraction(self.coeff) * Fraction(other.coeff),
            self.prefactor * other.prefactor,
            self.numerators + other.numerators,
            self.denominators + other.denominators,
        )

    def scaled(self, coeff: Number = 1, prefactor: Optional[ThetaArg] = None) -> 'ThetaQuotient':
        return ThetaQuotient(
            Fraction(self.coeff) * Fraction(coeff),
            self.prefactor * (prefactor or ThetaArg(1, 0)),
            self.numerators,
            self.denominators,
        )

    def dilate(self, d: int) -> 'ThetaQuotient':
        """Substitute q -> q^d."""
        return ThetaQuotient(
            self.coeff,
            self.prefactor.dilate(d),
            tuple(f.dilate(d) for f in self.numerators),
            tuple(f.dilate(d) for f in self.denominators),
        )

    def evaluate(self, N: int) -> QSeries:
        for factor in self.denominators:
            if factor.is_zero:
                raise DivisionByZeroTheta(f"denominator {factor} vanishes identically")
        if self.coeff == 0 or any(factor.is_zero for factor in self.numerators):
            return zero(N)

        def build(working: int) -> QSeries:
            numerator = ONE
            for factor in self.numerators:
                numerator = series_mul(numerator, factor.evaluate(working))
            denominator = ONE
            for factor in self.denominators:
                denominator = series_mul(denominator, factor.evaluate(working))
            value = series_mul(numerator, series_invert(denominator, working))
            value = series_shift(value, self.prefactor.exp)
            return series_scale(value, Fraction(self.coeff) * self.prefactor.sign)

        return evaluate_to_order(build, N)

    def __str__(self) -> str:
        head = f"{self.coeff}*{self.prefactor}"
        num = " ".join(str(f) for f in self.numerators) or "1"
        den = " ".join(str(f) for f in self.denominators) or "1"
        return f"{head} * {num} / {den}"


_SYMBOL = re.compile(r"^J(?P<bar>b?)(?P<a>-?\d+)(?:,(?P<m>\d+))?(?:\^(?P<power>\d+))?$")


def parse_theta_factor(token: str) -> ThetaFactor:
    """Parse ``J8`` (J_8), ``J7,16`` (J_{7,16}), ``Jb4,24`` (Jbar_{4,24}), with optional ``^k``."""
    match = _SYMBOL.match(token)
    if not match:
        raise InvalidSpec(f"cannot parse J-symbol token {token!r}")
    a = int(match.group("a"))
    power = int(match.group("power") or 1)
    if match.group("m") is None:
        if match.group("bar"):
            raise InvalidSpec(f"barred symbol needs a modulus: {token!r}")
        return ThetaFactor.index(a, power)
    sign = -1 if match.group("bar") else 1
    return ThetaFactor(ThetaArg(sign, a), int(match.group("m")), power)


def parse_theta_quotient(text: str, coeff: Number = 1, prefactor: Optional[ThetaArg] = None) -> ThetaQuotient:
    """Parse ``"J8 J12 J7,16 / J24 J1"``; an empty side means 1."""
    numerator_text, _, denominator_text = text.partition("/")
    return ThetaQuotient(
        Fraction(coeff),
        prefactor or ThetaArg(1, 0),
        tuple(parse_theta_factor(tok) for tok in numerator_text.split()),
        tuple(parse_theta_factor(tok) for tok in denominator_text.split()),
    )


def evaluate_quotients(quotients: Iterable[ThetaQuotient], N: int) -> QSeries:
    total = zero(N)
    for quotient in quotients:
        total = total + quotient.evaluate(N)
    return total
