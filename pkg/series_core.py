"""Exact truncated Laurent series in q over the rationals.

Every value in the engine is a :class:`QSeries`: a finite set of exact
coefficients together with the order up to which those coefficients are
certified.  A series whose ``order`` is ``None`` is an exact Laurent
polynomial (all omitted coefficients are known to be zero).

Precision is propagated pessimistically.  Comparing two series beyond the
order both of them certify raises :class:`InsufficientPrecision` rather than
silently truncating.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

from qseries_types import InsufficientPrecision, InvalidSpec, ZeroLeadingTerm, format_rational, parse_rational

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


def _normalize(value: Number) -> Number:
    """Keep integral coefficients as ints so the common case stays fast."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def _divide(value: Number, divisor: Number) -> Number:
    if divisor == 1:
        return value
    if divisor == -1:
        return -value
    return _normalize(Fraction(value) / divisor)


class QSeries:
    """Truncated Laurent series ``sum c_e q^e`` with exact rational coefficients."""

    __slots__ = ("_coeffs", "_order")

    def __init__(self, coeffs: Optional[Mapping[int, Number]] = None, order: Optional[int] = None):
        cleaned: Dict[int, Number] = {}
        for exponent, value in (coeffs or {}).items():
            exponent = int(exponent)
            if order is not None and exponent > order:
                continue
            value = _normalize(Fraction(value))
            if value:
                cleaned[exponent] = value
        self._coeffs = dict(sorted(cleaned.items()))
        self._order = None if order is None else int(order)

    @classmethod
    def _raw(cls, coeffs: Dict[int, Number], order: Optional[int]) -> 'QSeries':
        """Build from already-normalized coefficients, dropping zeros and terms past ``order``."""
        series = cls.__new__(cls)
        if order is None:
            items = sorted((e, c) for e, c in coeffs.items() if c)
        else:
            items = sorted((e, c) for e, c in coeffs.items() if c and e <= order)
        series._coeffs = dict(items)
        series._order = order
        return series

    @property
    def order(self) -> Optional[int]:
        return self._order

    @property
    def is_exact(self) -> bool:
        return self._order is None

    @property
    def is_zero(self) -> bool:
        """True when no nonzero coefficient is known (the series may still be a truncation)."""
        return not self._coeffs

    @property
    def min_exp(self) -> Optional[int]:
        """Lowest stored exponent; ``order + 1`` for a truncated zero, None for the exact zero."""
        if self._coeffs:
            return next(iter(self._coeffs))
        if self._order is None:
            return None
        return self._order + 1

    @property
    def max_exp(self) -> Optional[int]:
        if not self._coeffs:
            return None
        return next(reversed(self._coeffs))

    def items(self) -> Iterator[Tuple[int, Number]]:
        return iter(self._coeffs.items())

    def __getitem__(self, exponent: int) -> Number:
        if self._order is not None and exponent > self._order:
            raise InsufficientPrecision(
                f"coefficient of q^{exponent} requested but series is certified only to order {self._order}"
            )
        return self._coeffs.get(exponent, 0)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._order == other._order and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self._order, tuple(self._coeffs.items())))

    def __repr__(self) -> str:
        suffix = "exact" if self._order is None else f"order={self._order}"
        return f"QSeries({render_series(self)}, {suffix})"

    def __str__(self) -> str:
        return render_series(self)

    def __add__(self, other):
        return series_add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return series_sub(self, _coerce(other))

    def __rsub__(self, other):
        return series_sub(_coerce(other), self)

    def __neg__(self):
        return series_neg(self)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def invert(self, N: int) -> 'QSeries':
        return series_invert(self, N)

    def to_dict(self) -> dict:
        return {
            "min_exp": self.min_exp,
            "order": self._order,
            "coeffs": [[e, format_rational(c)] for e, c in self._coeffs.items()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'QSeries':
        coeffs = {int(e): parse_rational(text) for e, text in data.get("coeffs", [])}
        return cls(coeffs, data.get("order"))


def _coerce(value) -> QSeries:
    if isinstance(value, QSeries):
        return value
    return constant(value)


def _order_or_inf(series: QSeries) -> float:
    return math.inf if series.order is None else series.order


def _low(series: QSeries) -> float:
    """Lower bound for the exponent of any possibly nonzero coefficient."""
    if series._coeffs:
        return next(iter(series._coeffs))
    return math.inf if series.order is None else series.order + 1


def _finite(order: float) -> Optional[int]:
    return None if order == math.inf else int(order)


ZERO = QSeries._raw({}, None)
ONE = QSeries._raw({0: 1}, None)


def constant(value: Number, order: Optional[int] = None) -> QSeries:
    return QSeries._raw({0: _normalize(Fraction(value))}, order)


def monomial(coefficient: Number, exponent: int, order: Optional[int] = None) -> QSeries:
    """The exact series ``coefficient * q^exponent``."""
    return QSeries._raw({exponent: _normalize(Fraction(coefficient))}, order)


def zero(order: Optional[int] = None) -> QSeries:
    return QSeries._raw({}, order)


def from_terms(coeffs: Dict[int, Number], order: Optional[int] = None) -> QSeries:
    """Wrap coefficients that are already ints or reduced Fractions (no validation pass)."""
    return QSeries._raw(coeffs, order)


def series_add(a: QSeries, b: QSeries) -> QSeries:
    """Coefficientwise sum; certified to the smaller of the two orders."""
    order = _finite(min(_order_or_inf(a), _order_or_inf(b)))
    result = dict(a._coeffs)
    for exponent, value in b._coeffs.items():
        result[exponent] = result.get(exponent, 0) + value
    return QSeries._raw(result, order)


def series_neg(a: QSeries) -> QSeries:
    return QSeries._raw({e: -c for e, c in a._coeffs.items()}, a.order)


def series_sub(a: QSeries, b: QSeries) -> QSeries:
    return series_add(a, series_neg(b))


def series_scale(a: QSeries, factor: Number) -> QSeries:
    factor = _normalize(Fraction(factor))
    if factor == 0:
        return zero(a.order)
    return QSeries._raw({e: _normalize(c * factor) for e, c in a._coeffs.items()}, a.order)


def series_shift(a: QSeries, k: int) -> QSeries:
    """Multiply by q^k."""
    order = None if a.order is None else a.order + k
    return QSeries._raw({e + k: c for e, c in a._coeffs.items()}, order)


def series_truncate(a: QSeries, N: int) -> QSeries:
    order = N if a.order is None else min(a.order, N)
    return QSeries._raw(a._coeffs, order)


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product, certified to ``min(a.order + low(b), b.order + low(a))``."""
    if (not a._coeffs and a.order is None) or (not b._coeffs and b.order is None):
        return ZERO
    bound = min(_order_or_inf(a) + _low(b), _order_or_inf(b) + _low(a))
    order = _finite(bound)
    result: Dict[int, Number] = {}
    b_items = list(b._coeffs.items())
    for ea, ca in a._coeffs.items():
        limit = bound - ea
        for eb, cb in b_items:
            if eb > limit:
                break
            exponent = ea + eb
            result[exponent] = result.get(exponent, 0) + ca * cb
    return QSeries._raw({e: _normalize(c) for e, c in result.items()}, order)


def series_pow(a: QSeries, k: int) -> QSeries:
    if k < 0:
        raise InvalidSpec(f"series_pow needs a nonnegative exponent, got {k}")
    result = ONE
    for _ in range(k):
        result = series_mul(result, a)
    return result


def series_invert(a: QSeries, N: int) -> QSeries:
    """Multiplicative inverse certified to order ``N`` (or less if ``a`` is too short)."""
    if not a._coeffs:
        raise ZeroLeadingTerm(f"cannot invert a series that is zero to order {a.order}")
    items = list(a._coeffs.items())
    v, lead = items[0]
    order = N if a.order is None else min(N, a.order - 2 * v)
    count = order + v
    if count < 0:
        return zero(order)
    unit = [(e - v, c) for e, c in items[1:] if e - v <= count]
    inverse = [0] * (count + 1)
    inverse[0] = _divide(1, lead)
    for k in range(1, count + 1):
        total = 0
        for i, c in unit:
            if i > k:
                break
            total += c * inverse[k - i]
        inverse[k] = _divide(-total, lead)
    return QSeries._raw({k - v: _normalize(c) for k, c in enumerate(inverse)}, order)


def series_divide(a: QSeries, b: QSeries, N: int) -> QSeries:
    """``a / b`` to order ``N`` as far as the inputs certify it."""
    inverse = series_invert(b, N - int(min(_low(a), N)))
    return series_truncate(series_mul(a, inverse), N)


def series_dilate(a: QSeries, m: int) -> QSeries:
    """Substitute q -> q^m; gaps below the new order are certified zero."""
    if m < 1:
        raise InvalidSpec(f"dilation factor must be positive, got {m}")
    order = None if a.order is None else m * a.order + (m - 1)
    return QSeries._raw({m * e: c for e, c in a._coeffs.items()}, order)


def series_negate_q(a: QSeries) -> QSeries:
    """Substitute q -> -q."""
    return QSeries._raw({e: (-c if e % 2 else c) for e, c in a._coeffs.items()}, a.order)


def series_sum(terms: Iterable[QSeries]) -> QSeries:
    total = ZERO
    for term in terms:
        total = series_add(total, term)
    return total


@dataclass(frozen=True)
class Equal:
    """Both series agree through ``order``."""
    order: int

    @property
    def equal(self) -> bool:
        return True


@dataclass(frozen=True)
class FirstMismatch:
    """Lowest exponent at which two series differ."""
    exponent: int
    left: Number
    right: Number

    @property
    def equal(self) -> bool:
        return False


EqualityReport = Union[Equal, FirstMismatch]


def series_eq_upto(a: QSeries, b: QSeries, N: int) -> EqualityReport:
    """Compare coefficients of every exponent <= N."""
    for side, series in (("left", a), ("right", b)):
        if series.order is not None and series.order < N:
            raise InsufficientPrecision(
                f"{side} operand is certified to order {series.order}, comparison needs {N}"
            )
    exponents = sorted({e for e in a._coeffs if e <= N} | {e for e in b._coeffs if e <= N})
    for exponent in exponents:
        left = a._coeffs.get(exponent, 0)
        right = b._coeffs.get(exponent, 0)
        if left != right:
            return FirstMismatch(exponent, left, right)
    return Equal(N)


def evaluate_to_order(build: Callable[[int], QSeries], N: int, max_rounds: int = 6) -> QSeries:
    """Run ``build(working_order)`` with growing headroom until the result certifies order N.

    Quotients by series with negative valuation lose precision; the shortfall
    of one attempt is added to the working order of the next.
    """
    working = N
    for attempt in range(max_rounds):
        result = build(working)
        if result.order is None or result.order >= N:
            return series_truncate(result, N)
        shortfall = N - result.order
        logger.debug(f"Evaluation short by {shortfall} at working order {working} (attempt {attempt + 1})")
        working += shortfall
    raise InsufficientPrecision(f"could not reach order {N} within {max_rounds} rounds (last working order {working})")


def _render_coefficient(value: Number) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_series(series: QSeries) -> str:
    """Text form: ``c*q^e`` terms joined by `` + `` / `` - ``."""
    if not series._coeffs:
        return "0"
    parts = []
    for index, (exponent, value) in enumerate(series._coeffs.items()):
        magnitude = abs(Fraction(value))
        if exponent == 0:
            body = _render_coefficient(magnitude)
        else:
            power = "q" if exponent == 1 else f"q^{exponent}"
            body = power if magnitude == 1 else f"{_render_coefficient(magnitude)}*{power}"
        if index == 0:
            parts.append(f"-{body}" if value < 0 else body)
        else:
            parts.append(f" - {body}" if value < 0 else f" + {body}")
    return "".join(parts)
