"""Bailey pairs as lazily evaluated sequence pairs, and the machinery acting on them.

A pair relative to ``(a, q^s)`` satisfies

    beta_n = sum_k alpha_k / ((q^s; q^s)_{n-k} (a q^s; q^s)_{n+k})

with ``a = 1`` (:attr:`PairBase.ONE`) or ``a = q^s`` (:attr:`PairBase.Q`).
Every sequence is a map ``(n, N) -> QSeries`` certified to order ``N``.
"""

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

from hecke_appell import default_row_cap
from qproducts import ThetaArg, binom2, poch_finite, poch_infinite
from qseries_types import (
    InvalidSpec, NonConvergent, NonGenericRho, PreconditionFailed, StabilizationFailure, UnknownPairId,
)
from series_core import (
    ONE, Equal, Number, QSeries, constant, evaluate_to_order, from_terms, monomial, series_add,
    series_dilate, series_divide, series_eq_upto, series_mul, series_neg, series_scale, series_shift,
    series_sub, series_truncate, zero,
)

logger = logging.getLogger(__name__)

PRECONDITION_ORDER = 30
CONVERGENCE_PATIENCE = 3


class PairBase(Enum):
    ONE = 0
    Q = 1


class SeriesSequence:
    """Lazy sequence ``n -> QSeries``; values are memoized per index at the best order seen."""

    def __init__(self, fn: Callable[[int, int], QSeries], label: str = ""):
        self._fn = fn
        self.label = label
        self._memo: Dict[int, QSeries] = {}
        self._lock = threading.Lock()

    def __call__(self, n: int, N: int) -> QSeries:
        if n < 0:
            return zero(N)
        cached = self._memo.get(n)
        if cached is not None and (cached.order is None or cached.order >= N):
            return cached if cached.order is None else series_truncate(cached, N)
        value = self._fn(n, N)
        with self._lock:
            previous = self._memo.get(n)
            if previous is None or (previous.order is not None and (value.order is None or value.order > previous.order)):
                self._memo[n] = value
        return value if value.order is None else series_truncate(value, N)

    def __repr__(self) -> str:
        return f"SeriesSequence({self.label})"


@dataclass(frozen=True)
class BaileyPair:
    base: PairBase
    alpha: SeriesSequence
    beta: SeriesSequence
    provenance: str
    step: int = 1

    @property
    def base_exp(self) -> int:
        """Exponent of ``a``."""
        return self.step * self.base.value


@dataclass(frozen=True)
class SequenceMismatch:
    """First differing coefficient between two sequences."""
    component: str
    index: int
    exponent: int
    left: Number
    right: Number

    @property
    def equal(self) -> bool:
        return False


SequenceReport = Union[Equal, SequenceMismatch]


def _poch(sign: int, exp: int, step: int, n: int) -> QSeries:
    return poch_finite(ThetaArg(sign, exp), step, n)


def _product(*factors: QSeries) -> QSeries:
    result = ONE
    for factor in factors:
        result = series_mul(result, factor)
    return result


def _low(series: QSeries) -> int:
    return series.min_exp if series.min_exp is not None else 0


def _weighted(weight: QSeries, value: Callable[[int], QSeries], den: QSeries, N: int) -> QSeries:
    """``weight * value / den`` to order N, where ``weight`` and ``den`` are exact."""
    if weight.is_zero and weight.is_exact:
        return zero(N)
    shift = _low(weight)

    def build(working: int) -> QSeries:
        return series_divide(series_mul(weight, value(working - shift)), den, working)

    return evaluate_to_order(build, N)


def pair_beta_from_alpha(alpha: Callable[[int, int], QSeries], base: PairBase, n_max: int, N: int,
                         step: int = 1) -> List[QSeries]:
    """beta_0..beta_{n_max} from the pair relation."""
    if n_max < 0:
        raise InvalidSpec(f"n_max must be nonnegative, got {n_max}")
    a_exp = step * base.value
    result = []
    for n in range(n_max + 1):
        total = zero(N)
        for k in range(n + 1):
            den = series_mul(_poch(1, step, step, n - k), _poch(1, a_exp + step, step, n + k))
            total = series_add(total, series_divide(alpha(k, N), den, N))
        result.append(total)
    return result


def pair_alpha_from_beta(beta: Callable[[int, int], QSeries], base: PairBase, n_max: int, N: int,
                         step: int = 1) -> List[QSeries]:
    """alpha_0..alpha_{n_max} from the inverted pair relation."""
    if n_max < 0:
        raise InvalidSpec(f"n_max must be nonnegative, got {n_max}")
    a_exp = step * base.value
    result = [series_truncate(beta(0, N), N)]
    for n in range(1, n_max + 1):
        total = zero(N)
        for j in range(n + 1):
            weight = series_shift(_poch(1, a_exp + step, step, n + j - 1), step * binom2(n - j))
            if (n - j) % 2:
                weight = series_neg(weight)
            term = series_divide(series_mul(weight, beta(j, N)), _poch(1, step, step, n - j), N)
            total = series_add(total, term)
        factor = from_terms({0: 1, a_exp + 2 * step * n: -1}, None)
        result.append(series_truncate(series_mul(factor, total), N))
    return result


def _compare_sequences(component: str, left: Callable[[int, int], QSeries], right: Callable[[int, int], QSeries],
                       n_max: int, N: int) -> SequenceReport:
    for n in range(n_max + 1):
        report = series_eq_upto(left(n, N), right(n, N), N)
        if not report.equal:
            return SequenceMismatch(component, n, report.exponent, report.left, report.right)
    return Equal(N)


def verify_pair(pair: BaileyPair, n_max: int, N: int) -> SequenceReport:
    """Check the stored beta against the pair relation applied to alpha."""
    computed = pair_beta_from_alpha(pair.alpha, pair.base, n_max, N, pair.step)
    report = _compare_sequences("beta", pair.beta, lambda n, order: computed[n], n_max, N)
    if not report.equal:
        logger.debug(f"Pair {pair.provenance} fails the pair relation at n={report.index}, q^{report.exponent}")
    return report


def compare_pairs(left: BaileyPair, right: BaileyPair, n_max: int, N: int) -> SequenceReport:
    if left.base != right.base or left.step != right.step:
        raise InvalidSpec(
            f"cannot compare pairs relative to different bases: {left.provenance} vs {right.provenance}"
        )
    report = _compare_sequences("alpha", left.alpha, right.alpha, n_max, N)
    if not report.equal:
        return report
    return _compare_sequences("beta", left.beta, right.beta, n_max, N)


def make_pair(base: PairBase, alpha: Callable[[int, int], QSeries], beta: Callable[[int, int], QSeries],
              provenance: str, step: int = 1) -> BaileyPair:
    return BaileyPair(
        base,
        SeriesSequence(alpha, f"{provenance}.alpha"),
        SeriesSequence(beta, f"{provenance}.beta"),
        provenance,
        step,
    )


def scale_pair(pair: BaileyPair, factor: Number) -> BaileyPair:
    return make_pair(
        pair.base,
        lambda n, N: series_scale(pair.alpha(n, N), factor),
        lambda n, N: series_scale(pair.beta(n, N), factor),
        f"{factor}*{pair.provenance}",
        pair.step,
    )


def _undilated_order(N: int, m: int) -> int:
    """Smallest order o with ``m*o + m - 1 >= N``."""
    return -((-(N + 1)) // m) - 1


def dilate_pair(pair: BaileyPair, m: int) -> BaileyPair:
    """Substitute q -> q^m in both sequences; the base step is multiplied by m."""
    if m == 1:
        return pair

    def dilated(sequence: SeriesSequence) -> Callable[[int, int], QSeries]:
        return lambda n, N: series_truncate(series_dilate(sequence(n, _undilated_order(N, m)), m), N)

    return make_pair(pair.base, dilated(pair.alpha), dilated(pair.beta), f"{pair.provenance}(q^{m})", pair.step * m)


class RhoKind(Enum):
    FINITE = "finite"
    INFINITY = "infinity"
    SQRT_PAIR = "sqrt_pair"


@dataclass(frozen=True)
class RhoParam:
    kind: RhoKind
    arg: Optional[ThetaArg] = None

    @classmethod
    def finite(cls, arg: ThetaArg) -> 'RhoParam':
        return cls(RhoKind.FINITE, arg)

    @classmethod
    def infinity(cls) -> 'RhoParam':
        return cls(RhoKind.INFINITY)

    @classmethod
    def sqrt_pair(cls) -> 'RhoParam':
        """The joint choice (rho1, rho2) = (sqrt(q), -sqrt(q)); must fill both slots."""
        return cls(RhoKind.SQRT_PAIR)

    def __str__(self) -> str:
        if self.kind is RhoKind.FINITE:
            return str(self.arg)
        return "inf" if self.kind is RhoKind.INFINITY else "sqrt"


INF = RhoParam.infinity()
SQRT = RhoParam.sqrt_pair()


def _check_poch_generic(arg: ThetaArg, step: int, what: str) -> None:
    if arg.sign == 1 and arg.exp <= 0 and arg.exp % step == 0:
        raise NonGenericRho(f"{what} = ({arg}; q^{step}) has the factor 1 - q^0")


class LemmaWeights:
    """Specialized Bailey-lemma weights for a base ``a = q^base_exp`` and q-step ``S``.

    ``weight(n)`` is ``(rho1)_n (rho2)_n (aq/rho1 rho2)^n``, ``den(n)`` is
    ``(aq/rho1)_n (aq/rho2)_n`` and ``u(m)`` is ``(aq/rho1 rho2)_m``, all in the
    limits the infinite and square-root choices require.
    """

    def __init__(self, base_exp: int, step: int, rho1: RhoParam, rho2: RhoParam):
        if (rho1.kind is RhoKind.SQRT_PAIR) != (rho2.kind is RhoKind.SQRT_PAIR):
            raise InvalidSpec("the square-root specialization fills both rho slots jointly")
        if rho1.kind is RhoKind.INFINITY and rho2.kind is RhoKind.FINITE:
            rho1, rho2 = rho2, rho1
        self.base_exp = base_exp
        self.step = step
        self.rho1 = rho1
        self.rho2 = rho2
        S = step
        self.aq = ThetaArg(1, base_exp + S)
        if rho1.kind is RhoKind.SQRT_PAIR:
            self.mode = "sqrt"
        elif rho1.kind is RhoKind.INFINITY:
            self.mode = "inf"
        elif rho2.kind is RhoKind.INFINITY:
            self.mode = "one"
            self.c1 = self.aq / rho1.arg
            _check_poch_generic(self.c1, S, "aq/rho1")
        else:
            self.mode = "two"
            self.c1 = self.aq / rho1.arg
            self.c2 = self.aq / rho2.arg
            self.c12 = self.aq / (rho1.arg * rho2.arg)
            _check_poch_generic(self.c1, S, "aq/rho1")
            _check_poch_generic(self.c2, S, "aq/rho2")

    def __str__(self) -> str:
        return f"({self.rho1}, {self.rho2}) step {self.step}"

    def weight(self, n: int) -> QSeries:
        S, b = self.step, self.base_exp
        if self.mode == "inf":
            # (rho1)_n (rho2)_n (aq/rho1 rho2)^n -> q^{2 S C(n,2)} (aq)^n
            return monomial(1, 2 * S * binom2(n) + n * (b + S))
        if self.mode == "sqrt":
            value = series_shift(_poch(1, S, 2 * S, n), b * n)
            return series_neg(value) if n % 2 else value
        if self.mode == "one":
            c = self.c1
            value = series_shift(poch_finite(self.rho1.arg, S, n), S * binom2(n) + n * c.exp)
            sign = (-1) ** n * (c.sign ** n)
            return series_scale(value, sign)
        value = series_mul(poch_finite(self.rho1.arg, S, n), poch_finite(self.rho2.arg, S, n))
        c = self.c12
        return series_scale(series_shift(value, n * c.exp), c.sign ** n)

    def den(self, n: int) -> QSeries:
        S, b = self.step, self.base_exp
        if self.mode == "inf":
            return ONE
        if self.mode == "sqrt":
            return _poch(1, 2 * b + S, 2 * S, n)
        if self.mode == "one":
            return poch_finite(self.c1, S, n)
        return series_mul(poch_finite(self.c1, S, n), poch_finite(self.c2, S, n))

    def u(self, m: int) -> QSeries:
        S, b = self.step, self.base_exp
        if self.mode in ("inf", "one"):
            return ONE
        if self.mode == "sqrt":
            return _poch(-1, b, S, m)
        return poch_finite(self.c12, S, m)

    def prefactor(self, N: int) -> QSeries:
        """``(aq/rho1)_inf (aq/rho2)_inf / ((aq)_inf (aq/rho1 rho2)_inf)`` to order N."""
        S, b = self.step, self.base_exp
        if self.mode == "two":
            _check_poch_generic(self.c12, S, "aq/(rho1 rho2)")

        def build(working: int) -> QSeries:
            denominator = poch_infinite(self.aq, S, working)
            numerator = ONE
            if self.mode == "sqrt":
                numerator = poch_infinite(ThetaArg(1, 2 * b + S), 2 * S, working)
                denominator = series_mul(denominator, poch_infinite(ThetaArg(-1, b), S, working))
            elif self.mode == "one":
                numerator = poch_infinite(self.c1, S, working)
            elif self.mode == "two":
                numerator = series_mul(poch_infinite(self.c1, S, working), poch_infinite(self.c2, S, working))
                denominator = series_mul(denominator, poch_infinite(self.c12, S, working))
            return series_divide(numerator, denominator, working)

        return evaluate_to_order(build, N)


def bailey_step(pair: BaileyPair, rho1: RhoParam, rho2: RhoParam) -> BaileyPair:
    """Bailey lemma: the pair ``(alpha', beta')`` for the given rho specialization."""
    weights = LemmaWeights(pair.base_exp, pair.step, rho1, rho2)
    S = pair.step

    def alpha(n: int, N: int) -> QSeries:
        return _weighted(weights.weight(n), lambda order: pair.alpha(n, order), weights.den(n), N)

    def beta(n: int, N: int) -> QSeries:
        def build(working: int) -> QSeries:
            total = zero(working)
            for k in range(n + 1):
                kernel = series_mul(weights.weight(k), weights.u(n - k))
                term = _weighted(kernel, lambda order, k=k: pair.beta(k, order), _poch(1, S, S, n - k), working)
                total = series_add(total, term)
            return series_divide(total, weights.den(n), working)

        return evaluate_to_order(build, N)

    return make_pair(pair.base, alpha, beta, f"step({pair.provenance}; {rho1}, {rho2})", pair.step)


@dataclass(frozen=True)
class StarredSum:
    """Even and odd stabilized partial sums and their average."""
    value: QSeries
    even: QSeries
    odd: QSeries
    rows: int


def _settled(values: List[QSeries]) -> bool:
    return len(values) >= 3 and values[-1] == values[-2] == values[-3]


def starred_sum(term: Callable[[int], QSeries], N: int, row_cap: Optional[int] = None, start: int = 0) -> StarredSum:
    """Average of the even and odd partial-sum limits of ``sum_{n >= start} term(n)``.

    Each subsequence is taken as settled once three consecutive members agree
    through order N.
    """
    cap = row_cap or default_row_cap(N)
    partial = zero(N)
    evens: List[QSeries] = []
    odds: List[QSeries] = []
    for n in range(start, start + cap + 1):
        partial = series_add(partial, series_truncate(term(n), N))
        (evens if n % 2 == 0 else odds).append(partial)
        if _settled(evens) and _settled(odds):
            value = series_scale(series_add(evens[-1], odds[-1]), Fraction(1, 2))
            return StarredSum(value, evens[-1], odds[-1], n - start + 1)
    raise StabilizationFailure(f"even/odd partial sums did not settle within {cap} rows at order {N}")


def convergent_sum(term: Callable[[int], QSeries], N: int, row_cap: Optional[int] = None, start: int = 0,
                   label: str = "sum") -> QSeries:
    """``sum_{n >= start} term(n)`` to order N, stopping once several consecutive terms vanish through N."""
    cap = row_cap or default_row_cap(N)
    total = zero(N)
    quiet = 0
    for n in range(start, start + cap + 1):
        value = series_truncate(term(n), N)
        total = series_add(total, value)
        quiet = quiet + 1 if value.is_zero else 0
        if quiet >= CONVERGENCE_PATIENCE and n - start >= CONVERGENCE_PATIENCE:
            return total
    raise NonConvergent(f"{label}: terms still reach order {N} after {cap} rows")


def limit_identity(pair: BaileyPair, rho1: RhoParam, rho2: RhoParam, dilation: int, N: int,
                   starred: bool = False, row_cap: Optional[int] = None) -> Tuple[QSeries, QSeries]:
    """Both sides of the limiting form of the Bailey lemma, after q -> q^dilation.

    The rho parameters are literal in the dilated variable.
    """
    dilated = dilate_pair(pair, dilation)
    weights = LemmaWeights(dilated.base_exp, dilated.step, rho1, rho2)
    label = f"{pair.provenance} at {weights}"

    def lhs_term(n: int) -> QSeries:
        return _weighted(weights.weight(n), lambda order: dilated.beta(n, order), ONE, N)

    if starred:
        lhs = starred_sum(lhs_term, N, row_cap).value
    else:
        lhs = convergent_sum(lhs_term, N, row_cap, label=f"{label} lhs")

    def build(working: int) -> QSeries:
        def rhs_term(n: int) -> QSeries:
            return _weighted(weights.weight(n), lambda order: dilated.alpha(n, order), weights.den(n), working)

        total = convergent_sum(rhs_term, working, row_cap, label=f"{label} rhs")
        return series_mul(weights.prefactor(working), total)

    rhs = evaluate_to_order(build, N)
    logger.debug(f"Evaluated limiting form for {label} to order {N}")
    return lhs, rhs


def _require_constant(pair: BaileyPair, component: str, n: int, value: QSeries, theorem: str) -> None:
    sequence = pair.alpha if component == "alpha" else pair.beta
    report = series_eq_upto(sequence(n, PRECONDITION_ORDER), value, PRECONDITION_ORDER)
    if not report.equal:
        raise PreconditionFailed(
            f"{theorem} needs {component}_{n} = {value} but {pair.provenance} differs at q^{report.exponent}"
        )


def _require_base_one(pair: BaileyPair, theorem: str) -> None:
    if pair.base is not PairBase.ONE or pair.step != 1:
        raise PreconditionFailed(f"{theorem} needs a pair relative to 1 in base q, got {pair.provenance}")


def _one_minus(exponent: int) -> QSeries:
    return from_terms({0: 1, exponent: -1}, None)


def _split_sum(sequence: SeriesSequence, indices, prefix: Callable[[int], int], N: int) -> QSeries:
    """``sum_j q^{prefix(j)} sequence(index_j)`` to order N (prefix values may be negative)."""
    total = zero(N)
    for j, index in indices:
        shift = prefix(j)
        total = series_add(total, series_shift(sequence(index, N - shift), shift))
    return total


def thm_main1(pair: BaileyPair) -> BaileyPair:
    """The pair relative to 1 with alpha'_0 = beta'_0 = 0 built from a pair with alpha_0 = beta_0 = 1."""
    _require_base_one(pair, "thm_main1")
    _require_constant(pair, "alpha", 0, constant(1, PRECONDITION_ORDER), "thm_main1")
    _require_constant(pair, "beta", 0, constant(1, PRECONDITION_ORDER), "thm_main1")

    def alpha(index: int, N: int) -> QSeries:
        if index == 0:
            return zero(N)
        n, odd = divmod(index, 2)
        if odd:
            body = _split_sum(pair.alpha, [(j, 2 * j) for j in range(n + 1)],
                              lambda j: 2 * n * n - 2 * j * j, N)
            return series_truncate(series_neg(series_mul(_one_minus(4 * n + 2), body)), N)
        body = _split_sum(pair.alpha, [(j, 2 * j + 1) for j in range(n)],
                          lambda j: 2 * n * n - 2 * n - 2 * j * j - 2 * j, N)
        return series_truncate(series_neg(series_mul(_one_minus(4 * n), body)), N)

    def beta(n: int, N: int) -> QSeries:
        if n == 0:
            return zero(N)
        return series_neg(series_divide(pair.beta(n - 1, N), _one_minus(2 * n - 1), N))

    return make_pair(PairBase.ONE, alpha, beta, f"thm1({pair.provenance})")


def thm_main2(pair: BaileyPair) -> BaileyPair:
    """A pair relative to q from a pair relative to 1 with alpha_0 = beta_0 = 0."""
    _require_base_one(pair, "thm_main2")
    _require_constant(pair, "alpha", 0, zero(PRECONDITION_ORDER), "thm_main2")
    _require_constant(pair, "beta", 0, zero(PRECONDITION_ORDER), "thm_main2")

    def alpha(n: int, N: int) -> QSeries:
        def build(working: int) -> QSeries:
            value = series_neg(series_divide(pair.alpha(n + 1, working), _one_minus(2 * n + 2), working))
            if n > 0:
                second = series_shift(pair.alpha(n, working - 2 * n), 2 * n)
                value = series_add(value, series_divide(second, _one_minus(2 * n), working))
            return series_divide(value, _one_minus(1), working)

        return evaluate_to_order(build, N)

    def beta(n: int, N: int) -> QSeries:
        return series_neg(pair.beta(n + 1, N))

    return make_pair(PairBase.Q, alpha, beta, f"thm2({pair.provenance})")


def thm_main3(pair: BaileyPair) -> BaileyPair:
    """A pair relative to q from a pair relative to 1 with alpha_0 = beta_0 = 1."""
    _require_base_one(pair, "thm_main3")
    _require_constant(pair, "alpha", 0, constant(1, PRECONDITION_ORDER), "thm_main3")
    _require_constant(pair, "beta", 0, constant(1, PRECONDITION_ORDER), "thm_main3")

    def alpha(index: int, N: int) -> QSeries:
        n, odd = divmod(index, 2)

        def build(working: int) -> QSeries:
            evens = _split_sum(pair.alpha, [(j, 2 * j) for j in range(n + 1)], lambda j: -2 * j * j, working)
            if odd:
                odds = _split_sum(pair.alpha, [(j, 2 * j + 1) for j in range(n + 1)],
                                  lambda j: -2 * j * j - 2 * j, working)
                value = series_sub(series_shift(odds, 2 * n * n + 2 * n),
                                   series_shift(evens, 2 * n * n + 4 * n + 2))
            else:
                odds = _split_sum(pair.alpha, [(j, 2 * j + 1) for j in range(n)],
                                  lambda j: -2 * j * j - 2 * j, working)
                value = series_sub(series_shift(evens, 2 * n * n), series_shift(odds, 2 * n * n + 2 * n))
            return series_divide(value, _one_minus(1), working)

        return evaluate_to_order(build, N)

    def beta(n: int, N: int) -> QSeries:
        return series_divide(pair.beta(n, N), _one_minus(2 * n + 1), N)

    return make_pair(PairBase.Q, alpha, beta, f"thm3({pair.provenance})")


def thm_main1_inverse(pair: BaileyPair) -> BaileyPair:
    """Recover the pair with alpha_0 = beta_0 = 1 from one with alpha'_0 = 0, alpha'_1 = -(1 - q^2)."""
    _require_base_one(pair, "thm_main1_inverse")
    _require_constant(pair, "alpha", 0, zero(PRECONDITION_ORDER), "thm_main1_inverse")
    _require_constant(pair, "alpha", 1, series_truncate(series_neg(_one_minus(2)), PRECONDITION_ORDER),
                      "thm_main1_inverse")

    def alpha(n: int, N: int) -> QSeries:
        def build(working: int) -> QSeries:
            value = series_neg(series_divide(pair.alpha(n + 1, working), _one_minus(2 * n + 2), working))
            if n >= 2:
                second = series_shift(pair.alpha(n - 1, working - (2 * n - 2)), 2 * n - 2)
                value = series_add(value, series_divide(second, _one_minus(2 * n - 2), working))
            return value

        return evaluate_to_order(build, N)

    def beta(n: int, N: int) -> QSeries:
        return series_truncate(series_neg(series_mul(_one_minus(2 * n + 1), pair.beta(n + 1, N))), N)

    return make_pair(PairBase.ONE, alpha, beta, f"thm1inv({pair.provenance})")


def base_change(pair: BaileyPair) -> BaileyPair:
    """Pass from a pair relative to (1, q) to a pair relative to (1, q^2)."""
    _require_base_one(pair, "base_change")

    def alpha(n: int, N: int) -> QSeries:
        shift = n * n - n
        factor = series_add(monomial(Fraction(1, 2), shift), monomial(Fraction(1, 2), shift + 2 * n))
        return series_truncate(series_mul(factor, pair.alpha(n, N - shift)), N)

    def beta(n: int, N: int) -> QSeries:
        total = zero(N)
        for k in range(n + 1):
            shift = k * k - k
            term = series_shift(pair.beta(k, N - shift), shift)
            total = series_add(total, series_divide(term, _poch(1, 2, 2, n - k), N))
        return series_divide(total, _poch(-1, 0, 1, 2 * n), N)

    return make_pair(PairBase.ONE, alpha, beta, f"base_change({pair.provenance})", step=2)


def change_of_base_beta_closed_form(n: int, N: int) -> QSeries:
    """``-1 / (2 (q^{2n}; q^2)_n)`` for n >= 1 and 0 for n = 0."""
    if n == 0:
        return zero(N)
    return series_divide(constant(Fraction(-1, 2)), _poch(1, 2 * n, 2, n), N)


class Block(NamedTuple):
    """``coeff * (1 - q^cut) * q^prefix * sum_{j=lo}^{hi} q^{-(p j^2 + r j)}``; ``cut`` None means no factor."""
    coeff: int
    cut: Optional[int]
    prefix: int
    lo: int
    hi: int
    p: int
    r: int


def _block_polynomial(block: Block) -> Dict[int, Number]:
    coeffs: Dict[int, Number] = {}
    for j in range(block.lo, block.hi + 1):
        e = block.prefix - block.p * j * j - block.r * j
        coeffs[e] = coeffs.get(e, 0) + block.coeff
        if block.cut is not None:
            coeffs[e + block.cut] = coeffs.get(e + block.cut, 0) - block.coeff
    return coeffs


def _split_alpha(even: Callable[[int], List[Block]], odd: Callable[[int], List[Block]],
                 over_one_minus_q: bool) -> Callable[[int, int], QSeries]:
    def alpha(index: int, N: int) -> QSeries:
        n, parity = divmod(index, 2)
        coeffs: Dict[int, Number] = {}
        for block in (odd(n) if parity else even(n)):
            for e, c in _block_polynomial(block).items():
                coeffs[e] = coeffs.get(e, 0) + c
        value = from_terms(coeffs, None)
        if over_one_minus_q:
            return series_divide(value, _one_minus(1), N)
        return value

    return alpha


def _monomial_over(sign: int, shift: int, denominators: List[QSeries], N: int) -> QSeries:
    return series_divide(monomial(sign, shift), _product(*denominators), N)


def _q(n: int) -> QSeries:
    return _poch(1, 1, 1, n)


def _q2(n: int) -> QSeries:
    return _poch(1, 2, 2, n)


def _parity(n: int) -> int:
    return -1 if n % 2 else 1


def _unit_pair() -> BaileyPair:
    return make_pair(
        PairBase.ONE,
        lambda n, N: ONE if n == 0 else zero(N),
        lambda n, N: _monomial_over(1, 0, [_q(n), _q(n)], N),
        "unit",
    )


def _slater_pair(name: str, alpha_term: Callable[[int], QSeries], beta_term: Callable[[int, int], QSeries]) -> BaileyPair:
    return make_pair(
        PairBase.ONE,
        lambda n, N: ONE if n == 0 else alpha_term(n),
        beta_term,
        name,
    )


def _slater0() -> BaileyPair:
    return _slater_pair(
        "slater0",
        lambda n: constant(2 * _parity(n)),
        lambda n, N: _monomial_over(_parity(n), 0, [_q2(n)], N),
    )


def _slater1() -> BaileyPair:
    return _slater_pair(
        "slater1",
        lambda n: from_terms({n: _parity(n), -n: _parity(n)}, None),
        lambda n, N: _monomial_over(_parity(n), -n, [_q2(n)], N),
    )


def _slater2() -> BaileyPair:
    return _slater_pair(
        "slater2",
        lambda n: from_terms({-binom2(n + 1): _parity(n), -binom2(n + 1) + n: _parity(n)}, None),
        lambda n, N: _monomial_over(_parity(n), -binom2(n + 1), [_q(n)], N),
    )


def _slater3() -> BaileyPair:
    return _slater_pair(
        "slater3",
        lambda n: from_terms({-n * (n + 3) // 2: _parity(n), -n * (n + 3) // 2 + 3 * n: _parity(n)}, None),
        lambda n, N: _monomial_over(_parity(n), -n * (n + 3) // 2, [_q(n)], N),
    )


# Split-index alpha tables: each entry maps the half-index n to its blocks.
_ALPHA_TABLES = {
    "bk": (
        lambda n: [Block(1, 4 * n, 2 * n * n - 2 * n, -n, n - 1, 2, 2)],
        lambda n: [Block(-1, 4 * n + 2, 2 * n * n, -n, n, 2, 0)],
        False,
    ),
    "bk_q": (
        lambda n: [Block(1, None, 2 * n * n + 2 * n, -n, n - 1, 2, 2), Block(1, None, 2 * n * n, -n, n, 2, 0)],
        lambda n: [Block(-1, None, 2 * n * n + 4 * n + 2, -n, n, 2, 0),
                   Block(-1, None, 2 * n * n + 2 * n, -n - 1, n, 2, 2)],
        True,
    ),
    "andrews0": (
        lambda n: [Block(1, None, 3 * n * n + n, -n, n, 1, 0), Block(-1, None, 3 * n * n - n, -n + 1, n - 1, 1, 0)],
        lambda n: [Block(-1, None, 3 * n * n + 4 * n + 1, -n - 1, n, 1, 1),
                   Block(1, None, 3 * n * n + 2 * n, -n, n - 1, 1, 1)],
        False,
    ),
    "andrews1": (
        lambda n: [Block(-1, 4 * n, 3 * n * n - 2 * n, -n, n - 1, 1, 1)],
        lambda n: [Block(1, 4 * n + 2, 3 * n * n + n, -n, n, 1, 0)],
        False,
    ),
    "andrews2": (
        lambda n: [Block(1, None, 3 * n * n + 2 * n, -n, n - 1, 1, 1), Block(1, None, 3 * n * n + n, -n, n, 1, 0)],
        lambda n: [Block(-1, None, 3 * n * n + 5 * n + 2, -n, n, 1, 0),
                   Block(-1, None, 3 * n * n + 4 * n + 1, -n - 1, n, 1, 1)],
        True,
    ),
    "cor1": (
        lambda n: [Block(1, 4 * n, 2 * n * n - 2 * n + 1, -n, n - 1, 2, 0)],
        lambda n: [Block(-1, 4 * n + 2, 2 * n * n, -n, n, 2, 2)],
        False,
    ),
    "cor1q": (
        lambda n: [Block(1, None, 2 * n * n, -n, n, 2, 2), Block(1, None, 2 * n * n + 2 * n + 1, -n, n - 1, 2, 0)],
        lambda n: [Block(-1, None, 2 * n * n + 2 * n + 1, -n - 1, n, 2, 0),
                   Block(-1, None, 2 * n * n + 4 * n + 2, -n, n, 2, 2)],
        True,
    ),
    "cor2": (
        lambda n: [Block(1, 4 * n, 2 * n * n - 2 * n, -n, n - 1, 4, 3)],
        lambda n: [Block(-1, 4 * n + 2, 2 * n * n, -n, n, 4, 1)],
        False,
    ),
    "cor2q": (
        lambda n: [Block(1, None, 2 * n * n, -n, n, 4, 1), Block(1, None, 2 * n * n + 2 * n, -n, n - 1, 4, 3)],
        lambda n: [Block(-1, None, 2 * n * n + 2 * n, -n - 1, n, 4, 3),
                   Block(-1, None, 2 * n * n + 4 * n + 2, -n, n, 4, 1)],
        True,
    ),
    "cor3": (
        lambda n: [Block(1, 4 * n, 2 * n * n - 2 * n + 1, -n, n - 1, 4, 1)],
        lambda n: [Block(-1, 4 * n + 2, 2 * n * n, -n, n, 4, 3)],
        False,
    ),
    "cor3q": (
        lambda n: [Block(1, None, 2 * n * n, -n, n, 4, 3), Block(1, None, 2 * n * n + 2 * n + 1, -n, n - 1, 4, 1)],
        lambda n: [Block(-1, None, 2 * n * n + 2 * n + 1, -n - 1, n, 4, 1),
                   Block(-1, None, 2 * n * n + 4 * n + 2, -n, n, 4, 3)],
        True,
    ),
    "d1": (
        lambda n: [Block(2, 2 * n, 4 * n * n - n + 1, -n, n - 1, 2, 0)],
        lambda n: [Block(-2, 2 * n + 1, 4 * n * n + 3 * n + 1, -n, n, 2, 2)],
        False,
    ),
    "d1q": (
        lambda n: [Block(1, None, 4 * n * n + n, -n, n, 2, 2), Block(1, None, 4 * n * n + 3 * n + 1, -n, n - 1, 2, 0)],
        lambda n: [Block(-1, None, 4 * n * n + 5 * n + 2, -n - 1, n, 2, 0),
                   Block(-1, None, 4 * n * n + 7 * n + 3, -n, n, 2, 2)],
        True,
    ),
    "d2": (
        lambda n: [Block(1, 4 * n, 6 * n * n - 2 * n, -n, n - 1, 4, 3)],
        lambda n: [Block(-1, 4 * n + 2, 6 * n * n + 4 * n + 1, -n, n, 4, 1)],
        False,
    ),
    "d2q": (
        lambda n: [Block(1, None, 6 * n * n + 2 * n, -n, n, 4, 1), Block(1, None, 6 * n * n + 4 * n, -n, n - 1, 4, 3)],
        lambda n: [Block(-1, None, 6 * n * n + 8 * n + 2, -n - 1, n, 4, 3),
                   Block(-1, None, 6 * n * n + 10 * n + 4, -n, n, 4, 1)],
        True,
    ),
    "d3": (
        lambda n: [Block(1, 4 * n, 6 * n * n - 2 * n + 1, -n, n - 1, 4, 1)],
        lambda n: [Block(-1, 4 * n + 2, 6 * n * n + 4 * n + 1, -n, n, 4, 3)],
        False,
    ),
    "d3q": (
        lambda n: [Block(1, None, 6 * n * n + 2 * n, -n, n, 4, 3),
                   Block(1, None, 6 * n * n + 4 * n + 1, -n, n - 1, 4, 1)],
        lambda n: [Block(-1, None, 6 * n * n + 8 * n + 3, -n - 1, n, 4, 1),
                   Block(-1, None, 6 * n * n + 10 * n + 4, -n, n, 4, 3)],
        True,
    ),
}


def _shifted_sum(n: int, N: int, start: int, term: Callable[[int], Tuple[int, int, List[QSeries]]]) -> QSeries:
    """``sum_{j=start}^{n} sign_j q^{shift_j} / prod(dens_j)`` to order N."""
    total = zero(N)
    for j in range(start, n + 1):
        sign, shift, dens = term(j)
        total = series_add(total, _monomial_over(sign, shift, dens, N))
    return total


def _over(numerator: QSeries, denominators: List[QSeries], N: int) -> QSeries:
    return series_divide(numerator, _product(*denominators), N)


def _beta_d1(n: int, N: int) -> QSeries:
    inner = zero(N)
    for j in range(1, n + 1):
        # (-1; q)_j in the numerator
        numerator = series_scale(series_shift(_poch(-1, 0, 1, j), binom2(j) + 1), _parity(j))
        inner = series_add(inner, _over(numerator, [_q(n - j), _q2(j - 1), _one_minus(2 * j - 1)], N))
    return series_divide(inner, _poch(-1, 1, 1, n), N)


_BETA_FORMS: Dict[str, Callable[[int, int], QSeries]] = {
    "bk": lambda n, N: zero(N) if n == 0 else _over(
        series_scale(_poch(1, 1, 2, n - 1), _parity(n)), [_q(2 * n - 1)], N),
    "bk_q": lambda n, N: _over(series_scale(_poch(1, 1, 2, n), _parity(n)), [_q(2 * n + 1)], N),
    "andrews0": lambda n, N: _monomial_over(1, 0, [_poch(1, n + 1, 1, n)], N),
    "andrews1": lambda n, N: zero(N) if n == 0 else _monomial_over(1, 0, [_poch(1, n, 1, n)], N),
    "andrews2": lambda n, N: _monomial_over(1, 0, [_poch(1, n + 1, 1, n + 1)], N),
    "cor1": lambda n, N: zero(N) if n == 0 else _monomial_over(
        _parity(n), -n + 1, [_q2(n - 1), _one_minus(2 * n - 1)], N),
    "cor1q": lambda n, N: _monomial_over(_parity(n), -n, [_q2(n), _one_minus(2 * n + 1)], N),
    "cor2": lambda n, N: zero(N) if n == 0 else _monomial_over(
        _parity(n), -binom2(n), [_q(n - 1), _one_minus(2 * n - 1)], N),
    "cor2q": lambda n, N: _monomial_over(_parity(n), -binom2(n + 1), [_q(n), _one_minus(2 * n + 1)], N),
    "cor3": lambda n, N: zero(N) if n == 0 else _monomial_over(
        _parity(n), -binom2(n + 1) + 1, [_q(n - 1), _one_minus(2 * n - 1)], N),
    "cor3q": lambda n, N: _monomial_over(_parity(n), -n * (n + 3) // 2, [_q(n), _one_minus(2 * n + 1)], N),
    "d1": _beta_d1,
    "d1q": lambda n, N: series_divide(
        _shifted_sum(n, N, 0, lambda j: (_parity(j), binom2(j), [_q(n - j), _q(j), _one_minus(2 * j + 1)])),
        _poch(-1, 1, 1, n), N),
    "d2": lambda n, N: _shifted_sum(
        n, N, 1, lambda j: (_parity(j), binom2(j + 1), [_q(n - j), _q(j - 1), _one_minus(2 * j - 1)])),
    "d2q": lambda n, N: _shifted_sum(
        n, N, 0, lambda j: (_parity(j), binom2(j + 1), [_q(n - j), _q(j), _one_minus(2 * j + 1)])),
    "d3": lambda n, N: _shifted_sum(
        n, N, 1, lambda j: (_parity(j), binom2(j) + 1, [_q(n - j), _q(j - 1), _one_minus(2 * j - 1)])),
    "d3q": lambda n, N: _shifted_sum(
        n, N, 0, lambda j: (_parity(j), binom2(j), [_q(n - j), _q(j), _one_minus(2 * j + 1)])),
}

_BASES = {
    "bk": PairBase.ONE, "bk_q": PairBase.Q,
    "andrews0": PairBase.ONE, "andrews1": PairBase.ONE, "andrews2": PairBase.Q,
    "cor1": PairBase.ONE, "cor1q": PairBase.Q, "cor2": PairBase.ONE, "cor2q": PairBase.Q,
    "cor3": PairBase.ONE, "cor3q": PairBase.Q,
    "d1": PairBase.ONE, "d1q": PairBase.Q, "d2": PairBase.ONE, "d2q": PairBase.Q,
    "d3": PairBase.ONE, "d3q": PairBase.Q,
}

PAIR_IDS = (
    "unit", "slater0", "slater1", "slater2", "slater3",
    "bk", "bk_q", "andrews0", "andrews1", "andrews2",
    "cor1", "cor2", "cor3", "cor1q", "cor2q", "cor3q",
    "d1", "d1q", "d2", "d2q", "d3", "d3q",
    "bk_step", "bk_q_step",
)


@lru_cache(maxsize=None)
def catalog_pair(pair_id: str) -> BaileyPair:
    """Catalog pair by stable id; raises :class:`UnknownPairId`."""
    seeds = {"unit": _unit_pair, "slater0": _slater0, "slater1": _slater1, "slater2": _slater2, "slater3": _slater3}
    if pair_id in seeds:
        return seeds[pair_id]()
    if pair_id in _ALPHA_TABLES:
        even, odd, over = _ALPHA_TABLES[pair_id]
        return make_pair(_BASES[pair_id], _split_alpha(even, odd, over), _BETA_FORMS[pair_id], pair_id)
    if pair_id == "bk_step":
        return bailey_step(catalog_pair("bk"), RhoParam.finite(ThetaArg(-1, 0)), INF)
    if pair_id == "bk_q_step":
        return bailey_step(catalog_pair("bk_q"), RhoParam.finite(ThetaArg(-1, 1)), INF)
    raise UnknownPairId(f"unknown id: {pair_id}")
