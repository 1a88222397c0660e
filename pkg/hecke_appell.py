"""Indefinite theta series, Appell-Lerch sums and the Hickerson-Mortenson expansions.

All arguments are monomials ``+-q^k`` (:class:`ThetaArg`).  A ``base_dilation``
of ``d`` evaluates the object with ``q`` replaced by ``q^d`` while ``x``, ``y``
keep their literal exponents, so output exponents are always literal.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, List, Optional, Tuple

from qproducts import ThetaArg, ThetaFactor, ThetaQuotient, binom2, theta_j
from qseries_types import DivisionByZeroTheta, InvalidSpec, NonTerminating, PoleAtTerm
from series_core import (
    Number, QSeries, evaluate_to_order, from_terms, series_add, series_invert, series_mul,
    series_scale, series_shift, series_sub, zero,
)

logger = logging.getLogger(__name__)

MINUS_ONE = ThetaArg(-1, 0)


def default_row_cap(N: int, *offsets: int) -> int:
    return 4 * max(N, 0) + 64 + sum(abs(o) for o in offsets)


@dataclass(frozen=True)
class FSpec:
    """``f_{a,b,c}(x, y, q^d)``."""
    a: int
    b: int
    c: int
    x: ThetaArg
    y: ThetaArg
    base_dilation: int = 1

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0:
            raise InvalidSpec(f"f_{{a,b,c}} needs a, c > 0 (got a={self.a}, c={self.c})")
        if self.b <= 0:
            raise InvalidSpec(f"f_{{a,b,c}} needs b > 0 (got b={self.b})")
        if self.base_dilation < 1:
            raise InvalidSpec(f"base dilation must be positive, got {self.base_dilation}")

    @property
    def indefinite(self) -> bool:
        return self.b * self.b > self.a * self.c

    def exponent(self, r: int, s: int) -> int:
        d = self.base_dilation
        return d * (self.a * binom2(r) + self.b * r * s + self.c * binom2(s)) + r * self.x.exp + s * self.y.exp

    def sign(self, r: int, s: int) -> int:
        value = -1 if (r + s) % 2 else 1
        if self.x.sign == -1 and r % 2:
            value = -value
        if self.y.sign == -1 and s % 2:
            value = -value
        return value

    def swapped(self) -> 'FSpec':
        return FSpec(self.c, self.b, self.a, self.y, self.x, self.base_dilation)

    def __str__(self) -> str:
        base = "q" if self.base_dilation == 1 else f"q^{self.base_dilation}"
        return f"f_{{{self.a},{self.b},{self.c}}}({self.x}, {self.y}, {base})"


def _scan_quadrant(exponent: Callable[[int, int], int], N: int, row_cap: int, label: str):
    """Yield (i, j) with ``exponent(i, j) <= N`` over i, j >= 0.

    ``exponent`` must be convex in each index with column increments that
    grow with the row index.
    """
    for i in range(row_cap + 1):
        base = exponent(i, 0)
        if base > N and exponent(i + 1, 0) >= base and exponent(i, 1) >= base:
            return
        for j in range(row_cap + 1):
            value = exponent(i, j)
            if value <= N:
                yield i, j
            elif exponent(i, j + 1) >= value:
                break
        else:
            raise NonTerminating(f"{label}: row {i} did not terminate within {row_cap} columns")
    raise NonTerminating(f"{label}: no termination within {row_cap} rows")


def hecke_f(spec: FSpec, N: int, row_cap: Optional[int] = None) -> QSeries:
    """``f_{a,b,c}(x, y, q^d)`` to order N (positive quadrant minus negative quadrant)."""
    cap = row_cap or default_row_cap(N, spec.x.exp, spec.y.exp)
    coeffs: Dict[int, int] = {}
    for r, s in _scan_quadrant(spec.exponent, N, cap, str(spec)):
        e = spec.exponent(r, s)
        coeffs[e] = coeffs.get(e, 0) + spec.sign(r, s)

    def negative(i: int, j: int) -> int:
        return spec.exponent(-i - 1, -j - 1)

    for i, j in _scan_quadrant(negative, N, cap, str(spec)):
        e = negative(i, j)
        coeffs[e] = coeffs.get(e, 0) - spec.sign(-i - 1, -j - 1)
    return from_terms(coeffs, N)


def hecke_f_bruteforce(spec: FSpec, N: int, bound: int) -> QSeries:
    """Direct evaluation over ``-bound <= r, s < bound``; ``bound`` must cover every term up to N."""
    coeffs: Dict[int, int] = {}
    for r in range(-bound, bound):
        for s in range(-bound, bound):
            if (r >= 0) != (s >= 0):
                continue
            e = spec.exponent(r, s)
            if e > N:
                continue
            sign = spec.sign(r, s) if r >= 0 else -spec.sign(r, s)
            coeffs[e] = coeffs.get(e, 0) + sign
    return from_terms(coeffs, N)


@dataclass(frozen=True)
class AppellSpec:
    """``m(x, q^M, z)``; genericity is checked on construction."""
    x: ThetaArg
    modulus: int
    z: ThetaArg

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidSpec(f"Appell-Lerch modulus must be positive, got {self.modulus}")
        if self.z.sign == 1 and self.z.exp % self.modulus == 0:
            raise DivisionByZeroTheta(f"j({self.z}, q^{self.modulus}) vanishes for m({self.x}, q^{self.modulus}, {self.z})")
        total = self.x.exp + self.z.exp
        if self.x.sign * self.z.sign == 1 and total % self.modulus == 0:
            raise PoleAtTerm(1 - total // self.modulus)

    def denominator_exponent(self, r: int) -> int:
        return (r - 1) * self.modulus + self.x.exp + self.z.exp

    def numerator_exponent(self, r: int) -> int:
        return self.modulus * binom2(r) + r * self.z.exp

    def lowest_exponent(self, r: int) -> int:
        d = self.denominator_exponent(r)
        return self.numerator_exponent(r) + (-d if d < 0 else 0)

    def __str__(self) -> str:
        return f"m({self.x}, q^{self.modulus}, {self.z})"


def _appell_sum(spec: AppellSpec, W: int, row_cap: int) -> QSeries:
    """The bilateral numerator sum, exact through order W."""
    s = spec.x.sign * spec.z.sign
    coeffs: Dict[int, Number] = {}

    def add_term(r: int) -> None:
        sign = -1 if r % 2 else 1
        if spec.z.sign == -1 and r % 2:
            sign = -sign
        p = spec.numerator_exponent(r)
        d = spec.denominator_exponent(r)
        if d == 0:
            coeffs[p] = coeffs.get(p, 0) + Fraction(sign, 2)
            return
        if d > 0:
            step, start, lead = d, p, sign
        else:
            # 1/(1 - s q^d) = -s q^{-d} / (1 - s q^{-d})
            step, start, lead = -d, p - d, -s * sign
        k = 0
        e = start
        while e <= W:
            term = lead if (s == 1 or k % 2 == 0) else -lead
            coeffs[e] = coeffs.get(e, 0) + term
            k += 1
            e += step

    for direction in (1, -1):
        r = 0 if direction == 1 else -1
        for _ in range(row_cap + 1):
            low = spec.lowest_exponent(r)
            if low <= W:
                add_term(r)
            elif spec.lowest_exponent(r + direction) >= low:
                break
            r += direction
        else:
            raise NonTerminating(f"{spec}: r-scan did not terminate within {row_cap} terms")
    return from_terms({e: c for e, c in coeffs.items()}, W)


def appell_m(spec: AppellSpec, N: int, row_cap: Optional[int] = None) -> QSeries:
    """``m(x, q^M, z)`` to order N."""
    cap = row_cap or default_row_cap(N, spec.x.exp, spec.z.exp)

    def build(working: int) -> QSeries:
        numerator = _appell_sum(spec, working, cap)
        theta = theta_j(spec.z, spec.modulus, working)
        return series_mul(numerator, series_invert(theta, working))

    return evaluate_to_order(build, N)


def appell_change_of_z(x: ThetaArg, modulus: int, z: ThetaArg, z0: ThetaArg) -> ThetaQuotient:
    """Theta quotient equal to ``m(x, q^M, z) - m(x, q^M, z0)``."""
    M = modulus
    return ThetaQuotient(
        Fraction(1),
        z0,
        (ThetaFactor.index(M, 3), ThetaFactor(z / z0, M), ThetaFactor(x * z * z0, M)),
        (ThetaFactor(z0, M), ThetaFactor(z, M), ThetaFactor(x * z0, M), ThetaFactor(x * z, M)),
    )


def _neg(arg: ThetaArg) -> ThetaArg:
    return arg.negated()


def hm_g_terms(a: int, b: int, c: int, x: ThetaArg, y: ThetaArg, z1: ThetaArg, z0: ThetaArg,
               base_dilation: int = 1) -> List[Tuple[ThetaArg, ThetaFactor, AppellSpec]]:
    """The ``(monomial, theta factor, Appell spec)`` triples whose products sum to ``g_{a,b,c}``.

    Terms whose theta factor vanishes identically are omitted.
    """
    d = base_dilation
    D = b * b - a * c
    if D <= 0:
        raise InvalidSpec(f"g_{{{a},{b},{c}}} needs b^2 > ac")
    terms = []
    sums = (
        (a, c, x, y, z0),
        (c, a, y, x, z1),
    )
    for outer, inner, first, second, z in sums:
        ratio = (_neg(second) ** outer) / (_neg(first) ** b)
        for t in range(outer):
            factor = ThetaFactor(first.shift(d * b * t), d * outer)
            if factor.is_zero:
                continue
            coefficient = (_neg(second) ** t).shift(d * inner * binom2(t))
            shift = d * (outer * binom2(b + 1) - inner * binom2(outer + 1) - t * D)
            arg = ratio.shift(shift).negated()
            terms.append((coefficient, factor, AppellSpec(arg, d * outer * D, z)))
    return terms


def hm_g(a: int, b: int, c: int, x: ThetaArg, y: ThetaArg, z1: ThetaArg, z0: ThetaArg,
         base_dilation: int, N: int) -> QSeries:
    """``g_{a,b,c}(x, y, q^d, z1, z0)`` to order N."""
    terms = hm_g_terms(a, b, c, x, y, z1, z0, base_dilation)

    def build(working: int) -> QSeries:
        total = zero(working)
        for coefficient, factor, spec in terms:
            value = series_mul(factor.evaluate(working), appell_m(spec, working))
            value = series_scale(series_shift(value, coefficient.exp), coefficient.sign)
            total = series_add(total, value)
        return total

    return evaluate_to_order(build, N)


def _check_odd(n: int, p: int) -> None:
    if n < 1 or n % 2 == 0:
        raise InvalidSpec(f"Theta_{{n,{p}}} needs an odd positive n, got {n}")


def theta_correction_quotients(n: int, p: int, x: ThetaArg, y: ThetaArg,
                               base_dilation: int = 1) -> List[ThetaQuotient]:
    """Theta quotients summing to ``Theta_{n,p}(x, y, q^d)`` for p in {2, 4}.

    ``Theta_{n,2}`` is a single closed-form quotient.  ``Theta_{n,4}`` goes through
    :func:`minus_one_correction_quotients`.
    """
    _check_odd(n, p)
    if p == 4:
        return minus_one_correction_quotients(n, p, x, y, base_dilation)
    if p != 2:
        raise InvalidSpec(f"theta correction exists only for p in (2, 4), got {p}")
    d = base_dilation

    def j(arg: ThetaArg, modulus: int) -> ThetaFactor:
        return ThetaFactor(arg, modulus * d)

    def q(k: int) -> ThetaArg:
        return ThetaArg(1, d * k)

    def mq(k: int) -> ThetaArg:
        return ThetaArg(-1, d * k)

    xy = x * y
    ratio = y / x
    M = 4 * (n + 1)
    prefactor = (y ** ((n + 1) // 2)) * (x ** (-(n - 3) // 2)) * q(-(n * n - 3) // 2)
    return [ThetaQuotient(
        Fraction(1),
        prefactor,
        (
            j(q(2 * n), 4 * n),
            j(q(4 * (n + 1)), 8 * (n + 1)),
            j(ratio, M),
            j(q(n + 2) * xy, M),
            j(q(2 * n) / xy ** 2, 2 * M),
        ),
        (
            j(ratio ** n, n * M),
            j(mq(n + 2) * x ** 2, M),
            j(mq(n + 2) * y ** 2, M),
        ),
    )]


def hm_theta_quotients(n: int, p: int, x: ThetaArg, y: ThetaArg, base_dilation: int = 1) -> List[ThetaQuotient]:
    """Theta quotients summing to ``theta_{n,p}(x, y, q^d) / Jbar_{0,np(2n+p)}``.

    This is the correction in ``f_{n,n+p,n} = g_{n,n+p,n}(x, y, q, -1, -1) + theta_{n,p} / Jbar_{0,np(2n+p)}``,
    valid for coprime ``n`` and ``p``.  The ``p**2`` terms run over ``r = r* + {(n-1)/2}`` and
    ``s = s* + {(n-1)/2}``, so for even ``n`` both are half-integers; they are carried doubled.
    """
    if n < 1 or p < 1 or gcd(n, p) != 1:
        raise InvalidSpec(f"theta_{{n,p}} needs coprime positive n, p (got n={n}, p={p})")
    d = base_dilation

    def j(arg: ThetaArg, modulus: int) -> ThetaFactor:
        return ThetaFactor(arg, modulus * d)

    def q(k: int) -> ThetaArg:
        return ThetaArg(1, d * k)

    M = p * p * (2 * n + p)
    half = 0 if n % 2 else 1
    y_over_x = (_neg(y) ** (n + p)) / (_neg(x) ** n)
    x_over_y = (_neg(x) ** (n + p)) / (_neg(y) ** n)
    quotients = []
    for r_star in range(p):
        for s_star in range(p):
            r2 = 2 * r_star + half
            s2 = 2 * s_star + half
            R = (r2 - (n - 1)) // 2
            S = (s2 + n + 1) // 2
            exponent = n * binom2(R) + (n + p) * R * S + n * binom2(S)
            quotients.append(ThetaQuotient(
                Fraction(1),
                q(exponent) * (_neg(x) ** R) * (_neg(y) ** S),
                (
                    ThetaFactor.index(M * d, 3),
                    j(q(n * p * (s2 - r2) // 2).negated() * (x / y) ** n, n * p * p),
                    j(q(p * (2 * n + p) * (r2 + s2) // 2 + p * (n + p)) * (x * y) ** p, M),
                ),
                (
                    j(q((p * (2 * n + p) * r2 + p * (n + p)) // 2) * y_over_x, M),
                    j(q((p * (2 * n + p) * s2 + p * (n + p)) // 2) * x_over_y, M),
                    j(MINUS_ONE, n * p * (2 * n + p)),
                ),
            ))
    return quotients


def minus_one_correction_quotients(n: int, p: int, x: ThetaArg, y: ThetaArg,
                                   base_dilation: int = 1) -> List[ThetaQuotient]:
    """``Theta_{n,p}`` assembled from the expansion at ``z1 = z0 = -1``.

    ``g(z1, z0) - g(-1, -1)`` is a sum of change-of-z quotients, so with ``z1 = (y/x)^n``,
    ``z0 = (x/y)^n`` the difference ``g_{n,n+p,n}(x, y, q, z1, z0) - f_{n,n+p,n}`` equals
    those quotients minus :func:`hm_theta_quotients`.
    """
    z1 = (y / x) ** n
    z0 = (x / y) ** n
    quotients = []
    for coefficient, factor, spec in hm_g_terms(n, n + p, n, x, y, z1, z0, base_dilation):
        head = ThetaQuotient(Fraction(1), coefficient, (factor,), ())
        quotients.append(head.times(appell_change_of_z(spec.x, spec.modulus, spec.z, MINUS_ONE)))
    quotients.extend(quotient.scaled(-1) for quotient in hm_theta_quotients(n, p, x, y, base_dilation))
    return quotients


def theta_correction(n: int, p: int, x: ThetaArg, y: ThetaArg, base_dilation: int, N: int) -> QSeries:
    """``Theta_{n,p}(x, y, q^d)`` to order N."""
    total = zero(N)
    for quotient in theta_correction_quotients(n, p, x, y, base_dilation):
        total = series_add(total, quotient.evaluate(N))
    return total


def hm_expand(n: int, p: int, x: ThetaArg, y: ThetaArg, base_dilation: int, N: int) -> QSeries:
    """Right-hand side of the expansion of ``f_{n,n+p,n}(x, y, q^d)`` into Appell-Lerch sums."""
    if p not in (1, 2, 4):
        raise InvalidSpec(f"hm_expand supports p in (1, 2, 4), got {p}")
    if p != 1:
        _check_odd(n, p)
    z1 = (y / x) ** n
    z0 = (x / y) ** n
    value = hm_g(n, n + p, n, x, y, z1, z0, base_dilation, N)
    if p == 1:
        return value
    logger.debug(f"Subtracting Theta_{{{n},{p}}}({x}, {y}) at dilation {base_dilation}")
    return series_sub(value, theta_correction(n, p, x, y, base_dilation, N))


@dataclass(frozen=True)
class AppellTerm:
    """``coeff * q^shift * m(x, q^M, z)``."""
    coeff: Fraction
    shift: int
    spec: AppellSpec

    def evaluate(self, N: int, row_cap: Optional[int] = None) -> QSeries:
        value = series_shift(appell_m(self.spec, N - self.shift, row_cap), self.shift)
        return series_scale(value, self.coeff)

    def __str__(self) -> str:
        return f"{self.coeff}*q^{self.shift}*{self.spec}"


@dataclass(frozen=True)
class AppellForm:
    """Appell-Lerch terms plus theta quotients plus a Laurent polynomial."""
    appell_terms: Tuple[AppellTerm, ...] = ()
    quotients: Tuple[ThetaQuotient, ...] = ()
    constants: Tuple[Tuple[int, Fraction], ...] = ()

    def evaluate(self, N: int, row_cap: Optional[int] = None) -> QSeries:
        total = QSeries(dict(self.constants), N)
        for term in self.appell_terms:
            total = series_add(total, term.evaluate(N, row_cap))
        for quotient in self.quotients:
            total = series_add(total, quotient.evaluate(N))
        return total
