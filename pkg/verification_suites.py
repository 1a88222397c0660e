"""Acceptance suites as picklable checks.

A :class:`Check` names a suite function and the item it runs on; the runner
ships checks to worker processes and :func:`execute_check` turns each into
verification records. Exceptions never escape a check: they become records
with status ``error``.
"""

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from bailey import (
    INF, PAIR_IDS, SQRT, LemmaWeights, RhoParam, SequenceMismatch, base_change, bailey_step, catalog_pair,
    change_of_base_beta_closed_form, compare_pairs, convergent_sum, dilate_pair, pair_alpha_from_beta,
    scale_pair, thm_main1, thm_main1_inverse, thm_main2, thm_main3, verify_pair,
)
from classical_mocks import CLASSICAL_MOCKS, eval_classical
from hecke_appell import AppellSpec, FSpec, appell_change_of_z, appell_m, hecke_f, hm_expand
from identities import (
    COROLLARY_IDS, MAIN_IDS, STARRED_IDS, compare, error_record, eval_double_sum, eval_form, identity_entry,
    limit_sides, starred_parts, verify_identity,
)
from qproducts import ThetaArg, binom2, parse_theta_quotient, poch_finite, poch_infinite, theta_j, theta_j_product
from qseries_types import (
    STATUS_EQUAL, STATUS_MISMATCH, InvalidSpec, MismatchDetail, NonGenericRho, QSeriesError, UnknownIdentityId,
    VerificationRecord,
)
from series_core import (
    Equal, QSeries, constant, evaluate_to_order, from_terms, monomial, series_add, series_divide, series_eq_upto,
    series_mul, series_scale, series_shift, series_sub, series_truncate, zero,
)

logger = logging.getLogger(__name__)

VERIFY_SETS = ("pairs", "transforms", "identities", "hm", "props", "all")
CHAINS = ("bk-to-andrews", "slater-to-corollaries")

CROSS_PATH_ORDER = 30
STARRED_ORDER = 20
HM_P4_ORDER = 30
CHAIN_N_MAX = 8
CLOSED_FORM_N_MAX = 6
RECURRENCE_N_MAX = 8


@dataclass(frozen=True)
class Check:
    """One unit of work for the runner; must stay picklable."""
    suite: str
    item_id: str
    label: str
    order: int
    n_max: int = 0
    row_cap: Optional[int] = None
    params: Tuple[Tuple[str, str], ...] = ()

    def param(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return dict(self.params).get(key, default)


def _sequence_record(item_id: str, label: str, report, N: int, started: float) -> VerificationRecord:
    elapsed = (time.perf_counter() - started) * 1000
    if report.equal:
        return VerificationRecord(item_id, label, STATUS_EQUAL, N, elapsed_ms=elapsed)
    detail = MismatchDetail(report.exponent, Fraction(report.left), Fraction(report.right), report.index)
    logger.warning(f"{item_id} {label}: {report.component}_{report.index} differs at q^{report.exponent}")
    return VerificationRecord(item_id, label, STATUS_MISMATCH, N, detail, elapsed,
                              detail=f"{report.component}_{report.index}")


def _compare_lists(component: str, left: Sequence[QSeries], right: Sequence[QSeries], N: int):
    for n, (a, b) in enumerate(zip(left, right)):
        report = series_eq_upto(a, b, N)
        if not report.equal:
            return SequenceMismatch(component, n, report.exponent, report.left, report.right)
    return Equal(N)


# Pairs

def run_pair(check: Check) -> List[VerificationRecord]:
    """Pair relation and its inversion for one catalog pair."""
    pair = catalog_pair(check.item_id)
    N, n_max = check.order, check.n_max
    started = time.perf_counter()
    records = [_sequence_record(check.item_id, "pair_relation", verify_pair(pair, n_max, N), N, started)]
    started = time.perf_counter()
    alphas = pair_alpha_from_beta(pair.beta, pair.base, n_max, N, pair.step)
    stored = [pair.alpha(n, N) for n in range(n_max + 1)]
    report = _compare_lists("alpha", stored, alphas, N)
    records.append(_sequence_record(check.item_id, "alpha_from_beta", report, N, started))
    return records


# Transforms

_RHO_CHOICES: Dict[str, Tuple[RhoParam, RhoParam]] = {
    "(inf,inf)": (INF, INF),
    "(-1,inf)": (RhoParam.finite(ThetaArg(-1, 0)), INF),
    "(-q,inf)": (RhoParam.finite(ThetaArg(-1, 1)), INF),
    "(q,inf)": (RhoParam.finite(ThetaArg(1, 1)), INF),
    "sqrt": (SQRT, SQRT),
    "(-1,-q)": (RhoParam.finite(ThetaArg(-1, 0)), RhoParam.finite(ThetaArg(-1, 1))),
}

# Seed -> (thm_main1 image, thm_main3 image).
_THEOREM_TARGETS = {
    "slater0": ("bk", "bk_q"),
    "slater1": ("cor1", "cor1q"),
    "slater2": ("cor2", "cor2q"),
    "slater3": ("cor3", "cor3q"),
}

# Bailey-lemma steps that produce the pairs behind the mock theta identities.
_LEMMA_TARGETS = (
    ("cor1", "(-1,inf)", "d1"),
    ("cor1q", "(-q,inf)", "d1q"),
    ("cor2", "(inf,inf)", "d2"),
    ("cor2q", "(inf,inf)", "d2q"),
    ("cor3", "(inf,inf)", "d3"),
    ("cor3q", "(inf,inf)", "d3q"),
)

_LEMMA_GRID_SEEDS = ("unit", "slater1", "bk", "bk_q")


def _recurrence_report(seed_id: str, n_max: int, N: int):
    """``a'_{n+2}/(1-q^{2n+4}) - q^{2n} a'_n/(1-q^{2n}) = -a_{n+1}`` for the thm_main1 image."""
    seed = catalog_pair(seed_id)
    image = thm_main1(seed)
    for n in range(n_max + 1):
        left = series_divide(image.alpha(n + 2, N), from_terms({0: 1, 2 * n + 4: -1}), N)
        if n > 0:
            second = series_shift(image.alpha(n, N - 2 * n), 2 * n)
            left = series_sub(left, series_divide(second, from_terms({0: 1, 2 * n: -1}), N))
        right = series_scale(seed.alpha(n + 1, N), -1)
        report = series_eq_upto(left, right, N)
        if not report.equal:
            return SequenceMismatch("alpha", n, report.exponent, report.left, report.right)
    return Equal(N)


def run_transform(check: Check) -> List[VerificationRecord]:
    op = check.param("op")
    N, n_max = check.order, check.n_max
    started = time.perf_counter()
    if op == "lemma":
        rho1, rho2 = _RHO_CHOICES[check.param("rho")]
        image = bailey_step(catalog_pair(check.item_id), rho1, rho2)
        target = check.param("target")
        if target:
            report = compare_pairs(image, catalog_pair(target), n_max, N)
        else:
            report = verify_pair(image, n_max, N)
        return [_sequence_record(check.item_id, check.label, report, N, started)]
    seed = catalog_pair(check.item_id)
    if op == "thm_main1":
        report = compare_pairs(thm_main1(seed), catalog_pair(check.param("target")), n_max, N)
    elif op == "thm_main3":
        report = compare_pairs(thm_main3(seed), catalog_pair(check.param("target")), n_max, N)
    elif op == "verify_thm_main1":
        report = verify_pair(thm_main1(seed), n_max, N)
    elif op == "verify_thm_main3":
        report = verify_pair(thm_main3(seed), n_max, N)
    elif op == "composition":
        report = compare_pairs(thm_main2(thm_main1(seed)), thm_main3(seed), n_max, N)
    elif op == "round_trip":
        report = compare_pairs(thm_main1_inverse(thm_main1(seed)), seed, n_max, N)
    elif op == "recurrence":
        report = _recurrence_report(check.item_id, min(n_max, RECURRENCE_N_MAX), N)
    else:
        raise InvalidSpec(f"unknown transform check {op!r}")
    return [_sequence_record(check.item_id, check.label, report, N, started)]


def transform_checks(order: int, n_max: int, row_cap: Optional[int] = None) -> List[Check]:
    checks = []
    for seed, (first, third) in _THEOREM_TARGETS.items():
        for op, label in (
            ("thm_main1", f"thm_main1={first}"),
            ("thm_main3", f"thm_main3={third}"),
            ("verify_thm_main1", "thm_main1 pair_relation"),
            ("verify_thm_main3", "thm_main3 pair_relation"),
            ("composition", "thm_main2*thm_main1=thm_main3"),
            ("round_trip", "thm_main1_inverse*thm_main1=id"),
            ("recurrence", "thm_main1 recurrence"),
        ):
            params = (("op", op),)
            if op in ("thm_main1", "thm_main3"):
                params += (("target", first if op == "thm_main1" else third),)
            checks.append(Check("transform", seed, label, order, n_max, row_cap, params))
    for seed, rho, target in _LEMMA_TARGETS:
        checks.append(Check("transform", seed, f"step{rho}={target}", order, n_max, row_cap,
                            (("op", "lemma"), ("rho", rho), ("target", target))))
    for seed in _LEMMA_GRID_SEEDS:
        pair = catalog_pair(seed)
        for rho, (rho1, rho2) in _RHO_CHOICES.items():
            try:
                LemmaWeights(pair.base_exp, pair.step, rho1, rho2)
            except NonGenericRho:
                logger.debug(f"Skipping non-generic step {rho} on {seed}")
                continue
            checks.append(Check("transform", seed, f"step{rho} pair_relation", order, min(n_max, CHAIN_N_MAX),
                                row_cap, (("op", "lemma"), ("rho", rho))))
    return checks


# Change-of-base chain

def run_chain(check: Check) -> List[VerificationRecord]:
    N = check.order
    started = time.perf_counter()
    andrews1 = catalog_pair("andrews1")
    if check.item_id == "andrews1":
        changed = scale_pair(base_change(catalog_pair("bk")), -2)
        report = compare_pairs(changed, dilate_pair(andrews1, 2), check.n_max, N)
    elif check.item_id == "andrews2":
        report = compare_pairs(thm_main2(scale_pair(andrews1, -1)), catalog_pair("andrews2"), check.n_max, N)
    elif check.item_id == "andrews0":
        report = compare_pairs(thm_main1_inverse(scale_pair(andrews1, -1)), catalog_pair("andrews0"),
                               check.n_max, N)
    elif check.item_id == "base_change":
        report = verify_pair(base_change(catalog_pair("bk")), check.n_max, N)
    elif check.item_id == "base_change_beta":
        changed = base_change(catalog_pair("bk"))
        stored = [changed.beta(n, N) for n in range(check.n_max + 1)]
        closed = [change_of_base_beta_closed_form(n, N) for n in range(check.n_max + 1)]
        report = _compare_lists("beta", stored, closed, N)
    else:
        raise InvalidSpec(f"unknown chain step {check.item_id!r}")
    return [_sequence_record(check.item_id, check.label, report, N, started)]


_CHAIN_STEPS = (
    ("andrews1", "-2*base_change(bk)=andrews1(q^2)", CHAIN_N_MAX),
    ("andrews2", "thm_main2(-andrews1)=andrews2", CHAIN_N_MAX),
    ("andrews0", "thm_main1_inverse(-andrews1)=andrews0", CHAIN_N_MAX),
    ("base_change", "base_change(bk) pair_relation", CHAIN_N_MAX),
    ("base_change_beta", "base_change(bk).beta closed form", CLOSED_FORM_N_MAX),
)


def chain_checks(order: int, n_max: int, row_cap: Optional[int] = None, steps: Iterable[str] = None) -> List[Check]:
    wanted = set(steps) if steps is not None else None
    return [
        Check("chain", item_id, label, order, min(n_max, cap), row_cap)
        for item_id, label, cap in _CHAIN_STEPS
        if wanted is None or item_id in wanted
    ]


def derive_checks(chain: str, order: int, n_max: int, row_cap: Optional[int] = None) -> List[Check]:
    """Checks for a named derivation chain; raises :class:`InvalidSpec` for an unknown chain."""
    if chain == "bk-to-andrews":
        return chain_checks(order, n_max, row_cap, ("andrews1", "andrews2", "andrews0"))
    if chain == "slater-to-corollaries":
        checks = []
        for seed in ("slater1", "slater2", "slater3"):
            first, third = _THEOREM_TARGETS[seed]
            checks.append(Check("transform", seed, f"thm_main1={first}", order, n_max, row_cap,
                                (("op", "thm_main1"), ("target", first))))
            checks.append(Check("transform", seed, f"thm_main3={third}", order, n_max, row_cap,
                                (("op", "thm_main3"), ("target", third))))
        return checks
    raise InvalidSpec(f"unknown chain: {chain}")


# Identities

def run_identity(check: Check) -> List[VerificationRecord]:
    return verify_identity(check.item_id, check.order, check.row_cap)


def run_classical(check: Check) -> List[VerificationRecord]:
    """Defining sum of a classical mock theta function against its Appell-Lerch form."""
    N = check.order
    started = time.perf_counter()
    mock = CLASSICAL_MOCKS[check.item_id]
    left = eval_classical(check.item_id, N, check.row_cap)
    right = mock.appell_form.evaluate(N, check.row_cap)
    return [compare(check.item_id, check.label, left, right, N, started)]


def run_starred(check: Check) -> List[VerificationRecord]:
    """Even and odd limits of a starred sum differ; their average matches the closed forms."""
    N = check.order
    started = time.perf_counter()
    parts = starred_parts(check.item_id, N, check.row_cap)
    report = series_eq_upto(parts.even, parts.odd, N)
    elapsed = (time.perf_counter() - started) * 1000
    if report.equal:
        records = [VerificationRecord(check.item_id, "even!=odd", STATUS_MISMATCH, N, elapsed_ms=elapsed,
                                      detail="even and odd partial sums agree")]
    else:
        records = [VerificationRecord(check.item_id, "even!=odd", STATUS_EQUAL, N, elapsed_ms=elapsed,
                                      detail=f"first difference at q^{report.exponent}")]
    average = series_scale(parts.value, identity_entry(check.item_id).double_sum.scale)
    for form in ("hecke_form", "appell_form"):
        started = time.perf_counter()
        try:
            other = eval_form(check.item_id, form, N, check.row_cap)
        except QSeriesError as e:
            logger.exception(f"Evaluating {check.item_id}.{form} failed")
            records.append(error_record(check.item_id, f"average={form}", N, e, started))
            continue
        records.append(compare(check.item_id, f"average={form}", average, other, N, started))
    return records


def run_cross_path(check: Check) -> List[VerificationRecord]:
    """Double sum and Hecke form against the two sides of the Bailey-lemma limit."""
    N = check.order
    started = time.perf_counter()
    lhs, rhs = limit_sides(check.item_id, N, check.row_cap)
    records = [compare(check.item_id, "double_sum=limit_lhs", eval_double_sum(check.item_id, N, check.row_cap),
                       lhs, N, started)]
    started = time.perf_counter()
    hecke = eval_form(check.item_id, "hecke_form", N, check.row_cap)
    records.append(compare(check.item_id, "hecke_form=limit_rhs", hecke, rhs, N, started))
    return records


def identity_checks(order: int, heavy_order: int, ids: Optional[Sequence[str]] = None,
                    row_cap: Optional[int] = None) -> List[Check]:
    """Identity, corollary, classical, starred and cross-path checks, optionally filtered by id."""
    selected = list(ids) if ids else list(MAIN_IDS) + list(COROLLARY_IDS)
    checks = []
    for item_id in selected:
        if item_id in CLASSICAL_MOCKS:
            if CLASSICAL_MOCKS[item_id].appell_form is None:
                raise UnknownIdentityId(f"unknown id: {item_id}")
            checks.append(Check("classical", item_id, "sum=appell_form", order, row_cap=row_cap))
            continue
        entry = identity_entry(item_id)
        N = min(order, heavy_order) if entry.heavy else order
        checks.append(Check("identity", item_id, "forms", N, row_cap=row_cap))
        if item_id in STARRED_IDS:
            checks.append(Check("starred", item_id, "starred", min(order, STARRED_ORDER), row_cap=row_cap))
        if entry.limit is not None:
            cross = min(order, CROSS_PATH_ORDER, heavy_order if entry.heavy else order)
            checks.append(Check("cross_path", item_id, "limit", cross, row_cap=row_cap))
    if not ids:
        for name, mock in CLASSICAL_MOCKS.items():
            if mock.appell_form is not None:
                checks.append(Check("classical", name, "sum=appell_form", order, row_cap=row_cap))
    return checks


# Hickerson-Mortenson expansions

def run_hm(check: Check) -> List[VerificationRecord]:
    N = check.order
    started = time.perf_counter()
    spec = identity_entry(check.item_id).hm_spec
    if spec is None:
        raise InvalidSpec(f"{check.item_id} has no f_{{n,n+p,n}} form")
    direct = hecke_f(FSpec(spec.n, spec.n + spec.p, spec.n, spec.x, spec.y, spec.base_dilation), N, check.row_cap)
    expanded = hm_expand(spec.n, spec.p, spec.x, spec.y, spec.base_dilation, N)
    return [compare(check.item_id, check.label, direct, expanded, N, started)]


def hm_checks(order: int, ids: Optional[Sequence[str]] = None, row_cap: Optional[int] = None) -> List[Check]:
    """By default only the generic specializations (x != y); W1-W4 run on explicit request."""
    checks = []
    for item_id in (ids or MAIN_IDS):
        spec = identity_entry(item_id).hm_spec
        if spec is None or (not ids and not spec.generic):
            continue
        N = min(order, HM_P4_ORDER) if spec.p == 4 else order
        checks.append(Check("hm", item_id, f"hecke_f=hm_expand(p={spec.p})", N, row_cap=row_cap))
    return checks


# Function laws

def _appell_samples() -> List[Tuple[ThetaArg, int, ThetaArg]]:
    """Generic (x, M, z) triples for the Appell-Lerch laws."""
    samples = []
    for modulus in (2, 3, 5):
        for x in (ThetaArg(1, 1), ThetaArg(-1, 1), ThetaArg(-1, 2), ThetaArg(1, -1)):
            for z in (ThetaArg(-1, 0), ThetaArg(1, 1), ThetaArg(-1, 3)):
                try:
                    AppellSpec(x, modulus, z)
                    AppellSpec(x.shift(modulus), modulus, z)
                except QSeriesError:
                    continue
                samples.append((x, modulus, z))
    return samples


def _law_records(item_id: str, cases, N: int) -> List[VerificationRecord]:
    """Compare each ``(label, left_fn, right_fn)``; a failing case becomes an error record."""
    records = []
    for label, left, right in cases:
        started = time.perf_counter()
        try:
            records.append(compare(item_id, label, left(), right(), N, started))
        except QSeriesError as e:
            logger.exception(f"{item_id} {label} failed")
            records.append(error_record(item_id, label, N, e, started))
    return records


def _scaled_by_arg(series: QSeries, arg: ThetaArg, power: int = 1) -> QSeries:
    """``arg**power * series``."""
    factor = arg ** power
    return series_scale(series_shift(series, factor.exp), factor.sign)


def _law_m1(N: int):
    for x, M, z in _appell_samples():
        yield (
            f"m({x}, q^{M}, {z})",
            lambda x=x, M=M, z=z: appell_m(AppellSpec(x, M, z), N),
            lambda x=x, M=M, z=z: series_truncate(
                _scaled_by_arg(appell_m(AppellSpec(x.inverse(), M, z.inverse()), N + x.exp), x, -1), N),
        )


def _law_m2(N: int):
    for x, M, z in _appell_samples():
        yield (
            f"m({x.shift(M)}, q^{M}, {z})",
            lambda x=x, M=M, z=z: appell_m(AppellSpec(x.shift(M), M, z), N),
            lambda x=x, M=M, z=z: series_truncate(
                series_sub(constant(1), _scaled_by_arg(appell_m(AppellSpec(x, M, z), N - x.exp), x)), N),
        )


def _law_m3(N: int):
    for x, M, z in _appell_samples():
        z0 = ThetaArg(-1, 1) if z != ThetaArg(-1, 1) else ThetaArg(-1, 0)
        try:
            AppellSpec(x, M, z0)
        except QSeriesError:
            continue
        yield (
            f"m({x}, q^{M}, {z}) - m({x}, q^{M}, {z0})",
            lambda x=x, M=M, z=z, z0=z0: series_sub(appell_m(AppellSpec(x, M, z), N),
                                                    appell_m(AppellSpec(x, M, z0), N)),
            lambda x=x, M=M, z=z, z0=z0: appell_change_of_z(x, M, z, z0).evaluate(N),
        )


def _law_mprod(N: int):
    yield (
        "m(q, q^2, -1)",
        lambda: appell_m(AppellSpec(ThetaArg(1, 1), 2, ThetaArg(-1, 0)), N),
        lambda: constant(Fraction(1, 2), N),
    )


_THETA_ARGS = (ThetaArg(1, 1), ThetaArg(-1, 1), ThetaArg(-1, 0), ThetaArg(1, 2), ThetaArg(-1, 3))


def _law_j1(N: int):
    """``j(q^{mn} x, q^m) = (-1)^n q^{-m C(n,2)} x^{-n} j(x, q^m)``, shifted side by the triple product."""
    for m in (1, 2, 5):
        for x in _THETA_ARGS:
            if x.sign == 1 and x.exp % m == 0:
                continue
            for n in range(-3, 4):
                offset = -m * binom2(n) - n * x.exp
                sign = (-1) ** abs(n) * x.sign ** abs(n)
                yield (
                    f"j(q^{m * n} * {x}, q^{m})",
                    lambda x=x, m=m, n=n: theta_j_product(x.shift(m * n), m, N),
                    lambda x=x, m=m, offset=offset, sign=sign: series_truncate(
                        series_scale(series_shift(theta_j(x, m, N - offset), offset), sign), N),
                )


def _law_j2(N: int):
    """``j(x, q^m) = j(q^m/x, q^m) = -x j(1/x, q^m)``."""
    for m in (1, 2, 5):
        for x in _THETA_ARGS:
            if x.sign == 1 and x.exp % m == 0:
                continue
            yield (
                f"j({x}, q^{m}) = j(q^{m}/{x}, q^{m})",
                lambda x=x, m=m: theta_j(x, m, N),
                lambda x=x, m=m: theta_j(ThetaArg(x.sign, m - x.exp), m, N),
            )
            yield (
                f"j({x}, q^{m}) = -x j(1/{x}, q^{m})",
                lambda x=x, m=m: theta_j(x, m, N),
                lambda x=x, m=m: series_truncate(
                    series_scale(_scaled_by_arg(theta_j(x.inverse(), m, N - x.exp), x), -1), N),
            )


def _law_theta_product(N: int):
    for m in (1, 2, 3, 8):
        for x in _THETA_ARGS:
            if x.sign == 1 and x.exp % m == 0:
                continue
            yield (
                f"j({x}, q^{m}) sum=product",
                lambda x=x, m=m: theta_j(x, m, N),
                lambda x=x, m=m: theta_j_product(x, m, N),
            )


def _law_littlefact1(N: int, n_max: int):
    """``(q^{-n})_k = (q)_n/(q)_{n-k} (-1)^k q^{C(k,2) - nk}``, both sides exact."""
    for n in range(n_max + 1):
        for k in range(n + 1):
            yield (
                f"(q^-{n})_{k}",
                lambda n=n, k=k: poch_finite(ThetaArg(1, -n), 1, k),
                lambda n=n, k=k: series_scale(
                    series_shift(poch_finite(ThetaArg(1, n - k + 1), 1, k), binom2(k) - n * k), (-1) ** k),
            )


def _littlefact2_sides(n: int, r: int, N: int) -> Tuple[QSeries, QSeries]:
    m = n - r
    total = zero(N)
    for k in range(m + 1):
        numerator = series_mul(poch_finite(ThetaArg(1, -m), 1, k), poch_finite(ThetaArg(-1, -m), 1, k))
        numerator = series_scale(series_shift(numerator, 2 * n * k), (-1) ** k)
        denominator = series_mul(poch_finite(ThetaArg(1, 1), 1, k), poch_finite(ThetaArg(1, 2 * r + 1), 1, k))
        total = series_add(total, series_divide(numerator, denominator, N))
    numerator = series_mul(series_add(constant(1), monomial(1, 2 * r)), poch_finite(ThetaArg(1, 1), 1, 2 * r))
    numerator = series_mul(numerator, poch_finite(ThetaArg(-1, 0), 1, 2 * n))
    right = series_divide(series_scale(numerator, Fraction(1, 2)), poch_finite(ThetaArg(1, 2), 2, n + r), N)
    return total, right


def _law_littlefact2(N: int, n_max: int):
    for n in range(n_max + 1):
        for r in range(n + 1):
            yield (
                f"n={n} r={r}",
                lambda n=n, r=r: _littlefact2_sides(n, r, N)[0],
                lambda n=n, r=r: _littlefact2_sides(n, r, N)[1],
            )


def _chu_vandermonde_sides(n: int, step: int, a: ThetaArg, c: ThetaArg, N: int) -> Tuple[QSeries, QSeries]:
    """``sum_k (a)_k (q^{-n})_k / ((q)_k (c)_k) (c q^n / a)^k = (c/a)_n / (c)_n`` in base ``q^step``."""
    ratio = c.shift(step * n) / a
    total = zero(N)
    for k in range(n + 1):
        numerator = series_mul(poch_finite(a, step, k), poch_finite(ThetaArg(1, -step * n), step, k))
        numerator = _scaled_by_arg(numerator, ratio, k)
        denominator = series_mul(poch_finite(ThetaArg(1, step), step, k), poch_finite(c, step, k))
        total = series_add(total, series_divide(numerator, denominator, N))
    right = series_divide(poch_finite(c / a, step, n), poch_finite(c, step, n), N)
    return total, right


def _law_chu_vandermonde(N: int, n_max: int):
    # base q^2, a = q, c = q^3 as used for the change-of-base closed form
    for n in range(n_max + 1):
        yield (
            f"q^2 base a=q c=q^3 n={n}",
            lambda n=n: _chu_vandermonde_sides(n, 2, ThetaArg(1, 1), ThetaArg(1, 3), N)[0],
            lambda n=n: _chu_vandermonde_sides(n, 2, ThetaArg(1, 1), ThetaArg(1, 3), N)[1],
        )


def _heine_sides(a: ThetaArg, b: ThetaArg, c: ThetaArg, z: ThetaArg, N: int) -> Tuple[QSeries, QSeries]:
    """Both sides of the second Heine transformation."""
    q = ThetaArg(1, 1)

    def left_term(k: int) -> QSeries:
        numerator = _scaled_by_arg(series_mul(poch_finite(a, 1, k), poch_finite(b, 1, k)), z, k)
        return series_divide(numerator, series_mul(poch_finite(c, 1, k), poch_finite(q, 1, k)), N)

    left = convergent_sum(left_term, N, label="heine lhs")

    def build(working: int) -> QSeries:
        def right_term(k: int) -> QSeries:
            numerator = series_mul(poch_finite(a * b * z / c, 1, k), poch_finite(b, 1, k))
            numerator = _scaled_by_arg(numerator, c / b, k)
            return series_divide(numerator, series_mul(poch_finite(b * z, 1, k), poch_finite(q, 1, k)), working)

        body = convergent_sum(right_term, working, label="heine rhs")
        numerator = series_mul(poch_infinite(c / b, 1, working), poch_infinite(b * z, 1, working))
        denominator = series_mul(poch_infinite(c, 1, working), poch_infinite(z, 1, working))
        return series_mul(series_divide(numerator, denominator, working), body)

    return left, evaluate_to_order(build, N)


def _law_heine(N: int, n_max: int):
    # z = -q^{2n}, a = q^{r-n}, b = -q^{r-n}, c = q^{2r+1}, which gives the second auxiliary sum
    for n in range(1, n_max + 1):
        for r in range(n + 1):
            args = (ThetaArg(1, r - n), ThetaArg(-1, r - n), ThetaArg(1, 2 * r + 1), ThetaArg(-1, 2 * n))
            yield (
                f"n={n} r={r}",
                lambda args=args: _heine_sides(*args, N)[0],
                lambda args=args: _heine_sides(*args, N)[1],
            )


_LAWS: Dict[str, Callable[..., Iterable]] = {
    "m1": _law_m1,
    "m2": _law_m2,
    "m3": _law_m3,
    "mprod": _law_mprod,
    "j1": _law_j1,
    "j2": _law_j2,
    "theta_product": _law_theta_product,
}

_SUM_LAWS: Dict[str, Callable[..., Iterable]] = {
    "littlefact1": _law_littlefact1,
    "littlefact2": _law_littlefact2,
    "chu_vandermonde": _law_chu_vandermonde,
    "heine": _law_heine,
}

LAW_IDS = tuple(_LAWS) + tuple(_SUM_LAWS)


def run_law(check: Check) -> List[VerificationRecord]:
    N = check.order
    if check.item_id in _LAWS:
        cases = _LAWS[check.item_id](N)
    elif check.item_id in _SUM_LAWS:
        cases = _SUM_LAWS[check.item_id](N, check.n_max)
    else:
        raise InvalidSpec(f"unknown law {check.item_id!r}")
    return _law_records(check.item_id, cases, N)


def law_checks(order: int, n_max: int, row_cap: Optional[int] = None) -> List[Check]:
    sum_n_max = min(n_max, CLOSED_FORM_N_MAX)
    return [
        Check("law", law, "law", order, sum_n_max if law in _SUM_LAWS else 0, row_cap)
        for law in LAW_IDS
    ]


SUITES: Dict[str, Callable[[Check], List[VerificationRecord]]] = {
    "pair": run_pair,
    "transform": run_transform,
    "chain": run_chain,
    "identity": run_identity,
    "classical": run_classical,
    "starred": run_starred,
    "cross_path": run_cross_path,
    "hm": run_hm,
    "law": run_law,
}


def execute_check(check: Check) -> List[VerificationRecord]:
    """Run one check; any failure becomes an ``error`` record."""
    started = time.perf_counter()
    try:
        suite = SUITES[check.suite]
    except KeyError:
        return [error_record(check.item_id, check.label, check.order,
                             InvalidSpec(f"unknown suite {check.suite!r}"), started)]
    try:
        records = suite(check)
    except Exception as e:
        logger.exception(f"Check {check.suite}:{check.item_id} ({check.label}) failed")
        return [error_record(check.item_id, check.label, check.order, e, started)]
    logger.debug(f"Check {check.suite}:{check.item_id} produced {len(records)} records")
    return records


def pair_checks(order: int, n_max: int, ids: Optional[Sequence[str]] = None,
                row_cap: Optional[int] = None) -> List[Check]:
    selected = list(ids) if ids else list(PAIR_IDS)
    for pair_id in selected:
        catalog_pair(pair_id)
    return [Check("pair", pair_id, "pair", order, n_max, row_cap) for pair_id in selected]


def verify_checks(verify_set: str, order: int, n_max: int, heavy_order: int,
                  ids: Optional[Sequence[str]] = None, row_cap: Optional[int] = None) -> List[Check]:
    """Checks for one ``verify --set`` value; raises for an unknown set or id."""
    if verify_set not in VERIFY_SETS:
        raise InvalidSpec(f"unknown set: {verify_set}")
    checks: List[Check] = []
    if verify_set in ("pairs", "all"):
        checks += pair_checks(order, n_max, ids if verify_set == "pairs" else None, row_cap)
    if verify_set in ("transforms", "all"):
        checks += transform_checks(order, n_max, row_cap)
        checks += chain_checks(order, n_max, row_cap)
    if verify_set in ("identities", "all"):
        checks += identity_checks(order, heavy_order, ids if verify_set == "identities" else None, row_cap)
    if verify_set in ("hm", "all"):
        checks += hm_checks(order, ids if verify_set == "hm" else None, row_cap)
    if verify_set in ("props", "all"):
        checks += law_checks(order, n_max, row_cap)
    return checks


def expand_target(target: str, N: int, row_cap: Optional[int] = None) -> QSeries:
    """Series behind an expand target.

    Targets: ``omega`` (classical mock), ``M5`` or ``M5.appell_form`` (identity
    form, the double sum by default), ``bk.beta.3`` (pair component) and
    J-symbol quotients such as ``"J6^3 / J2 J3,6"``.
    """
    if target in CLASSICAL_MOCKS:
        return eval_classical(target, N, row_cap)
    if target.startswith("J"):
        return parse_theta_quotient(target).evaluate(N)
    head, _, rest = target.partition(".")
    if head in PAIR_IDS:
        component, _, index = rest.partition(".")
        if component not in ("alpha", "beta") or not index.lstrip("-").isdigit():
            raise UnknownIdentityId(f"unknown id: {target}")
        pair = catalog_pair(head)
        sequence = pair.alpha if component == "alpha" else pair.beta
        return sequence(int(index), N)
    form = rest or "double_sum"
    entry = identity_entry(head)
    if form not in entry.forms:
        raise UnknownIdentityId(f"unknown id: {target}")
    return eval_form(head, form, N, row_cap)
