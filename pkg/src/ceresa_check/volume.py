"""Harmonic-volume traces, f(N, k), cyclic-quotient traces and verdicts.

All iterated integrals are of normalised forms omega^{a,b} along gamma_0, so
each integral of a single form equals 1.  The closed form used throughout is

    Gamma(a1+a2, b1+b2, a1+b1, a2+b2; a2, b1, a1+a2+b2, a1+b1+b2)
      * 3F2(a1, b2, a1+a2+b1+b2-1; a1+a2+b2, a1+b1+b2; 1)

with a_i = <a_i>/N and b_i = <b_i>/N; the 3F2 has excess exactly 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .chen import BetaForm, integral_len2
from .errors import AssumptionError, BudgetExceededError, CrossCheckError, DomainError, NotPrimeError
from .fermat import FermatIndex, IndexTriple, assumption_check, find_m, is_prime, units
from .numeric import (
    AUTO,
    EXTENDED,
    STANDARD,
    SeriesValue,
    frac_distance,
    sum_values,
)
from .specfun import Hyp3F2Params, beta, gamma_product, hyp3f2_unit

#: Smallest per-term budget binary64 is trusted with.
STANDARD_FLOOR = 1e-15
DEFAULT_TARGET_FRAC_ERROR = 1e-9
DEFAULT_MARGIN = 10.0

NONTRIVIAL = "nontrivial_numerical"
INCONCLUSIVE = "inconclusive"


def _gamma_times_hyp(nums, dens, params: Hyp3F2Params, target: float, precision: str) -> SeriesValue:
    """Gamma-ratio times 3F2 with total absolute error <= target.

    Both factors are evaluated in one precision; a budget failure in binary64
    escalates the whole term once to the extended context.
    """
    order = [STANDARD, EXTENDED] if precision in (STANDARD, AUTO) else [EXTENDED]
    last = None
    for prec in order:
        g = gamma_product(nums, dens, prec)
        # share the budget between the 3F2 error and the Gamma-ratio error
        hyp_target = 0.5 * target / max(float(abs(g.value)), 1e-300)
        try:
            f = hyp3f2_unit(params, hyp_target, prec)
        except BudgetExceededError as exc:
            last = exc
            continue
        term = g * f
        if term.abs_error <= target or prec == EXTENDED:
            return SeriesValue(term.value, term.abs_error, f.terms_used, f.method)
    raise BudgetExceededError(f"term budget {target:.3g} unreachable: {last}", best=getattr(last, "best", None))


def closed_form_parts(x1: FermatIndex, x2: FermatIndex):
    """Gamma numerators, denominators and 3F2 parameters of the closed form."""
    a1, b1, a2, b2 = x1.alpha, x1.beta, x2.alpha, x2.beta
    nums = [a1 + a2, b1 + b2, a1 + b1, a2 + b2]
    dens = [a2, b1, a1 + a2 + b2, a1 + b1 + b2]
    params = Hyp3F2Params(a1, b2, a1 + a2 + b1 + b2 - 1, a1 + a2 + b2, a1 + b1 + b2)
    assert params.excess == 1
    return nums, dens, params


def closed_iterated_integral(
    N: int,
    x1: FermatIndex,
    x2: FermatIndex,
    target: float = 1e-12,
    precision: str = AUTO,
    cross_check: bool = False,
) -> SeriesValue:
    """Iterated integral of omega^{x1} then omega^{x2} along gamma_0."""
    if not x1.N == x2.N == N:
        raise DomainError("indices do not belong to the given N")
    nums, dens, params = closed_form_parts(x1, x2)
    value = _gamma_times_hyp(nums, dens, params, target, precision)
    if cross_check:
        oracle = quadrature_iterated_integral(x1, x2)
        if abs(float(value.value) - oracle.value) > value.abs_error + oracle.abs_error:
            raise CrossCheckError(
                f"closed form {float(value.value)!r} vs quadrature {oracle.value!r} for {x1}, {x2}"
            )
    return value


def quadrature_iterated_integral(x1: FermatIndex, x2: FermatIndex, tol: float = 1e-12) -> SeriesValue:
    """The same integral from the quadrature oracle, divided by B^N_{a1,b1} B^N_{a2,b2}."""
    raw = integral_len2(BetaForm(x1.alpha, x1.beta), BetaForm(x2.alpha, x2.beta), tol=tol)
    norm = beta(x1.alpha, x1.beta) * beta(x2.alpha, x2.beta)
    v = raw.value / norm.value
    err = abs(v) * (raw.abs_error / abs(raw.value) + norm.abs_error / abs(norm.value)) * 1.0001
    return SeriesValue(v, err, raw.terms_used, "quadrature")


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceValue:
    triple: IndexTriple
    value: SeriesValue
    h_terms: tuple = ()


@dataclass(frozen=True)
class VolumeResult:
    """A prefactor times an ordered h-sum, with its fractional distance."""

    value: SeriesValue
    h_terms: tuple
    prefactor: int
    frac_distance: float
    precision: str


def _budget(target_frac_error: float, prefactor: int, count: int) -> float:
    return target_frac_error / (prefactor * max(count, 1) * 10)


def _start_precision(precision: str, eps_term: float) -> str:
    if precision == AUTO:
        return EXTENDED if eps_term < STANDARD_FLOOR else STANDARD
    if precision not in (STANDARD, EXTENDED):
        raise ValueError(f"unknown precision {precision!r}")
    return precision


def _assemble(h_terms, prefactor: int) -> VolumeResult:
    hsum = sum_values([sv for _, sv in h_terms])
    value = hsum.scale(prefactor)
    prec = EXTENDED if any(not isinstance(sv.value, float) for _, sv in h_terms) else STANDARD
    return VolumeResult(value, tuple(h_terms), prefactor, frac_distance(value.value), prec)


def trace_volume(t: IndexTriple, target_frac_error: float = DEFAULT_TARGET_FRAC_ERROR, precision: str = AUTO) -> TraceValue:
    """2 N^2 times the sum over units h (first two scaled indices holomorphic)
    of the iterated integrals of the scaled first two forms."""
    if not assumption_check(t):
        raise AssumptionError(f"triple {t} does not satisfy the assumption")
    N = t.N
    hs = [h for h in units(N) if t.t1.scaled(h).is_holo and t.t2.scaled(h).is_holo]
    prefactor = 2 * N * N
    eps = _budget(target_frac_error, prefactor, len(hs))
    prec = _start_precision(precision, eps)
    terms = [(h, closed_iterated_integral(N, t.t1.scaled(h), t.t2.scaled(h), eps, prec)) for h in hs]
    return TraceValue(t, _assemble(terms, prefactor).value, tuple(terms))


def fermat_h_values(N: int) -> list[int]:
    """0 < h < N/2 with gcd(h, N) = 1; there are phi(N)/2 of them."""
    return [h for h in range(1, (N + 1) // 2) if 2 * h < N and math.gcd(h, N) == 1]


def fermat_term(N: int, h: int, target: float, precision: str = AUTO) -> SeriesValue:
    """Iterated integral of omega^{h,-2h} then omega^{-2h,h} along gamma_0:
    Gamma(1-h/N)^4 / Gamma(1-2h/N)^2 * 3F2(h/N, h/N, 1-2h/N; 1, 1; 1)."""
    x = Fraction(h, N)
    params = Hyp3F2Params(x, x, 1 - 2 * x, 1, 1)
    return _gamma_times_hyp([1 - x] * 4, [1 - 2 * x] * 2, params, target, precision)


def check_k(N: int, k: int) -> None:
    if N < 4:
        raise DomainError(f"N must be >= 4, got {N}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if k >= 2 and 2 * k > N - 3:
        raise DomainError(f"k={k} exceeds (N-3)/2 for N={N}")


def max_k(N: int) -> int:
    return max(1, (N - 3) // 2)


@lru_cache(maxsize=4096)
def _fermat_hsum_terms(N: int, eps_term: float, precision: str) -> tuple:
    return tuple((h, fermat_term(N, h, eps_term, precision)) for h in fermat_h_values(N))


def f_value(
    N: int,
    k: int = 1,
    target_frac_error: float = DEFAULT_TARGET_FRAC_ERROR,
    precision: str = AUTO,
) -> VolumeResult:
    """f(N, k) = k! 2 N^(2k) * sum over 0<h<N/2, gcd(h,N)=1 of the Fermat terms.

    The h-sum is independent of k; it is accumulated in ascending h.
    """
    check_k(N, k)
    hs = fermat_h_values(N)
    prefactor = math.factorial(k) * 2 * N ** (2 * k)
    eps = _budget(target_frac_error, prefactor, len(hs))
    prec = _start_precision(precision, eps)
    return _assemble(_fermat_hsum_terms(N, eps, prec), prefactor)


def quotient_h_values(N: int, m: int) -> list[int]:
    return [h for h in range(1, N) if h + (h * m) % N + (h * m * m) % N == N]


def check_quotient(N: int, m: int) -> None:
    if N < 5:
        raise DomainError(f"quotient curves need a prime N >= 5, got {N}")
    if not is_prime(N):
        raise NotPrimeError(f"quotient curves need a prime N, got {N}")
    if N % 3 != 1:
        raise DomainError(f"N={N} is not 1 mod 3")
    if m not in find_m(N):
        raise DomainError(f"m={m} does not satisfy m^2 + m + 1 = 0 mod {N}")


def quotient_term(N: int, m: int, h: int, target: float, precision: str = AUTO) -> SeriesValue:
    """Gamma(1-h/N, 1-<hm^2>/N; <hm>/N)^2 * 3F2(h/N, <hm>/N, <hm^2>/N; 1, 1; 1)."""
    hm, hm2 = (h * m) % N, (h * m * m) % N
    x, y, z = Fraction(h, N), Fraction(hm, N), Fraction(hm2, N)
    params = Hyp3F2Params(x, y, z, 1, 1)
    return _gamma_times_hyp([1 - x, 1 - x, 1 - z, 1 - z], [y, y], params, target, precision)


def quotient_trace(
    N: int,
    m: int,
    target_frac_error: float = DEFAULT_TARGET_FRAC_ERROR,
    precision: str = AUTO,
) -> VolumeResult:
    """2 N^3 times the sum over h with h + <hm> + <hm^2> = N of the quotient terms."""
    check_quotient(N, m)
    hs = quotient_h_values(N, m)
    prefactor = 2 * N ** 3
    eps = _budget(target_frac_error, prefactor, len(hs))
    prec = _start_precision(precision, eps)
    terms = tuple((h, quotient_term(N, m, h, eps, prec)) for h in hs)
    return _assemble(terms, prefactor)


# --------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Curve:
    kind: str
    n: int
    m: int | None = None

    def __post_init__(self):
        if self.kind not in ("fermat", "quotient"):
            raise DomainError(f"unknown curve type {self.kind!r}")
        if self.kind == "fermat" and self.m is not None:
            raise DomainError("Fermat curves take no m")
        if self.kind == "quotient" and self.m is None:
            raise DomainError("quotient curves need m")

    @classmethod
    def fermat(cls, n: int) -> "Curve":
        return cls("fermat", n)

    @classmethod
    def quotient(cls, n: int, m: int) -> "Curve":
        return cls("quotient", n, m)

    def __str__(self) -> str:
        return f"F_{self.n}" if self.kind == "fermat" else f"C_{self.n}^(1,{self.m})"


@dataclass(frozen=True)
class Certificate:
    curve: Curve
    k: int
    value: SeriesValue
    frac_distance: float
    verdict: str
    h_terms: tuple
    eval_paths: frozenset = frozenset({"closed_form"})
    notes: tuple = field(default=())

    def __post_init__(self):
        if self.verdict not in (NONTRIVIAL, INCONCLUSIVE):
            raise ValueError(f"verdict {self.verdict!r} is not allowed")

    @property
    def nontrivial(self) -> bool:
        return self.verdict == NONTRIVIAL


RANGE_CAVEAT = (
    "range caveat: k=1 at N=4 lies outside 1 <= k <= (N-3)/2 of the nontriviality criterion; "
    "the value is reported but its implication is not covered there"
)
NONTORSION_NOTE = (
    "informational: nontorsion would follow if some h-term is not in Q(mu_N); "
    "this is not decidable numerically and is not part of the verdict"
)


def decide(frac_dist: float, abs_error: float, margin_factor: float) -> str:
    """One-sided test: never returns a 'trivial' verdict."""
    return NONTRIVIAL if frac_dist > margin_factor * abs_error else INCONCLUSIVE


def _cross_check_terms(curve: Curve, h_terms) -> list[str]:
    failures = []
    N = curve.n
    for h, sv in h_terms:
        if curve.kind == "fermat":
            x1, x2 = FermatIndex(N, h, -2 * h), FermatIndex(N, -2 * h, h)
        else:
            m = curve.m
            x1, x2 = FermatIndex(N, h, h * m), FermatIndex(N, h * m, h * m * m)
        oracle = quadrature_iterated_integral(x1, x2)
        gap = abs(float(sv.value) - oracle.value)
        if gap > sv.abs_error + oracle.abs_error:
            failures.append(f"h={h}: closed form and quadrature differ by {gap:.3g}")
    return failures


def verdict(
    curve: Curve,
    k: int = 1,
    margin_factor: float = DEFAULT_MARGIN,
    target_frac_error: float = DEFAULT_TARGET_FRAC_ERROR,
    precision: str = AUTO,
    cross_check: bool = False,
) -> Certificate:
    """Evaluate the curve's value and certify it noninteger when the fractional
    distance exceeds ``margin_factor`` times the error bound."""
    notes = []
    if curve.kind == "fermat":
        res = f_value(curve.n, k, target_frac_error, precision)
        if curve.n == 4:
            notes.append(RANGE_CAVEAT)
        notes.append(NONTORSION_NOTE)
    else:
        if k != 1:
            raise DomainError("quotient curves are evaluated for k = 1 only")
        res = quotient_trace(curve.n, curve.m, target_frac_error, precision)
    result = decide(res.frac_distance, res.value.abs_error, margin_factor)
    paths = {"closed_form"}
    if cross_check:
        failures = _cross_check_terms(curve, res.h_terms)
        if failures:
            result = INCONCLUSIVE
            notes.extend(failures)
        else:
            paths.add("quadrature")
    notes.append("eval_paths=" + ",".join(sorted(paths)))
    return Certificate(
        curve=curve,
        k=k,
        value=res.value,
        frac_distance=res.frac_distance,
        verdict=result,
        h_terms=res.h_terms,
        eval_paths=frozenset(paths),
        notes=tuple(notes),
    )
