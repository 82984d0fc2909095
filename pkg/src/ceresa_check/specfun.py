"""Special functions with exact rational parameters and tracked error bounds.

Two arithmetic paths are available.  ``standard`` works in binary64;
``extended`` works in a fixed 160-bit context and is the escalation route
when an error budget is tighter than binary64 can deliver.  ``auto`` tries
``standard`` first and escalates once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import BudgetExceededError, DomainError, NonConvergentError
from .numeric import (
    AUTO,
    EPS,
    EXT,
    EXT_EPS,
    EXTENDED,
    STANDARD,
    CompensatedSum,
    RationalAngle,
    SeriesValue,
    as_fraction,
    to_ext,
)

# Lanczos coefficients, g = 671/128, 14 terms (Numerical Recipes, 3rd ed.).
_LANCZOS_G_SHIFT = 5.24218750000000000
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005

# Measured worst case of the Lanczos sum against a 50-digit reference on
# (0, 1e4] is below 2e-15 * max(1, |ln Gamma|); the bound keeps a 2.5x margin.
_LANCZOS_REL = 5e-15

_STIRLING_SHIFT = 40


def _check_precision(precision: str) -> None:
    if precision not in (STANDARD, EXTENDED, AUTO):
        raise ValueError(f"unknown precision {precision!r}")


def _lanczos_lngamma(x: float) -> float:
    y = x
    tmp = x + _LANCZOS_G_SHIFT
    tmp = (x + 0.5) * math.log(tmp) - tmp
    ser = _LANCZOS_C0
    for c in _LANCZOS_COF:
        y += 1.0
        ser += c / y
    return tmp + math.log(_SQRT_2PI * ser / x)


@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> tuple:
    """B_2, B_4, ..., B_{2*count} as exact fractions (Akiyama-Tanigawa)."""
    n_max = 2 * count
    out = []
    a = [Fraction(0)] * (n_max + 1)
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return tuple(out)


@lru_cache(maxsize=None)
def _stirling_coefficients():
    return tuple(
        to_ext(b / ((2 * j) * (2 * j - 1)))
        for j, b in enumerate(_bernoulli_even(40), start=1)
    )


def _stirling_lngamma(x):
    """ln Gamma in the extended context: upward shift plus Stirling series."""
    z = x
    prod = EXT.mpf(1)
    while z < _STIRLING_SHIFT:
        prod *= z
        z += 1
    lnz = EXT.log(z)
    s = (z - 0.5) * lnz - z + EXT.log(2 * EXT.pi) / 2
    zinv = 1 / z
    zinv2 = zinv * zinv
    p = zinv
    tol = EXT_EPS * 1e-3
    for c in _stirling_coefficients():
        term = c * p
        s += term
        if abs(term) < tol:
            break
        p *= zinv2
    lnprod = EXT.log(prod)
    # cancellation scale: the largest intermediate magnitude
    magnitude = float(abs(z * lnz)) + float(abs(lnprod))
    return s - lnprod, magnitude


def ln_gamma(x, precision: str = STANDARD) -> SeriesValue:
    """ln Gamma(x) for x > 0.

    Rational arguments are converted to floating point once, here.
    """
    _check_precision(precision)
    if precision == AUTO:
        precision = STANDARD
    if isinstance(x, (Fraction, RationalAngle, int)) and not isinstance(x, bool):
        return _ln_gamma_rational(as_fraction(x), precision)
    return _ln_gamma(x, precision)


@lru_cache(maxsize=65536)
def _ln_gamma_rational(q: Fraction, precision: str) -> SeriesValue:
    return _ln_gamma(q, precision)


def _ln_gamma(x, precision: str) -> SeriesValue:
    if isinstance(x, (Fraction, RationalAngle, int)) and not isinstance(x, bool):
        q = as_fraction(x)
        if q <= 0:
            raise DomainError(f"ln_gamma requires x > 0, got {q}")
        xf = q.numerator / q.denominator
        exact_arg = True
    else:
        xf = float(x)
        if not xf > 0 or math.isinf(xf):
            raise DomainError(f"ln_gamma requires finite x > 0, got {x!r}")
        q = None
        exact_arg = False

    if precision == EXTENDED:
        xe = to_ext(q) if exact_arg else EXT.mpf(x)
        v, magnitude = _stirling_lngamma(xe)
        err = 8 * EXT_EPS * max(1.0, magnitude)
        # argument rounding of the exact rational: |psi(x)| * |x| * eps
        err += 2 * EXT_EPS * (abs(math.log(xf)) + 1.0 / xf) * xf if exact_arg else 0.0
        return SeriesValue(v, err, 0, "closed_form")

    v = _lanczos_lngamma(xf)
    err = _LANCZOS_REL * max(1.0, abs(v))
    if exact_arg:
        err += EPS * xf * (abs(math.log(xf)) + 1.0 / xf)
    return SeriesValue(v, err, 0, "closed_form")


def gamma_product(numerators, denominators, precision: str = STANDARD) -> SeriesValue:
    """prod Gamma(numerators) / prod Gamma(denominators), evaluated in log space."""
    _check_precision(precision)
    if precision == AUTO:
        precision = STANDARD
    nums = [as_fraction(q) for q in numerators]
    dens = [as_fraction(q) for q in denominators]
    for q in nums + dens:
        if q <= 0:
            raise DomainError(f"gamma_product requires positive arguments, got {q}")
    counts: dict[Fraction, int] = {}
    for q in nums:
        counts[q] = counts.get(q, 0) + 1
    for q in dens:
        counts[q] = counts.get(q, 0) - 1
    zero = EXT.mpf(0) if precision == EXTENDED else 0.0
    acc = CompensatedSum(zero)
    err = 0.0
    for q in sorted(counts):
        c = counts[q]
        if c == 0:
            continue
        lg = ln_gamma(q, precision)
        acc.add(c * lg.value)
        err += abs(c) * lg.abs_error
    s = acc.value
    if precision == EXTENDED:
        v = EXT.exp(s)
        rel = err + 4 * EXT_EPS * (1 + abs(float(s)))
    else:
        v = math.exp(s)
        rel = err + 4 * EPS * (1 + abs(s))
    return SeriesValue(v, float(abs(v)) * rel * (1 + rel), 0, "closed_form")


def beta(u, v, precision: str = STANDARD) -> SeriesValue:
    """B(u, v) = Gamma(u) Gamma(v) / Gamma(u + v); symmetric to the last bit."""
    u = as_fraction(u)
    v = as_fraction(v)
    if u <= 0 or v <= 0:
        raise DomainError(f"beta requires u, v > 0, got ({u}, {v})")
    lo, hi = sorted((u, v))
    return gamma_product([lo, hi], [lo + hi], precision)


# --------------------------------------------------------------------------
# regularized incomplete beta (binary64, vectorised)

_CF_TINY = 1e-300
_CF_MAXIT = 500


def _betacf(x, a: float, b: float):
    """Continued fraction for I_x(a, b) by the modified Lentz method (arrays)."""
    x = np.asarray(x, dtype=float)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) <= 0.5 * EPS):
            return h, m
    raise BudgetExceededError(f"incomplete beta continued fraction did not converge (a={a}, b={b})")


def _ln_beta_float(a: float, b: float) -> float:
    return _lanczos_lngamma(a) + _lanczos_lngamma(b) - _lanczos_lngamma(a + b)


def betainc_pair(x, xc, a: float, b: float, lnbeta: float | None = None):
    """Return (I_x(a,b), 1 - I_x(a,b)) for arrays x and xc = 1 - x.

    Passing the complement separately keeps full relative accuracy when x
    is within rounding distance of 1.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xc = np.atleast_1d(np.asarray(xc, dtype=float))
    if lnbeta is None:
        lnbeta = _ln_beta_float(a, b)
    out = np.empty_like(x)
    outc = np.empty_like(x)
    lower = x < (a + 1.0) / (a + b + 2.0)
    with np.errstate(divide="ignore"):
        if np.any(lower):
            xl, xcl = x[lower], xc[lower]
            cf, _ = _betacf(xl, a, b)
            front = np.exp(a * np.log(xl) + b * np.log(xcl) - lnbeta)
            val = front * cf / a
            out[lower] = val
            outc[lower] = 1.0 - val
        upper = ~lower
        if np.any(upper):
            xu, xcu = x[upper], xc[upper]
            cf, _ = _betacf(xcu, b, a)
            front = np.exp(b * np.log(xcu) + a * np.log(xu) - lnbeta)
            val = front * cf / b
            outc[upper] = val
            out[upper] = 1.0 - val
    return out, outc


def betainc_scaled(x, xc, a: float, b: float, lnbeta: float | None = None):
    """B(a,b) * I_x(a,b) / x**a, finite as x -> 0 (no underflow of x**a)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xc = np.atleast_1d(np.asarray(xc, dtype=float))
    if lnbeta is None:
        lnbeta = _ln_beta_float(a, b)
    out = np.empty_like(x)
    lower = x < (a + 1.0) / (a + b + 2.0)
    if np.any(lower):
        cf, _ = _betacf(x[lower], a, b)
        out[lower] = xc[lower] ** b * cf / a
    upper = ~lower
    if np.any(upper):
        val, _ = betainc_pair(x[upper], xc[upper], a, b, lnbeta)
        out[upper] = math.exp(lnbeta) * val / x[upper] ** a
    return out


# Error model for betainc_pair: continued fraction to 0.5 ulp per step plus
# the prefactor exp(a ln x + b ln(1-x) - ln B), whose relative error scales
# with the magnitude of the exponent.
def _betainc_error(value: float, a: float, b: float, x: float, xc: float, lnbeta: float) -> float:
    expo = abs(lnbeta) + (abs(a * math.log(x)) if x > 0 else 0.0) + (abs(b * math.log(xc)) if xc > 0 else 0.0)
    return (64 * EPS + EPS * expo + _LANCZOS_REL * 3) * max(abs(value), abs(1 - value)) + 2 * EPS


def inc_beta_reg(x, u, v) -> SeriesValue:
    """Regularized incomplete beta I_x(u, v) for 0 <= x <= 1."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"inc_beta_reg requires 0 <= x <= 1, got {x}")
    uq, vq = as_fraction(u), as_fraction(v)
    if uq <= 0 or vq <= 0:
        raise DomainError("inc_beta_reg requires positive parameters")
    if x == 0.0:
        return SeriesValue(0.0, 0.0, 0, "closed_form")
    if x == 1.0:
        return SeriesValue(1.0, 0.0, 0, "closed_form")
    a, b = float(uq), float(vq)
    lnb = _ln_beta_float(a, b)
    val, _ = betainc_pair([x], [1.0 - x], a, b, lnb)
    val = float(val[0])
    return SeriesValue(val, _betainc_error(val, a, b, x, 1.0 - x, lnb), 0, "closed_form")


# --------------------------------------------------------------------------
# 3F2 at unit argument


@dataclass(frozen=True)
class Hyp3F2Params:
    """Parameters of 3F2(a1, a2, a3; b1, b2; 1), all exact rationals."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    b1: Fraction
    b2: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "b1", "b2"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        for b in (self.b1, self.b2):
            if b <= 0 and b.denominator == 1:
                raise DomainError(f"lower parameter {b} is a non-positive integer")

    @property
    def numerators(self) -> tuple:
        return (self.a1, self.a2, self.a3)

    @property
    def denominators(self) -> tuple:
        return (self.b1, self.b2)

    @property
    def excess(self) -> Fraction:
        return self.b1 + self.b2 - self.a1 - self.a2 - self.a3

    def terminating_order(self) -> int | None:
        """Index of the last nonzero term when some a_i is a non-positive integer."""
        orders = [-a for a in self.numerators if a <= 0 and a.denominator == 1]
        return int(min(orders)) if orders else None


def _convert(q: Fraction, precision: str):
    if precision == "exact":
        return q
    if precision == EXTENDED:
        return to_ext(q)
    return q.numerator / q.denominator


def hyp3f2_terms(p: Hyp3F2Params, count: int, precision: str = STANDARD) -> list:
    """First ``count`` series terms, generated by the Pochhammer recurrence.

    term[n+1] = term[n] * (a1+n)(a2+n)(a3+n) / ((b1+n)(b2+n)(1+n)); with
    ``precision="exact"`` the terms are Fractions.
    """
    a1, a2, a3, b1, b2 = (_convert(q, precision) for q in (p.a1, p.a2, p.a3, p.b1, p.b2))
    t = _convert(Fraction(1), precision)
    out = []
    for n in range(count):
        out.append(t)
        t = t * (a1 + n) * (a2 + n) * (a3 + n) / ((b1 + n) * (b2 + n) * (1 + n))
    return out


@dataclass(frozen=True)
class _Budget:
    levin_kmin: int
    levin_kmax: int
    direct_max_terms: int
    start: int = 1
    probe_terms: int = 24


_BUDGETS = {
    STANDARD: _Budget(levin_kmin=3, levin_kmax=24, direct_max_terms=20_000),
    EXTENDED: _Budget(levin_kmin=8, levin_kmax=72, direct_max_terms=4_000),
}


def levin_u(terms, sums, start: int, k: int, precision: str):
    """Levin u-transform L_k built from S_start..S_{start+k} with beta = 1.

    The weights (-1)^j C(k,j) (start+j+1)^(k-1) are exact integers; the
    common factor (start+k+1)^(k-1) cancels between numerator and
    denominator.
    """
    num = terms[0] * 0
    den = terms[0] * 0
    conv = to_ext if precision == EXTENDED else float
    for j in range(k + 1):
        n = start + j
        w = conv((-1) ** j * comb(k, j) * (n + 1) ** (k - 1))
        inv_omega = 1 / ((n + 1) * terms[n])
        num += w * sums[n] * inv_omega
        den += w * inv_omega
    return num / den


class _SeriesState:
    """Terms and compensated partial sums, extended on demand."""

    def __init__(self, p: Hyp3F2Params, precision: str, zero):
        self.params = tuple(_convert(q, precision) for q in (p.a1, p.a2, p.a3, p.b1, p.b2))
        self.terms = []
        self.sums = []
        self.acc = CompensatedSum(zero)
        self.abs_sum = 0.0
        self.next_term = _convert(Fraction(1), precision)

    def ensure(self, count: int) -> None:
        a1, a2, a3, b1, b2 = self.params
        t = self.next_term
        for n in range(len(self.terms), count):
            self.terms.append(t)
            self.acc.add(t)
            self.sums.append(self.acc.value)
            self.abs_sum += float(abs(t))
            t = t * (a1 + n) * (a2 + n) * (a3 + n) / ((b1 + n) * (b2 + n) * (1 + n))
        self.next_term = t


def _hyp3f2_at(p: Hyp3F2Params, target: float, precision: str, budget: _Budget) -> SeriesValue:
    eps = EXT_EPS if precision == EXTENDED else EPS
    zero = EXT.mpf(0) if precision == EXTENDED else 0.0

    order = p.terminating_order()
    if order is not None:
        exact = sum(hyp3f2_terms(p, order + 1, "exact"), Fraction(0))
        v = _convert(exact, precision)
        return SeriesValue(v, float(abs(v)) * eps, order + 1, "direct_sum")

    s = float(p.excess)
    state = _SeriesState(p, precision, zero)
    state.ensure(budget.probe_terms)

    # asymptotic tail of a series with terms ~ C n^(-s-1): |t_n| * n / s
    n_last = len(state.terms) - 1
    tail = float(abs(state.terms[n_last])) * (n_last + 1) / s
    roundoff = 4 * eps * state.abs_sum
    if 10 * tail + roundoff <= target:
        return SeriesValue(state.sums[n_last], 10 * tail + roundoff, n_last + 1, "direct_sum")
    log_ratio = math.log(10 * tail / max(target - roundoff, target * 1e-3)) / s
    n_needed = n_last * math.exp(min(log_ratio, 700.0))
    if n_needed <= budget.direct_max_terms:
        n_stop = int(math.ceil(n_needed)) + 1
        state.ensure(n_stop + 1)
        tail = float(abs(state.terms[-1])) * n_stop / s
        roundoff = 4 * eps * state.abs_sum
        return SeriesValue(state.sums[-1], 10 * tail + roundoff, len(state.terms), "direct_sum")

    start = budget.start
    best = None
    prev = prev2 = None
    for k in range(budget.levin_kmin - 2, budget.levin_kmax + 1):
        state.ensure(start + k + 1)
        lk = levin_u(state.terms, state.sums, start, k, precision)
        if prev is not None and prev2 is not None:
            d1 = float(abs(lk - prev))
            d2 = float(abs(prev - prev2))
            est = 10 * max(d1, d2) + 8 * eps * max(state.abs_sum, float(abs(lk)))
            if best is None or est < best.abs_error:
                best = SeriesValue(lk, est, start + k + 1, "levin_accelerated")
            if est <= target:
                return best
            if est > 1e6 * best.abs_error:
                break
        prev2, prev = prev, lk
    raise BudgetExceededError(
        f"3F2{p.numerators};{p.denominators} reached {best.abs_error if best else float('inf'):.3g}"
        f" > target {target:.3g} in {precision} precision",
        best=best,
    )


def hyp3f2_unit(p: Hyp3F2Params, target_abs_error: float = 1e-13, precision: str = AUTO) -> SeriesValue:
    """3F2(a1, a2, a3; b1, b2; 1) with absolute error at most ``target_abs_error``.

    Rapidly convergent series are summed directly; otherwise the partial
    sums are accelerated with the Levin u-transform, whose error estimate is
    ten times the larger of the last two successive differences.

    Raises NonConvergentError when the excess b1+b2-a1-a2-a3 is not positive
    and BudgetExceededError when the target cannot be met (``auto`` first
    escalates from binary64 to the extended context).
    """
    _check_precision(precision)
    if not target_abs_error > 0:
        raise ValueError("target_abs_error must be positive")
    if any(a == 0 for a in p.numerators):
        one = EXT.mpf(1) if precision == EXTENDED else 1.0
        return SeriesValue(one, 0.0, 1, "direct_sum")
    if p.terminating_order() is None and p.excess <= 0:
        raise NonConvergentError(f"3F2 at x=1 diverges: excess {p.excess} <= 0")
    if precision == AUTO:
        try:
            return _hyp3f2_at(p, target_abs_error, STANDARD, _BUDGETS[STANDARD])
        except BudgetExceededError:
            return _hyp3f2_at(p, target_abs_error, EXTENDED, _BUDGETS[EXTENDED])
    return _hyp3f2_at(p, target_abs_error, precision, _BUDGETS[precision])
