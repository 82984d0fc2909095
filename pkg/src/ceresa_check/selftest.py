"""Oracle suites: each compares a production path against an independent one.

Suites return a SuiteResult carrying the worst residual seen, so the CLI can
print residual maxima and tests can assert on them.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath

from .chen import BetaForm, check_path_product, integral_len1, shuffle_residual
from .fermat import (
    FermatIndex,
    evaluate_power_basis,
    holo_index_set,
    index_set,
    is_prime,
    period,
    zeta_power,
)
from .specfun import Hyp3F2Params, beta, hyp3f2_unit
from .volume import (
    closed_iterated_integral,
    f_value,
    max_k,
    quadrature_iterated_integral,
)


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    max_residual: float = 0.0
    tolerance: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.trials > 0

    def record(self, label: str, residual: float, allowed: float) -> None:
        self.trials += 1
        self.max_residual = max(self.max_residual, residual)
        self.tolerance = max(self.tolerance, allowed)
        if not residual <= allowed:
            self.failures.append(f"{label}: residual {residual:.3g} > {allowed:.3g}")


def random_angle(rng: random.Random, max_den: int = 50) -> Fraction:
    q = rng.randint(2, max_den)
    return Fraction(rng.randint(1, q - 1), q)


def random_form(rng: random.Random, max_den: int = 50) -> BetaForm:
    return BetaForm(random_angle(rng, max_den), random_angle(rng, max_den))


def shuffle_suite(trials: int = 100, seed: int = 1) -> SuiteResult:
    """int w1 w2 + int w2 w1 = int w1 * int w2 within the propagated bounds."""
    rng = random.Random(seed)
    out = SuiteResult("shuffle")
    for _ in range(trials):
        w1, w2 = random_form(rng), random_form(rng)
        res, bound = shuffle_residual(w1, w2)
        out.record(f"{w1}, {w2}", res, bound)
    return out


def path_product_suite(trials: int = 100, seed: int = 2) -> SuiteResult:
    rng = random.Random(seed)
    out = SuiteResult("pathproduct")
    for i in range(trials):
        w1, w2 = random_form(rng), random_form(rng)
        split = (0.3, 0.5, 0.999, 0.001)[i % 4] if i < 8 else rng.uniform(0.01, 0.99)
        chk = check_path_product(w1, w2, split)
        out.record(f"{w1}, {w2}, split={split}", chk.residual, chk.tolerance)
    return out


def _gamma_ratio(nums, dens) -> mpmath.mpf:
    with mpmath.workdps(40):
        v = mpmath.mpf(1)
        for q in nums:
            v *= mpmath.gamma(mpmath.mpf(q.numerator) / q.denominator)
        for q in dens:
            v /= mpmath.gamma(mpmath.mpf(q.numerator) / q.denominator)
        return v


def gauss_cases(count: int = 20, seed: int = 3):
    """3F2(a, b, c; d, c; 1) = Gamma(d) Gamma(d-a-b) / (Gamma(d-a) Gamma(d-b))."""
    rng = random.Random(seed)
    cases = [(Fraction(1, 7), Fraction(2, 7), Fraction(1, 3), Fraction(6, 7))]
    while len(cases) < count:
        a, b, c = random_angle(rng, 30), random_angle(rng, 30), random_angle(rng, 30)
        d = a + b + Fraction(rng.randint(6, 30), 30)
        cases.append((a, b, c, d))
    return cases


def gauss_suite(count: int = 20, tol: float = 1e-11, seed: int = 3) -> SuiteResult:
    out = SuiteResult("gauss")
    for a, b, c, d in gauss_cases(count, seed):
        got = hyp3f2_unit(Hyp3F2Params(a, b, c, d, c), tol / 10)
        want = _gamma_ratio([d, d - a - b], [d - a, d - b])
        out.record(f"a={a} b={b} c={c} d={d}", float(abs(got.value - want)), tol)
    return out


def dixon_cases(count: int = 20, seed: int = 4):
    """Well-poised 3F2(a, b, c; 1+a-b, 1+a-c; 1) with Dixon's closed form."""
    rng = random.Random(seed)
    cases = [(Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))]
    while len(cases) < count:
        a = random_angle(rng, 30)
        b = random_angle(rng, 30) / 2
        c = random_angle(rng, 30) / 2
        cases.append((a, b, c))
    return cases


def dixon_value(a: Fraction, b: Fraction, c: Fraction):
    return _gamma_ratio(
        [1 + a / 2, 1 + a - b, 1 + a - c, 1 + a / 2 - b - c],
        [1 + a, 1 + a / 2 - b, 1 + a / 2 - c, 1 + a - b - c],
    )


def dixon_suite(count: int = 20, tol: float = 1e-11, seed: int = 4) -> SuiteResult:
    out = SuiteResult("dixon")
    for a, b, c in dixon_cases(count, seed):
        got = hyp3f2_unit(Hyp3F2Params(a, b, c, 1 + a - b, 1 + a - c), tol / 10)
        out.record(f"a={a} b={b} c={c}", float(abs(got.value - dixon_value(a, b, c))), tol)
    return out


def dualpath_suite(n: int | None = None, trials: int = 50, tol: float = 1e-9, seed: int = 5) -> SuiteResult:
    """Closed form vs quadrature oracle: every holomorphic pair for a given n,
    otherwise ``trials`` random pairs with N in [5, 31]."""
    out = SuiteResult("dualpath")
    if n is not None:
        holo = holo_index_set(n)
        pairs = [(n, x1, x2) for x1 in holo for x2 in holo]
    else:
        rng = random.Random(seed)
        pairs = []
        for _ in range(trials):
            N = rng.randint(5, 31)
            holo = holo_index_set(N)
            pairs.append((N, rng.choice(holo), rng.choice(holo)))
    for N, x1, x2 in pairs:
        closed = closed_iterated_integral(N, x1, x2, target=tol / 100)
        oracle = quadrature_iterated_integral(x1, x2)
        out.record(f"N={N} {x1.pair()} {x2.pair()}", abs(float(closed.value) - oracle.value), tol)
    return out


def periods_suite(count: int = 20, tol: float = 1e-8, seed: int = 6, max_prime: int = 31) -> SuiteResult:
    """Quadrature of omega_0 along gamma_0 vs B/N, and exact cyclotomic
    coordinates of the normalised periods over alpha^i beta^j kappa_0."""
    rng = random.Random(seed)
    out = SuiteResult("periods")
    for _ in range(count):
        N = rng.randint(4, 50)
        idx = rng.choice(index_set(N))
        numeric = integral_len1(BetaForm(idx.alpha, idx.beta)).value / N
        closed = float(beta(idx.alpha, idx.beta).value) / N
        out.record(f"gamma0 N={N} {idx.pair()}", abs(numeric - closed) / closed, tol)
    for N in (p for p in range(5, max_prime + 1) if is_prime(p)):
        worst = 0.0
        for idx in index_set(N):
            i, j = rng.randrange(N), rng.randrange(N)
            pv = period(N, i, j, idx)
            if not all(isinstance(c, int) for c in pv.coefficients):
                out.failures.append(f"N={N} {idx.pair()}: non-integer coefficient")
            direct = (1 - zeta_power(N, idx.a)) * (1 - zeta_power(N, idx.b)) * zeta_power(N, idx.a * i + idx.b * j)
            worst = max(worst, abs(evaluate_power_basis(pv.coefficients, N) - direct))
            normalised = pv.value.value * N / float(beta(idx.alpha, idx.beta).value)
            worst = max(worst, abs(normalised - direct))
        out.record(f"cyclotomic N={N}", worst, 1e-9)
    return out


def kscaling_suite(ns=(7, 8, 11), tol: float = 1e-12) -> SuiteResult:
    """f(N, k) = k! N^(2(k-1)) f(N, 1) to relative tol."""
    out = SuiteResult("kscaling")
    for N in ns:
        base = f_value(N, 1).value.value
        for k in range(2, max_k(N) + 1):
            fk = f_value(N, k).value.value
            want = base * math.factorial(k) * N ** (2 * (k - 1))
            out.record(f"N={N} k={k}", float(abs(fk - want) / abs(want)), tol)
    return out


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "shuffle": shuffle_suite,
    "pathproduct": path_product_suite,
    "gauss": gauss_suite,
    "dixon": dixon_suite,
    "dualpath": dualpath_suite,
    "periods": periods_suite,
    "kscaling": kscaling_suite,
}


def run_suite(name: str, trials: int | None = None, n: int | None = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if name in ("shuffle", "pathproduct"):
        return SUITES[name](trials=trials or 100)
    if name in ("gauss", "dixon", "periods"):
        return SUITES[name](count=trials or 20)
    if name == "dualpath":
        return dualpath_suite(n=n, trials=trials or 50)
    return kscaling_suite()
