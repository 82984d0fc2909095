"""Index bookkeeping, periods and intersection pairings on the Fermat curve F_N.

A 1-form omega^{a,b} is labelled by (a, b) in (Z/NZ)^2 with a, b, a+b != 0.
Residues are reduced to representatives <a> in {1, ..., N-1} on construction.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

from .errors import DomainError, NotPrimeError
from .numeric import EPS, SeriesValue
from .specfun import beta


@dataclass(frozen=True)
class FermatIndex:
    N: int
    a: int
    b: int

    def __post_init__(self):
        if self.N < 4:
            raise DomainError(f"Fermat curves need N >= 4, got {self.N}")
        a, b = self.a % self.N, self.b % self.N
        if a == 0 or b == 0 or (a + b) % self.N == 0:
            raise DomainError(f"({self.a}, {self.b}) mod {self.N} is not in the index set")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def is_holo(self) -> bool:
        return self.a + self.b < self.N

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.a, self.N)

    @property
    def beta(self) -> Fraction:
        return Fraction(self.b, self.N)

    def scaled(self, h: int) -> "FermatIndex":
        return FermatIndex(self.N, h * self.a, h * self.b)

    def __neg__(self) -> "FermatIndex":
        return FermatIndex(self.N, -self.a, -self.b)

    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)


def is_index(N: int, a: int, b: int) -> bool:
    return a % N != 0 and b % N != 0 and (a + b) % N != 0


def units(N: int) -> list[int]:
    return [h for h in range(1, N) if math.gcd(h, N) == 1]


def index_set(N: int) -> list[FermatIndex]:
    """All (N-1)(N-2) valid indices, sorted by (a, b)."""
    if N < 4:
        raise DomainError(f"Fermat curves need N >= 4, got {N}")
    return [FermatIndex(N, a, b) for a in range(1, N) for b in range(1, N) if (a + b) % N]


def holo_index_set(N: int) -> list[FermatIndex]:
    return [x for x in index_set(N) if x.is_holo]


@dataclass(frozen=True)
class IndexTriple:
    t1: FermatIndex
    t2: FermatIndex
    t3: FermatIndex

    def __post_init__(self):
        if not self.t1.N == self.t2.N == self.t3.N:
            raise DomainError("index triple mixes different N")

    @classmethod
    def of(cls, N: int, *pairs: tuple[int, int]) -> "IndexTriple":
        if len(pairs) != 3:
            raise ValueError("need exactly three (a, b) pairs")
        return cls(*(FermatIndex(N, a, b) for a, b in pairs))

    @property
    def N(self) -> int:
        return self.t1.N

    def __iter__(self):
        return iter((self.t1, self.t2, self.t3))

    @cached_property
    def assumption_ok(self) -> bool:
        return assumption_check(self)


def assumption_check(t: IndexTriple) -> bool:
    """Sum of the three indices is (0, 0), and for every unit h the scaled first
    two indices are either both holomorphic or both not."""
    N = t.N
    if (t.t1.a + t.t2.a + t.t3.a) % N or (t.t1.b + t.t2.b + t.t3.b) % N:
        return False
    return all(t.t1.scaled(h).is_holo == t.t2.scaled(h).is_holo for h in units(N))


def strong_assumption_check(t: IndexTriple) -> bool:
    """assumption_check with the holomorphy condition required for all three indices."""
    if not assumption_check(t):
        return False
    return all(
        t.t1.scaled(h).is_holo == t.t2.scaled(h).is_holo == t.t3.scaled(h).is_holo
        for h in units(t.N)
    )


@dataclass(frozen=True)
class CyclotomicPoint:
    """The complex embedding xi -> zeta**h with zeta = exp(2 pi i / N)."""

    N: int
    h: int = 1

    def __post_init__(self):
        if math.gcd(self.h, self.N) != 1:
            raise DomainError(f"h={self.h} is not a unit mod {self.N}")
        object.__setattr__(self, "h", self.h % self.N)

    def power(self, e: int) -> complex:
        return zeta_power(self.N, self.h * e)


def zeta_power(N: int, e: int) -> complex:
    """exp(2 pi i e / N) with the exponent reduced first."""
    return cmath.exp(2j * math.pi * (e % N) / N)


# --------------------------------------------------------------------------
# exact arithmetic in Z[zeta]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients (constant term first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise DomainError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_divide(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _exact_divide(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        coef = num[i + len(den) - 1] // den[-1]
        out[i] = coef
        for j, d in enumerate(den):
            num[i + j] -= coef * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("polynomial division is not exact")
    return out


def reduce_cyclotomic(coeffs: list[int], N: int) -> tuple[int, ...]:
    """Reduce an integer polynomial in zeta modulo the N-th cyclotomic polynomial.

    Returns the coordinates in the power basis 1, zeta, ..., zeta^(phi(N)-1).
    """
    phi = list(cyclotomic_polynomial(N))
    deg = len(phi) - 1
    c = list(coeffs) + [0] * max(0, deg - len(coeffs))
    for i in range(len(c) - 1, deg - 1, -1):
        lead = c[i]
        if lead:
            for j, p in enumerate(phi):
                c[i - deg + j] -= lead * p
    return tuple(c[:deg])


def zeta_monomials(N: int, terms) -> tuple[int, ...]:
    """Power-basis coordinates of sum(coef * zeta**e) over (e, coef) pairs."""
    c = [0] * N
    for e, coef in terms:
        c[e % N] += coef
    return reduce_cyclotomic(c, N)


def evaluate_power_basis(coeffs, N: int, h: int = 1) -> complex:
    return sum(c * zeta_power(N, h * i) for i, c in enumerate(coeffs))


# --------------------------------------------------------------------------
# periods and pairings


@dataclass(frozen=True)
class PeriodValue:
    """Integral of omega_0^{a,b} over alpha^i beta^j kappa_0.

    ``coefficients`` are the exact power-basis coordinates of the integral of
    the normalised form omega^{a,b} = N omega_0^{a,b} / B(<a>/N, <b>/N).
    """

    value: SeriesValue
    coefficients: tuple[int, ...] = field(default=())


def gamma0_period(idx: FermatIndex) -> SeriesValue:
    """Integral of omega_0^{a,b} along gamma_0: B(<a>/N, <b>/N) / N."""
    return beta(idx.alpha, idx.beta).scale(Fraction(1, idx.N))


def period(N: int, i: int, j: int, idx: FermatIndex) -> PeriodValue:
    """Closed-form period B (1 - zeta^a)(1 - zeta^b) zeta^(ai + bj) / N."""
    if idx.N != N:
        raise DomainError(f"index belongs to N={idx.N}, not {N}")
    a, b = idx.a, idx.b
    base = a * i + b * j
    coeffs = zeta_monomials(N, [(base, 1), (base + a, -1), (base + b, -1), (base + a + b, 1)])
    z = evaluate_power_basis(coeffs, N)
    g0 = gamma0_period(idx)
    v = g0.value * z
    err = g0.abs_error * abs(z) + 8 * EPS * abs(g0.value) * sum(abs(c) for c in coeffs)
    return PeriodValue(SeriesValue(v, err, 0, "closed_form"), coeffs)


def intersection_pairing(x: FermatIndex, y: FermatIndex, at: CyclotomicPoint) -> SeriesValue:
    """(phi^{a,b}, phi^{c,d}) at xi -> zeta^h: N^2 (1-xi^a)(1-xi^b)/(1-xi^(a+b))
    when (a, b) = (-c, -d), else exactly 0."""
    if not x.N == y.N == at.N:
        raise DomainError("pairing arguments have different N")
    N = x.N
    if (x.a + y.a) % N or (x.b + y.b) % N:
        return SeriesValue(0j, 0.0, 0, "closed_form")
    num = (1 - at.power(x.a)) * (1 - at.power(x.b))
    den = 1 - at.power(x.a + x.b)
    v = N * N * num / den
    return SeriesValue(v, 16 * EPS * abs(v), 0, "closed_form")


# --------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def find_m(N: int) -> list[int]:
    """All 1 < m < N-1 with m^2 + m + 1 = 0 mod N, for a prime N >= 5.

    Empty exactly when N is not 1 mod 3.
    """
    if N < 5 or not is_prime(N):
        raise NotPrimeError(f"find_m requires a prime N >= 5, got {N}")
    return [m for m in range(2, N - 1) if (m * m + m + 1) % N == 0]
