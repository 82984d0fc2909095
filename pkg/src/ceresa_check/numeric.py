"""Value carriers, exact rational parameters and compensated accumulation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

import mpmath

from .errors import DomainError

#: Working context for the extended-precision path.  Never mutated after
#: import, so concurrent readers see a fixed precision.
EXT = mpmath.MPContext()
EXT.prec = 160

#: Relative rounding unit of the extended context.
EXT_EPS = 2.0 ** (1 - EXT.prec)
EPS = 2.0 ** -52
_TINY = math.ulp(0.0)

_EXT_TYPES = (EXT.mpf, EXT.mpc, mpmath.mpf, mpmath.mpc)

STANDARD = "standard"
EXTENDED = "extended"
AUTO = "auto"
PRECISIONS = (STANDARD, EXTENDED)

METHODS = ("direct_sum", "levin_accelerated", "closed_form", "quadrature")


@dataclass(frozen=True)
class RationalAngle:
    """Exact rational ``numerator/denominator`` kept in lowest terms.

    By default the value must lie strictly inside (0, 1); ``general=True``
    admits any positive rational (sums of angles, for instance).
    """

    numerator: int
    denominator: int
    general: bool = False

    def __post_init__(self):
        if self.denominator <= 0:
            raise DomainError("denominator must be positive")
        g = math.gcd(self.numerator, self.denominator)
        object.__setattr__(self, "numerator", self.numerator // g)
        object.__setattr__(self, "denominator", self.denominator // g)
        if self.numerator <= 0:
            raise DomainError(f"angle must be positive, got {self.numerator}/{self.denominator}")
        if not self.general and self.numerator >= self.denominator:
            raise DomainError(
                f"angle {self.numerator}/{self.denominator} not in (0, 1); pass general=True"
            )

    @classmethod
    def of(cls, value) -> "RationalAngle":
        q = as_fraction(value)
        return cls(q.numerator, q.denominator, general=not (0 < q < 1))

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self) -> float:
        return self.numerator / self.denominator

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def as_fraction(x) -> Fraction:
    """Convert an exact rational input (int, Fraction, RationalAngle) to Fraction."""
    if isinstance(x, RationalAngle):
        return x.fraction
    if isinstance(x, bool):
        raise TypeError("bool is not a rational parameter")
    if isinstance(x, Rational):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def to_ext(x):
    """Exact-as-possible conversion into the extended context."""
    if isinstance(x, RationalAngle):
        x = x.fraction
    if isinstance(x, Fraction):
        return EXT.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return EXT.mpf(x)
    if isinstance(x, complex):
        return EXT.mpc(x)
    return EXT.mpf(x)


def to_standard(x) -> float:
    if isinstance(x, RationalAngle):
        return float(x)
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)


def is_extended(x) -> bool:
    return isinstance(x, _EXT_TYPES)


@dataclass(frozen=True)
class SeriesValue:
    """A numerical value with an absolute error bound and evaluation metadata.

    ``value`` is a Python float/complex on the standard path and an mpmath
    number on the extended path.
    """

    value: object
    abs_error: float
    terms_used: int = 0
    method: str = "closed_form"

    def __post_init__(self):
        err = float(self.abs_error)
        if not (err >= 0.0) or math.isinf(err):
            raise ValueError(f"abs_error must be finite and >= 0, got {self.abs_error!r}")
        object.__setattr__(self, "abs_error", err)
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not _finite(self.value):
            raise ValueError(f"value must be finite, got {self.value!r}")

    def __float__(self) -> float:
        return float(self.value)

    def __complex__(self) -> complex:
        return complex(self.value)

    def __add__(self, other):
        if isinstance(other, SeriesValue):
            return SeriesValue(
                self.value + other.value,
                _up(self.abs_error + other.abs_error + _round_err(self.value + other.value)),
                self.terms_used + other.terms_used,
                self.method,
            )
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SeriesValue):
            return self + other.scale(-1)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, SeriesValue):
            a, b = self.value, other.value
            err = (
                abs(a) * other.abs_error
                + abs(b) * self.abs_error
                + self.abs_error * other.abs_error
                + _round_err(a * b)
            )
            return SeriesValue(a * b, _up(float(err)), self.terms_used + other.terms_used, self.method)
        return NotImplemented

    def scale(self, factor) -> "SeriesValue":
        """Multiply by an exactly known factor (int/Fraction/float)."""
        if isinstance(factor, Fraction):
            f = to_ext(factor) if is_extended(self.value) else to_standard(factor)
        else:
            f = factor
        v = self.value * f
        return SeriesValue(v, _up(float(abs(f)) * self.abs_error + _round_err(v)), self.terms_used, self.method)

    def with_method(self, method: str) -> "SeriesValue":
        return SeriesValue(self.value, self.abs_error, self.terms_used, method)


def _finite(v) -> bool:
    if isinstance(v, _EXT_TYPES):
        return bool(EXT.isfinite(v))
    if isinstance(v, complex):
        return math.isfinite(v.real) and math.isfinite(v.imag)
    return math.isfinite(float(v))


def _up(err: float) -> float:
    # the bound itself is computed in floats: cover its rounding and underflow
    return err * (1 + 4 * EPS) + 4 * _TINY


def _round_err(v) -> float:
    eps = EXT_EPS if is_extended(v) else EPS
    return float(abs(v)) * eps


class CompensatedSum:
    """Neumaier-compensated running sum; works for floats and mpmath numbers."""

    __slots__ = ("total", "comp", "count")

    def __init__(self, zero=0.0):
        self.total = zero
        self.comp = zero * 0
        self.count = 0

    def add(self, x) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t
        self.count += 1

    def extend(self, xs: Iterable) -> "CompensatedSum":
        for x in xs:
            self.add(x)
        return self

    @property
    def value(self):
        return self.total + self.comp


def compensated_sum(xs: Iterable, zero=0.0):
    return CompensatedSum(zero).extend(xs).value


def sum_values(values: Iterable[SeriesValue], method: str = "closed_form") -> SeriesValue:
    """Ordered compensated sum of SeriesValues with additive error propagation."""
    values = list(values)
    if not values:
        return SeriesValue(0.0, 0.0, 0, method)
    zero = values[0].value * 0
    acc = CompensatedSum(zero)
    err = 0.0
    terms = 0
    for sv in values:
        acc.add(sv.value)
        err += sv.abs_error
        terms += sv.terms_used
    total = acc.value
    # compensated summation: error independent of the count to first order
    err += 2 * _round_err(total)
    return SeriesValue(total, err, terms, method)


def frac_distance(x) -> float:
    """Distance from ``x`` to the nearest integer, computed in x's own precision."""
    if is_extended(x):
        return float(abs(x - EXT.nint(x)))
    x = float(x)
    return abs(x - round(x))


Number = Union[int, float, Fraction, RationalAngle]
