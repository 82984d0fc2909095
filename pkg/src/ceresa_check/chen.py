"""Numerical oracle for Chen iterated integrals of Beta-type 1-forms on [0, 1].

A BetaForm stands for s**(alpha-1) * (1-s)**(beta-1) ds.  Length-1 integrals
are computed by quadrature; for length 2 the inner integral is an incomplete
beta function and only the outer integral is quadratured.  Endpoint
singularities at 0 and 1 are removed by power substitutions before the
tanh-sinh rule is applied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .numeric import EPS, RationalAngle, SeriesValue, as_fraction
from .quadrature import tanh_sinh
from .specfun import _ln_beta_float, _LANCZOS_REL, betainc_pair, betainc_scaled

DEFAULT_TOL = 1e-12
# relative accuracy assumed for the incomplete beta inner integral
_INNER_REL = 1e-14


@dataclass(frozen=True)
class BetaForm:
    """The 1-form s^(alpha-1) (1-s)^(beta-1) ds with 0 < alpha, beta <= 1."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta"):
            q = as_fraction(getattr(self, name))
            if not 0 < q <= 1:
                raise DomainError(f"BetaForm {name}={q} outside (0, 1]")
            object.__setattr__(self, name, q)

    @classmethod
    def of(cls, alpha, beta) -> "BetaForm":
        if isinstance(alpha, RationalAngle):
            alpha = alpha.fraction
        if isinstance(beta, RationalAngle):
            beta = beta.fraction
        return cls(alpha, beta)

    @property
    def a(self) -> float:
        return float(self.alpha)

    @property
    def b(self) -> float:
        return float(self.beta)

    def density(self, s, sc):
        """Integrand value at s with sc = 1 - s supplied separately."""
        return s ** (self.a - 1.0) * sc ** (self.b - 1.0)


def _check_interval(lo: float, hi: float) -> None:
    if not 0.0 <= lo < hi <= 1.0:
        raise DomainError(f"interval [{lo}, {hi}] not inside [0, 1]")


def _split_integral(left_exponent, left_integrand, right_exponent, right_integrand, lo, hi, tol):
    """Integrate over [lo, mid] and [mid, hi] with power substitutions at 0 and 1.

    ``left_integrand(s, sc)`` must equal integrand(s) / s**(p-1) near 0 where
    p = left_exponent; ``right_integrand(s, sc)`` equals integrand(s) /
    (1-s)**(q-1) near 1 with q = right_exponent.  Away from 0 and 1 the same
    callables are used with the power factors restored.
    """
    mid = 0.5 * (lo + hi)
    p, q = left_exponent, right_exponent

    if lo == 0.0:
        # s = u**(1/p): s**(p-1) ds = du / p
        def g_left(u):
            s = u ** (1.0 / p)
            return left_integrand(s, 1.0 - s) / p

        left = tanh_sinh(g_left, 0.0, mid ** p, tol / 2)
    else:
        left = tanh_sinh(lambda s: left_integrand(s, 1.0 - s) * s ** (p - 1.0), lo, mid, tol / 2)

    if hi == 1.0:
        # 1 - s = v**(1/q): (1-s)**(q-1) ds = -dv / q
        def g_right(v):
            sc = v ** (1.0 / q)
            return right_integrand(1.0 - sc, sc) / q

        right = tanh_sinh(g_right, 0.0, (1.0 - mid) ** q, tol / 2)
    else:
        right = tanh_sinh(lambda s: right_integrand(s, 1.0 - s) * (1.0 - s) ** (q - 1.0), mid, hi, tol / 2)
    return left + right


def integral_len1(w: BetaForm, lo: float = 0.0, hi: float = 1.0, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Quadrature value of the integral of ``w`` over [lo, hi] (default: B(alpha, beta))."""
    _check_interval(lo, hi)
    a, b = w.a, w.b
    res = _split_integral(
        a, lambda s, sc: sc ** (b - 1.0),
        b, lambda s, sc: s ** (a - 1.0),
        lo, hi, tol,
    )
    return SeriesValue(res.value, res.abs_error + 4 * EPS * abs(res.value), res.terms_used, "quadrature")


def integral_len2(
    w1: BetaForm, w2: BetaForm, lo: float = 0.0, hi: float = 1.0, tol: float = DEFAULT_TOL
) -> SeriesValue:
    """Iterated integral of w1 then w2 over lo <= s1 <= s2 <= hi."""
    _check_interval(lo, hi)
    a1, b1, a2, b2 = w1.a, w1.b, w2.a, w2.b
    lnb1 = _ln_beta_float(a1, b1)
    big_b1 = math.exp(lnb1)
    i_lo = float(betainc_pair([lo], [1.0 - lo], a1, b1, lnb1)[0][0]) if lo > 0 else 0.0

    def inner(s, sc):
        # B1 * (I_s - I_lo), evaluated through the complement near s = 1
        val, valc = betainc_pair(s, sc, a1, b1, lnb1)
        if lo == 0.0:
            return big_b1 * np.where(s < 0.5, val, 1.0 - valc)
        return big_b1 * (val - i_lo)

    if lo == 0.0:
        p = a1 + a2

        def left(s, sc):
            return sc ** (b2 - 1.0) * betainc_scaled(s, sc, a1, b1, lnb1)
    else:
        p = a2

        def left(s, sc):
            return sc ** (b2 - 1.0) * inner(s, sc)

    def right(s, sc):
        return s ** (a2 - 1.0) * inner(s, sc)

    res = _split_integral(p, left, b2, right, lo, hi, tol)
    err = res.abs_error + (_INNER_REL + 3 * _LANCZOS_REL) * abs(res.value) + 4 * EPS * abs(res.value)
    return SeriesValue(res.value, err, res.terms_used, "quadrature")


@dataclass(frozen=True)
class PathProductCheck:
    passed: bool
    residual: float
    tolerance: float
    whole: SeriesValue
    composed: SeriesValue


def check_path_product(w1: BetaForm, w2: BetaForm, split: float, tol: float = DEFAULT_TOL) -> PathProductCheck:
    """Check the composition law for the path [0,1] = [0,split] . [split,1].

    The iterated integral over the whole path must equal the sum of the
    iterated integrals over both pieces plus the product of the length-1
    integrals of w1 over the first piece and w2 over the second.
    """
    if not 0.0 < split < 1.0:
        raise DomainError(f"split must lie in (0, 1), got {split}")
    whole = integral_len2(w1, w2, tol=tol)
    first = integral_len2(w1, w2, 0.0, split, tol=tol)
    second = integral_len2(w1, w2, split, 1.0, tol=tol)
    cross = integral_len1(w1, 0.0, split, tol=tol) * integral_len1(w2, split, 1.0, tol=tol)
    composed = first + cross + second
    residual = abs(whole.value - composed.value)
    tolerance = whole.abs_error + composed.abs_error
    return PathProductCheck(residual <= tolerance, residual, tolerance, whole, composed)


def shuffle_residual(w1: BetaForm, w2: BetaForm, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(|int w1 w2 + int w2 w1 - int w1 * int w2|, combined error bound)."""
    lhs = integral_len2(w1, w2, tol=tol) + integral_len2(w2, w1, tol=tol)
    rhs = integral_len1(w1, tol=tol) * integral_len1(w2, tol=tol)
    return abs(lhs.value - rhs.value), lhs.abs_error + rhs.abs_error
