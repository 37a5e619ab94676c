"""Special values: zeta at 2, 3, 5/3 and 1/3, and Gamma at 1/3 and 2/3.

Each value is computed by a method whose truncation error has an explicit
bound, and returned as a :class:`PrecisionReal`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

from ..errors import DomainError
from .precision import PrecisionReal, precision

SUPPORTED_ZETA = (Fraction(2), Fraction(3), Fraction(5, 3))


def _to_fraction(s) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, str):
        return Fraction(s)
    if isinstance(s, float):
        return Fraction(s).limit_denominator(100)
    return Fraction(s)


def zeta_euler_maclaurin(s, N: int = 40, K: int | None = None) -> PrecisionReal:
    """zeta(s) for real s != 1 by Euler-Maclaurin summation at the current precision.

    zeta(s) = sum_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2
              + sum_{k=1}^{K} B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1} + R,

    with |R| at most the first omitted term times |s+2K+1|/(s+2K+1) for
    s + 2K + 1 > 0.
    """
    s = mpmath.mpmathify(s)
    if s == 1:
        raise DomainError("zeta has a pole at 1")
    if K is None:
        K = max(10, int(mp.dps * 0.6) + 5)
    N = max(N, int(mp.dps) + 10)
    Nm = mpf(N)
    head = mpmath.fsum(mpf(n) ** (-s) for n in range(1, N))
    val = head + Nm ** (1 - s) / (s - 1) + Nm ** (-s) / 2
    poch = s  # s (s+1) ... (s+2k-2)
    term = mpf(0)
    for k in range(1, K + 2):
        term = mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) * poch * Nm ** (-s - 2 * k + 1)
        if k == K + 1:
            break
        val += term
        poch *= (s + 2 * k - 1) * (s + 2 * k)
    if s + 2 * K + 1 <= 0:
        raise DomainError("too few correction terms for this s")
    bound = abs(term) * abs(s + 2 * K + 1) / (s + 2 * K + 1)
    return PrecisionReal.with_error(val, bound)


@lru_cache(maxsize=None)
def _zeta_cached(s: Fraction, dps: int) -> PrecisionReal:
    with mp.workdps(dps):
        return zeta_euler_maclaurin(mpf(s.numerator) / s.denominator)


def zeta(s) -> PrecisionReal:
    """zeta(s) for s in {2, 3, 5/3}."""
    fs = _to_fraction(s)
    if fs not in SUPPORTED_ZETA:
        raise DomainError(f"zeta({s}) is not among the supported arguments 2, 3, 5/3")
    with precision():
        return _zeta_cached(fs, mp.dps)


def eta_alternating(s, n: int | None = None) -> PrecisionReal:
    """Dirichlet eta(s) = sum_{k>=0} (-1)^k (k+1)^{-s} for real s > 0.

    Cohen-Rodriguez Villegas-Zagier acceleration: the coefficients
    (k+1)^{-s} are moments of a positive weight on [0, 1], so the error
    after n terms is at most 2 / (3 + sqrt 8)^n.
    """
    s = mpmath.mpmathify(s)
    if s <= 0:
        raise DomainError("eta acceleration needs s > 0")
    if n is None:
        n = int(mp.dps * 1.35) + 10
    d = (3 + mpmath.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b = mpf(-1)
    c = -d
    acc = mpf(0)
    for k in range(n):
        c = b - c
        acc += c * mpf(k + 1) ** (-s)
        b = (k + n) * (k - n) * b / ((k + mpf(1) / 2) * (k + 1))
    bound = 2 / (3 + mpmath.sqrt(8)) ** n
    return PrecisionReal.with_error(acc / d, bound)


@lru_cache(maxsize=None)
def _zeta_third(dps: int) -> PrecisionReal:
    with mp.workdps(dps):
        s = mpf(1) / 3
        eta = eta_alternating(s)
        factor = 1 - mpf(2) ** (1 - s)
        return eta / factor


def zeta_one_third() -> PrecisionReal:
    """zeta(1/3), which is negative."""
    with precision():
        z = _zeta_third(mp.dps)
    if not z.value + z.err < 0:
        raise AssertionError("zeta(1/3) must be negative")
    return z


def zeta_one_third_continuation() -> PrecisionReal:
    """Second evaluation of zeta(1/3) by Euler-Maclaurin continuation."""
    with precision():
        return zeta_euler_maclaurin(mpf(1) / 3)


def _log_gamma_stirling(w, K: int) -> PrecisionReal:
    """log Gamma(w) for real w > 0 by the Stirling series with K correction terms.

    For real positive w the remainder is bounded by the first omitted
    term, |B_{2K+2}| / ((2K+2)(2K+1) w^{2K+1}).
    """
    val = (w - mpf(1) / 2) * mpmath.log(w) - w + mpmath.log(2 * mpmath.pi) / 2
    for k in range(1, K + 1):
        val += mpmath.bernoulli(2 * k) / (2 * k * (2 * k - 1) * w ** (2 * k - 1))
    bound = abs(mpmath.bernoulli(2 * K + 2)) / ((2 * K + 2) * (2 * K + 1) * w ** (2 * K + 1))
    return PrecisionReal.with_error(val, bound)


def gamma_rational(z) -> PrecisionReal:
    """Gamma(z) for real z > 0 by shifting up N steps and applying Stirling."""
    z = mpmath.mpmathify(z)
    if z <= 0:
        raise DomainError("gamma_rational needs z > 0")
    N = int(mp.dps) + 10
    K = int(mp.dps * 0.5) + 5
    lg = _log_gamma_stirling(z + N, K)
    prod = mpf(1)
    for j in range(N):
        prod *= z + j
    from .precision import exp

    return exp(lg) / prod


@lru_cache(maxsize=None)
def _gamma_cached(num: int, den: int, dps: int) -> PrecisionReal:
    with mp.workdps(dps):
        return gamma_rational(mpf(num) / den)


def gamma_two_thirds() -> PrecisionReal:
    with precision():
        return _gamma_cached(2, 3, mp.dps)


def gamma_one_third() -> PrecisionReal:
    with precision():
        return _gamma_cached(1, 3, mp.dps)
