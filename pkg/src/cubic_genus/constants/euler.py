"""Prime sums and Euler products to high precision.

A per-prime quantity is described by a function ``g(x, r)`` of
``x = p^{-1/3}`` and ``r = p mod 3``, written with ordinary arithmetic so
that it can be evaluated both at numbers and at truncated power series.
Primes up to a cutoff P are summed exactly. For p > P the expansion
g = sum_m c_m x^m turns the tail into sum_m c_m T_r(m/3), where

    T_r(s) = sum_{p > P, p = r mod 3} p^{-s}

comes from log zeta and log L(s, chi_{-3}) by Moebius inversion. Only
s = m/3 with m >= 4 occur, so every tail converges.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import mpmath
from mpmath import mp, mpf

from ..arith import sieve_primes
from ..errors import DomainError
from .precision import PrecisionReal, Series, exp, precision

DEFAULT_CUTOFF = 1000

LocalFunction = Callable[[object, int], object]


def _mobius(n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


def _chi(p: int) -> int:
    r = p % 3
    return 0 if r == 0 else (1 if r == 1 else -1)


class PrimeTails:
    """T_all, T_chi and the per-class tails beyond a cutoff P at s = m/3."""

    def __init__(self, P: int):
        if P < 5:
            raise DomainError("tail cutoff must be at least 5")
        self.P = P
        self.primes = sieve_primes(P)
        self.x = {p: mpf(p) ** (-mpf(1) / 3) for p in self.primes}
        self.eps = mpf(10) ** (-(mp.dps + 5))
        self.logP = mpmath.log(P)
        # indices m beyond which T(m/3) is negligible
        self.m_cap = 3 * int((mp.dps + 8) * mpmath.log(10) / self.logP + 2) + 6
        self._all: dict[int, tuple] = {}
        self._chi: dict[int, tuple] = {}

    def bound(self, m: int) -> mpf:
        """Upper bound for sum_{p > P} p^{-m/3}."""
        s = mpf(m) / 3
        return mpf(self.P) ** (1 - s) / (s - 1)

    @lru_cache(maxsize=None)
    def _log_zeta_P(self, m: int) -> mpf:
        s = mpf(m) / 3
        v = mpmath.log(mpmath.zeta(s))
        for p in self.primes:
            v += mpmath.log1p(-self.x[p] ** m)
        return v

    @lru_cache(maxsize=None)
    def _log_L_P(self, m: int) -> mpf:
        s = mpf(m) / 3
        L = mpf(3) ** (-s) * (mpmath.zeta(s, mpf(1) / 3) - mpmath.zeta(s, mpf(2) / 3))
        v = mpmath.log(L)
        for p in self.primes:
            c = _chi(p)
            if c:
                v += mpmath.log1p(-c * self.x[p] ** m)
        return v

    def all(self, m: int) -> tuple[mpf, mpf]:
        """(value, error) of sum_{p>P} p^{-m/3}."""
        if m < 4:
            raise DomainError("prime tail diverges for s <= 1")
        if m in self._all:
            return self._all[m]
        if m > self.m_cap:
            out = (mpf(0), self.bound(m))
        else:
            v, err = mpf(0), mpf(0)
            k = 1
            while True:
                if k * m > self.m_cap:
                    # |log zeta_P(s)| <= 2 * bound(s); geometric in k
                    err += 4 * self.bound(k * m) / k
                    break
                mu = _mobius(k)
                if mu:
                    v += mu * self._log_zeta_P(k * m) / k
                k += 1
            out = (v, err)
        self._all[m] = out
        return out

    def chi(self, m: int) -> tuple[mpf, mpf]:
        """(value, error) of sum_{p>P} chi_{-3}(p) p^{-m/3}."""
        if m < 4:
            raise DomainError("prime tail diverges for s <= 1")
        if m in self._chi:
            return self._chi[m]
        if m > self.m_cap:
            out = (mpf(0), self.bound(m))
        else:
            v = self._log_L_P(m)
            err = mpf(0)
            j = 2
            while True:
                if j * m > self.m_cap:
                    err += 4 * self.bound(j * m) / j
                    break
                tv, te = self.all(j * m) if j % 2 == 0 else self.chi(j * m)
                v -= tv / j
                err += te / j
                j += 1
            out = (v, err)
        self._chi[m] = out
        return out

    def residue(self, m: int, r: int) -> tuple[mpf, mpf]:
        """Tail restricted to p = r mod 3 (r in {1, 2})."""
        a, ea = self.all(m)
        c, ec = self.chi(m)
        sign = 1 if r == 1 else -1
        return ((a + sign * c) / 2, (ea + ec) / 2)


@lru_cache(maxsize=None)
def prime_tails(P: int, dps: int) -> PrimeTails:
    with mp.workdps(dps):
        return PrimeTails(P)


def _series_length(tails: PrimeTails) -> int:
    return tails.m_cap + 4


def prime_sum(
    g: LocalFunction,
    include: Callable[[int], bool] | None = None,
    cutoff: int = DEFAULT_CUTOFF,
    residues: tuple[int, ...] = (0, 1, 2),
) -> PrecisionReal:
    """sum over primes p (with include(p) true) of g(p^{-1/3}, p mod 3).

    Only primes whose residue mod 3 lies in ``residues`` take part (residue
    0 is the prime 3). ``include`` may only exclude primes up to the cutoff.
    """
    with precision():
        tails = prime_tails(cutoff, mp.dps)
        total = mpf(0)
        for p in tails.primes:
            if include is not None and not include(p):
                continue
            if p % 3 not in residues:
                continue
            total += g(tails.x[p], p % 3)
        err = mpf(10) ** (-(mp.dps - 5)) * len(tails.primes)
        n = _series_length(tails)
        for r in (1, 2):
            if r not in residues:
                continue
            ser = g(Series.var(n), r)
            if not isinstance(ser, Series):
                raise DomainError("local function must be polynomial-rational in x")
            c = ser.c
            for m in range(4):
                if abs(c[m]) > 0:
                    raise DomainError(f"prime sum diverges: x^{m} coefficient is {c[m]}")
            for m in range(4, n):
                if c[m] == 0:
                    continue
                tv, te = tails.residue(m, r)
                total += c[m] * tv
                err += abs(c[m]) * te
            # remainder beyond the computed coefficients: the last block
            # decays geometrically at rate <= P^{-1/3}; bound by twice it
            last = sum(abs(c[m]) * tails.bound(m) for m in range(n - 4, n))
            err += 2 * last
        return PrecisionReal.with_error(total, err)


def euler_product(
    factor: LocalFunction,
    include: Callable[[int], bool] | None = None,
    cutoff: int = DEFAULT_CUTOFF,
    residues: tuple[int, ...] = (0, 1, 2),
) -> PrecisionReal:
    """prod over primes of factor(p^{-1/3}, p mod 3); factor = 1 + O(p^{-4/3})."""

    def logf(x, r):
        v = factor(x, r)
        if isinstance(v, Series):
            return v.log()
        return mpmath.log(v)

    return exp(prime_sum(logf, include, cutoff, residues))
