"""Exact integer arithmetic: sieving, factorization, Kronecker symbols.

Everything here works on Python ints. The numba kernels in
:mod:`cubic_genus.cubic_enum` carry their own int64 copies of the few
routines they need in the hot loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .errors import DomainError, ResourceError

# Sieve memory cap in bytes (one byte per integer).
SIEVE_BUDGET = 200_000_000

_MAX_FACTOR = 1 << 63


def sieve_primes(limit: int) -> list[int]:
    """Primes ``<= limit`` in ascending order."""
    if limit < 1:
        raise DomainError(f"sieve limit must be positive, got {limit}")
    if limit == 1:
        return []
    if limit + 1 > SIEVE_BUDGET:
        raise ResourceError(f"sieve limit {limit} exceeds memory budget {SIEVE_BUDGET}")
    flags = bytearray(b"\x01") * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


class _PrimeCache:
    """Lazily grown shared prime table (read-only once built)."""

    def __init__(self) -> None:
        self.limit = 1 << 16
        self.primes = sieve_primes(self.limit)

    def ensure(self, limit: int) -> list[int]:
        if limit > self.limit:
            new_limit = max(limit, 2 * self.limit)
            self.primes = sieve_primes(new_limit)
            self.limit = new_limit
        return self.primes


_CACHE = _PrimeCache()


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ascending ``(prime, exponent)`` pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        last = 1
        for p, e in self.pairs:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.pairs}")
            last = p

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.pairs]

    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    def omega(self) -> int:
        return len(self.pairs)

    def as_list(self) -> list[tuple[int, int]]:
        return list(self.pairs)


def factorize(n: int) -> Factorization:
    """Factor ``|n|`` by trial division against the shared sieve.

    The sign of ``n`` is dropped; callers track it separately.
    """
    if n == 0:
        raise DomainError("cannot factor 0")
    n = abs(n)
    if n >= _MAX_FACTOR:
        raise DomainError(f"{n} is outside the supported range |n| < 2^63")
    pairs: list[tuple[int, int]] = []
    primes = _CACHE.primes
    i = 0
    while n > 1:
        if i >= len(primes):
            if is_probable_prime(n):
                pairs.append((n, 1))
                break
            # composite cofactor with no factor below the current limit
            primes = _CACHE.ensure(math.isqrt(n) + 1)
            continue
        p = primes[i]
        if p * p > n:
            pairs.append((n, 1))
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        i += 1
    pairs.sort()
    return Factorization(tuple(pairs))


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return factorize(n).omega() if n != 1 else 0


def psi(n: int) -> int:
    """Number of distinct prime divisors of ``n`` that are 1 mod 3."""
    if n < 1:
        raise DomainError(f"psi needs n >= 1, got {n}")
    return sum(1 for p, _ in factorize(n) if p % 3 == 1)


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(n))


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n)."""
    if d == 0 and n == 0:
        raise DomainError("kronecker(0, 0) is undefined")
    if n == 0:
        return 1 if d in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if d < 0:
            result = -result
    # factor out powers of two from n
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if d % 2 == 0:
            return 0
        if v % 2 == 1 and d % 8 in (3, 5):
            result = -result
    # Jacobi symbol (d/n) for odd positive n
    a = d % n if n > 1 else 0
    if n == 1:
        return result
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental_discriminant(d: int) -> bool:
    """True for discriminants of quadratic fields, and for d = 1."""
    if d == 0:
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def robin_bound(f: int) -> float:
    """Upper bound 1.38402 log f / log log f on omega(f), valid for f >= 3."""
    if f < 3:
        raise DomainError("bound needs f >= 3")
    return 1.38402 * math.log(f) / math.log(math.log(f))
