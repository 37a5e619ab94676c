from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubic_genus.arith import (
    factorize,
    is_fundamental_discriminant,
    is_probable_prime,
    is_squarefree,
    kronecker,
    omega,
    psi,
    robin_bound,
    sieve_primes,
    valuation,
)
from cubic_genus.errors import DomainError


def test_sieve_small():
    assert sieve_primes(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert sieve_primes(1) == []
    assert len(sieve_primes(100)) == 25
    with pytest.raises(DomainError):
        sieve_primes(0)


@given(st.integers(min_value=1, max_value=10**12))
@settings(max_examples=200, deadline=None)
def test_factorize_roundtrip(n):
    f = factorize(n)
    prod = 1
    for p, e in f:
        assert is_probable_prime(p)
        prod *= p**e
    assert prod == n


def test_factorize_rejects_nonpositive():
    with pytest.raises(DomainError):
        factorize(0)


@pytest.mark.parametrize("n,expected", [(1, 0), (7, 1), (91, 2), (13 * 19 * 31, 3), (2 * 5 * 11, 0), (49, 1)])
def test_psi(n, expected):
    assert psi(n) == expected


def test_valuation_and_omega():
    assert valuation(81 * 5, 3) == 4
    assert valuation(-1323, 3) == 3
    assert omega(2 * 3 * 3 * 7) == 3


@given(st.integers(min_value=1, max_value=10**6))
@settings(max_examples=200, deadline=None)
def test_squarefree_matches_factorization(n):
    assert is_squarefree(n) == all(e == 1 for _, e in factorize(n))


@given(st.integers(min_value=-10**4, max_value=10**4), st.sampled_from([3, 5, 7, 11, 13, 101]))
@settings(max_examples=200, deadline=None)
def test_kronecker_is_euler_criterion_for_odd_primes(d, p):
    expect = 0 if d % p == 0 else (1 if pow(d % p, (p - 1) // 2, p) == 1 else -1)
    assert kronecker(d, p) == expect


@pytest.mark.parametrize("d", [1, -3, -4, 5, -7, 8, -8, 12, -23, 13, -87])
def test_fundamental_yes(d):
    assert is_fundamental_discriminant(d)


@pytest.mark.parametrize("d", [-1, 2, 9, -12 * 4, 20 * 4, 45])
def test_fundamental_no(d):
    assert not is_fundamental_discriminant(d)


def test_robin_bound_dominates_omega():
    for f in range(3, 5000):
        if is_squarefree(f):
            assert omega(f) <= robin_bound(f)
    with pytest.raises(DomainError):
        robin_bound(2)
