from __future__ import annotations

import pytest

from cubic_genus.cubic_enum import enumerate_table
from cubic_genus.errors import DomainError
from cubic_genus.oracle import ORACLE_MAX_X, OraclePoly, brute_force_oracle, field_discriminant, poly_disc, same_field


def _poly(A: int, B: int, C: int) -> OraclePoly:
    dK, ind = field_discriminant(A, B, C)
    return OraclePoly(-A, B, -C, poly_disc(A, B, C), dK, ind)


@pytest.mark.parametrize(
    "m,disc",
    [
        (7, -1323),  # 7 = -2 mod 9: d = -27 m^2
        (10, -300),  # 10 = 1 mod 9: d = -3 m^2
        (12, -972),  # 12 = 2^2 * 3: d = -27 (2 * 3)^2
        (17, -867),  # 17 = -1 mod 9
        (2, -108),
    ],
)
def test_pure_cubic_discriminants(m, disc):
    # closed form for Q(cbrt(m)) with m = a b^2 cube-free
    assert field_discriminant(0, 0, -m)[0] == disc


def test_index_is_integral():
    dK, ind = field_discriminant(0, 0, -12)
    assert poly_disc(0, 0, -12) == dK * ind * ind and ind == 2


def test_same_field_for_cube_roots():
    assert same_field(_poly(0, 0, -12), _poly(0, 0, -18))
    assert not same_field(_poly(0, 0, -2), _poly(0, 0, -3))


def test_small_oracle():
    assert brute_force_oracle(100) == [(-87, "complex"), (-83, "complex"), (-76, "complex"), (-59, "complex"),
                                       (-44, "complex"), (-31, "complex"), (-23, "complex"), (49, "totally_real"),
                                       (81, "totally_real")]


def test_oracle_limits():
    with pytest.raises(DomainError):
        brute_force_oracle(0)
    with pytest.raises(DomainError):
        brute_force_oracle(ORACLE_MAX_X + 1)


@pytest.mark.parametrize("X", [10**3, 10**4])
def test_oracle_matches_enumeration(X):
    assert brute_force_oracle(X) == enumerate_table(X, None).disc_signature_pairs()


def test_multiple_fields_per_disc():
    # 3969 = 63^2 carries two cyclic fields (conductor 63 = 7 * 9)
    pairs = brute_force_oracle(4000)
    assert pairs.count((3969, "totally_real")) == 2
