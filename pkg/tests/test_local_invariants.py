from __future__ import annotations

import numpy as np
import pytest

from cubic_genus.arith import factorize, kronecker, psi, valuation
from cubic_genus.cubic_enum import BinaryCubicForm, form_disc
from cubic_genus.errors import ConsistencyError, DomainError, UnsupportedSpecError
from cubic_genus.local_invariants import (
    LocalSpecification,
    SplittingType,
    conductor_f,
    decompose_disc,
    e_invariant,
    field_from_form,
    genus_number,
    in_T31,
    satisfies,
    spec_summary,
    splitting_type,
    three_totally_ramified,
)

CBRT7 = BinaryCubicForm(1, 0, 0, -7)
CBRT10 = BinaryCubicForm(1, 0, 0, -10)
D23 = BinaryCubicForm(1, -1, 2, -1)
D49 = BinaryCubicForm(1, 1, -2, -1)


def test_splitting_examples():
    assert splitting_type(CBRT7, 7) is SplittingType.TOTALLY_RAMIFIED
    assert splitting_type(D23, 23) is SplittingType.PARTIAL_RAMIFIED
    assert splitting_type(D23, 2) is SplittingType.INERT
    assert splitting_type((1, 0, -1, -1), 2) is SplittingType.INERT


def test_splitting_type_needs_prime():
    with pytest.raises(DomainError):
        splitting_type(D23, 9)


def test_non_maximal_form_rejected():
    fat = CBRT7.transform(7, 0, 0, 1)
    with pytest.raises(ConsistencyError):
        splitting_type(fat, 7)


def _roots_mod_p(form: BinaryCubicForm, p: int) -> int:
    a, b, c, d = form.as_tuple()
    n = sum(1 for x in range(p) if (a * x**3 + b * x * x + c * x + d) % p == 0)
    return n + (a % p == 0)  # the point at infinity


def test_unramified_types_match_root_count(table_1e5):
    # brute-force point count on P^1(F_p) is an independent oracle when p does not divide disc
    rng = np.random.default_rng(3)
    idx = rng.choice(len(table_1e5), 300, replace=False)
    expected = {3: SplittingType.SPLIT, 1: SplittingType.PARTIAL, 0: SplittingType.INERT}
    for i in idx:
        fld = table_1e5.field(int(i))
        for p in (2, 3, 5, 7, 11, 13, 31):
            if fld.disc % p:
                assert splitting_type(fld, p) is expected[_roots_mod_p(fld.form, p)]


def test_ramified_primes_are_exactly_disc_divisors(table_1e5):
    for i in range(0, len(table_1e5), 97):
        fld = table_1e5.field(i)
        for p, _ in factorize(fld.disc):
            st = splitting_type(fld, p)
            assert st in (SplittingType.PARTIAL_RAMIFIED, SplittingType.TOTALLY_RAMIFIED)


def test_conductor_examples():
    assert conductor_f(CBRT7) == 7
    assert conductor_f(D23) == 1
    assert conductor_f(CBRT10) == 10


def test_decomposition_examples():
    assert decompose_disc(CBRT7) == (-3, 7, 9)
    assert decompose_disc(D23) == (-23, 1, 1)
    assert decompose_disc(D49) == (1, 7, 1)
    assert decompose_disc(CBRT10) == (-3, 10, 9)


def test_decomposition_failure_is_consistency_error():
    with pytest.raises(ConsistencyError):
        decompose_disc(D23, f_F=2)


def test_e_and_genus_examples():
    assert e_invariant(CBRT7) == 1 and genus_number(CBRT7) == 3
    assert e_invariant(D23) == 0 and genus_number(D23) == 1
    assert e_invariant(CBRT10) == 0
    assert e_invariant(D49) == 1 and genus_number(D49) == 1


def test_field_from_form():
    fld = field_from_form(CBRT10)
    assert (fld.disc, fld.f_F, fld.d_F, fld.three_power, fld.e_F) == (-2700, 10, -3, 9, 0)
    assert field_from_form(D49).is_cyclic


def test_in_T31():
    assert not in_T31(CBRT7)
    # x^3 - 3x^2 + 3u with u = 1: v_3(disc) = 4 but the unit part decides
    f = BinaryCubicForm(1, -3, 0, 3)
    disc = form_disc(f)
    assert valuation(disc, 3) == 4
    assert in_T31(f) == ((disc // 81) % 3 == 1)


def test_field_level_identities(table_1e5):
    t = table_1e5
    for i in range(0, len(t), 13):
        fld = t.field(i)
        # the T31 predicate agrees with the d_F description
        assert in_T31(fld) == (three_totally_ramified(fld) and fld.d_F % 3 == 1)
        for p, _ in factorize(fld.f_F) if fld.f_F > 1 else ():
            if p != 2:
                assert (kronecker(fld.d_F, p) == 1) == (p % 3 == 1)
        if not fld.is_cyclic:
            bonus = int(three_totally_ramified(fld) and fld.d_F % 3 == 1)
            assert fld.genus_exponent == psi(fld.f_F) + bonus


def test_satisfies_examples():
    ordinary = LocalSpecification.ordinary("complex")
    assert satisfies(field_from_form(D23), ordinary)
    assert satisfies(field_from_form(CBRT7), LocalSpecification("complex", {7: "totram"}))
    assert not satisfies(field_from_form(D23), LocalSpecification("complex", {23: ["111"]}))
    assert not satisfies(field_from_form(D23), LocalSpecification.ordinary("totally_real"))


def test_satisfies_three_adic():
    spec = LocalSpecification("complex", {3: "t31"})
    comp = LocalSpecification("complex", {3: "not_t31"})
    fld = field_from_form(CBRT7)
    assert satisfies(fld, spec) != satisfies(fld, comp)


def test_spec_validation():
    with pytest.raises(UnsupportedSpecError):
        LocalSpecification("complex", {3: ["111"]})
    with pytest.raises(DomainError):
        LocalSpecification("complex", {5: ["1^3"]})
    with pytest.raises(DomainError):
        LocalSpecification("complex", {5: "t31"})
    with pytest.raises(DomainError):
        LocalSpecification("complex", {6: "totram"})
    with pytest.raises(DomainError):
        LocalSpecification.from_json('{"primes": {}}')


def test_spec_summaries():
    s = spec_summary(LocalSpecification.ordinary("+"))
    assert (s.c, s.l, s.t) == (1, 0, 1) and s.in_P(2) and not s.in_P(3)
    s = spec_summary(LocalSpecification("+", {7: "totram"}))
    assert (s.c, s.l, s.t) == (1, 1, 7)
    s = spec_summary(LocalSpecification("+", {5: ["111", "12"], 7: "totram"}))
    assert (s.c, s.l, s.t) == (5, 1, 7) and not s.in_P(5)
    full = ["111", "12", "3", "1^2 1"]
    s = spec_summary(LocalSpecification("+", {5: full}))
    assert s.c == 1 and not s.in_P(5)


def test_spec_json_roundtrip():
    spec = LocalSpecification("-", {5: ["111", "12"], 7: "totram", 3: "t31"})
    back = LocalSpecification.from_json(spec.dumps())
    assert back == spec
