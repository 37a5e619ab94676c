from __future__ import annotations

import io
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubic_genus.cubic_enum import (
    MAX_X,
    BinaryCubicForm,
    FieldTable,
    Signature,
    dump_bytes,
    enumerate_fields,
    enumerate_table,
    form_disc,
    hessian,
    is_cyclic,
    is_irreducible,
    is_maximal,
    is_reduced,
    read_dump,
    write_dump,
)
from cubic_genus.errors import DomainError, OverflowCheckError

coef = st.integers(min_value=-50, max_value=50)


@pytest.mark.parametrize(
    "form,disc",
    [((1, 0, -1, -1), -23), ((1, 0, 0, -7), -1323), ((1, 1, -2, -1), 49)],
)
def test_form_disc_examples(form, disc):
    assert form_disc(form) == disc


def test_form_disc_overflow_is_checked():
    with pytest.raises(OverflowCheckError):
        form_disc((10**6, 10**6, 10**6, 10**6))


def test_hessian_examples():
    assert hessian((1, 0, -1, -1)) == (3, 9, 1)
    assert hessian((1, 0, 0, -7)) == (0, 63, 0)


@given(coef, coef, coef, coef)
@settings(max_examples=300, deadline=None)
def test_hessian_identity(a, b, c, d):
    P, Q, R = hessian((a, b, c, d))
    assert Q * Q - 4 * P * R == -3 * form_disc((a, b, c, d))


@given(coef, coef, coef, coef, st.sampled_from([(1, 1, 0, 1), (0, 1, 1, 0), (1, 0, 2, 1), (2, 1, 1, 1), (1, 0, 0, -1)]))
@settings(max_examples=300, deadline=None)
def test_disc_invariant_under_gl2(a, b, c, d, m):
    f = BinaryCubicForm(a, b, c, d)
    assert form_disc(f.transform(*m)) == form_disc(f)


def test_irreducibility():
    assert is_irreducible((1, 0, -1, -1))
    assert not is_irreducible((1, 0, -1, 0))  # x(x - y)(x + y)
    assert not is_irreducible((1, -6, 11, -6))  # (x-y)(x-2y)(x-3y)
    assert not is_irreducible((1, 1, 1, 1))  # (x + y)(x^2 + y^2)


def test_maximality_examples():
    assert is_maximal((1, 0, 0, -7), 7)
    # x^3 - 7 y^3 with x -> 7x has a = 7^3 and b = 0: not maximal at 7
    assert not is_maximal(BinaryCubicForm(1, 0, 0, -7).transform(7, 0, 0, 1), 7)
    assert not is_maximal((4, 0, 1, 1), 2) or form_disc((4, 0, 1, 1)) % 4 != 0


def test_disc_minus_23_representative():
    # the root-domain convention picks (1, -1, 2, -1); x^3 - x - 1 lies in the same class
    canon = BinaryCubicForm(1, -1, 2, -1)
    other = BinaryCubicForm(1, 0, -1, -1)
    assert is_reduced(canon)
    assert not is_reduced(other)
    mats = [(p, q, r, s) for p in range(-2, 3) for q in range(-2, 3) for r in range(-2, 3) for s in range(-2, 3) if abs(p * s - q * r) == 1]
    assert any(other.transform(*m) == canon for m in mats)


def _random_gl2(rng: random.Random):
    gens = [(1, 1, 0, 1), (1, -1, 0, 1), (0, 1, 1, 0), (1, 0, 0, -1), (1, 0, 1, 1)]
    m = (1, 0, 0, 1)
    for _ in range(rng.randint(1, 6)):
        g = rng.choice(gens)
        m = (m[0] * g[0] + m[1] * g[2], m[0] * g[1] + m[1] * g[3], m[2] * g[0] + m[3] * g[2], m[2] * g[1] + m[3] * g[3])
    return m


def test_one_reduced_form_per_orbit_sample():
    rng = random.Random(7)
    table = enumerate_table(500, None)
    for fld in table.fields():
        assert is_reduced(fld.form)
        for _ in range(40):
            g = fld.form.transform(*_random_gl2(rng))
            if g.a <= 0 and g.a != 0:
                continue
            if is_reduced(g):
                assert g == fld.form


def test_small_complex_fields():
    discs = [f.disc for f in enumerate_fields(100, "complex")]
    assert discs == [-23, -31, -44, -59, -76, -83, -87]


def test_small_real_fields():
    fields = list(enumerate_fields(50, "totally_real"))
    assert [f.disc for f in fields] == [49]
    assert fields[0].is_cyclic and is_cyclic(fields[0])


def test_disc_81_is_cyclic():
    f81 = [f for f in enumerate_fields(82, Signature.TOTALLY_REAL) if f.disc == 81]
    assert len(f81) == 1 and is_cyclic(f81[0])


@pytest.mark.parametrize("X,plus,minus", [(10**3, 27, 127), (10**4, 382, 1520)])
def test_known_counts(X, plus, minus):
    t = enumerate_table(X, None)
    assert len(t.with_signature("+")) == plus
    assert len(t.with_signature("-")) == minus


def test_table_invariants(table_1e5):
    t = table_1e5
    disc = t.disc
    assert np.all(np.abs(disc) < t.X) and np.all(disc != 0)
    assert np.all((disc > 0) == (t.col("signature") == 1))
    tp, dF, fF = t.col("three_power"), t.col("d_F"), t.col("f_F")
    assert np.all(tp * dF * fF * fF == disc)
    assert np.all(np.isin(tp, [1, 9, 81]))
    assert np.all(fF % 3 != 0)
    cyc = t.col("is_cyclic") == 1
    roots = np.sqrt(np.abs(disc[cyc])).round().astype(np.int64)
    assert np.all(roots * roots == disc[cyc])
    g, e = t.col("genus_exponent"), t.col("e_F")
    assert np.all(np.where(cyc, e - 1, e) == g)
    # no duplicate (disc, form)
    keys = {tuple(r) for r in t.data[:, [0, 2, 3, 4, 5]]}
    assert len(keys) == len(t)
    # some discriminants carry several fields
    _, counts = np.unique(disc, return_counts=True)
    assert counts.max() >= 2


def test_hessian_identity_on_enumerated(table_1e5):
    a, b, c, d = (table_1e5.col(k) for k in "abcd")
    P, Q, R = b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d
    assert np.all(Q * Q - 4 * P * R == -3 * table_1e5.disc)


def test_thread_count_does_not_change_output():
    a = enumerate_table(2 * 10**5, None, threads=1)
    b = enumerate_table(2 * 10**5, None, threads=3)
    assert np.array_equal(a.data, b.data)


def test_bounds_checked():
    with pytest.raises(DomainError):
        enumerate_table(0, None)
    with pytest.raises(DomainError):
        enumerate_table(MAX_X + 1, None)
    with pytest.raises(DomainError):
        enumerate_table(10**3, None, threads=0)


def test_dump_roundtrip(tmp_path):
    t = enumerate_table(5000, None)
    path = tmp_path / "f.cgc"
    write_dump(t, path)
    back = read_dump(path)
    assert back.X == t.X and np.array_equal(back.data, t.data)
    assert dump_bytes(back) == path.read_bytes()
    assert path.read_bytes()[:4] == b"CGC1"


def test_dump_rejects_garbage():
    with pytest.raises(ValueError):
        read_dump(io.BytesIO(b"XXXX" + bytes(16)))
    with pytest.raises(ValueError):
        read_dump(io.BytesIO(dump_bytes(enumerate_table(1000, None))[:-3]))


def test_below_and_empty():
    t = enumerate_table(1000, None)
    assert len(t.below(100)) == 9
    with pytest.raises(DomainError):
        t.below(10**4)
    assert len(enumerate_table(20, None)) == 0
    assert len(FieldTable.concat(10, [])) == 0
