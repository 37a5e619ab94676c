from __future__ import annotations

import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

from cubic_genus.census import (
    census_from_table,
    coefficient_key,
    default_checkpoints,
    empty_csv,
    export,
    in_T31_mask,
    per_f_rebuild,
    per_f_counts,
    read_csv,
    residual_report,
    run_census,
    sigma_mask,
    table_rows,
    write_csv,
)
from cubic_genus.constants.coefficients import alpha_beta_sigma_z
from cubic_genus.cubic_enum import enumerate_table
from cubic_genus.errors import DomainError
from cubic_genus.local_invariants import LocalSpecification, satisfies

PLUS = LocalSpecification.ordinary("+")
MINUS = LocalSpecification.ordinary("-")
SPECS = [
    MINUS,
    LocalSpecification("+", {7: "totram"}),
    LocalSpecification("-", {2: ["3"], 5: ["111", "12"]}),
    LocalSpecification("-", {3: "t31", 13: "totram"}),
    LocalSpecification("+", {3: "not_t31", 2: ["1^2 1"]}),
    LocalSpecification("-", {3: "totram"}),
]


def test_default_checkpoints():
    cps = default_checkpoints(10**6)
    assert len(cps) == 20 and cps[-1] == 10**6
    assert cps[0] == math.ceil(10**6 / 2**19)
    assert all(b > a for a, b in zip(cps, cps[1:]))


def test_small_census_examples():
    c = run_census(100, MINUS, checkpoints=[100])
    assert c.N_k(0, 0) == 7 and c.total(0) == 7
    c = run_census(2000, MINUS, checkpoints=[2000])
    assert c.N_k(0, 1) >= 1


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.dumps())
def test_sigma_mask_matches_fieldwise_predicate(table_1e5, spec):
    t = table_1e5.below(30_000)
    mask = sigma_mask(t, spec)
    slow = np.array([satisfies(f, spec) for f in t.fields()])
    assert np.array_equal(mask, slow)


def test_t31_mask():
    disc = np.array([-81 * 1, -81 * 2, -81 * 4, -1323, 81 * 7, 81 * 3])
    # -81 // 81 = -1 = 2 mod 3; -162 -> -2 = 1 mod 3; -324 -> -4 = 2 mod 3; 567 -> 7 = 1 mod 3
    assert in_T31_mask(disc).tolist() == [False, True, False, False, True, False]


@pytest.mark.parametrize("spec", SPECS[:4], ids=lambda s: s.dumps())
def test_census_identities_and_monotonicity(table_1e5, spec):
    c = census_from_table(table_1e5, spec)
    assert c.check_identities() == []
    for variant in ("noncyclic", "exact"):
        for z in (0, 1, 2):
            key = f"z={z}"
            assert [c.moment(i, z, variant) for i in range(len(c.checkpoints))] == c.direct[variant][key]
        for k in range(c.kmax + 1):
            col = [c.N_k(i, k, variant) for i in range(len(c.checkpoints))]
            assert col == sorted(col)
    for k in range(c.l):
        assert all(c.N_k(i, k) == 0 for i in range(len(c.checkpoints)))


def test_cyclic_fields_split_off(table_1e5):
    c = census_from_table(table_1e5, PLUS, checkpoints=[10**5])
    assert c.total(0, "exact") - c.total(0) == c.cyclic[0]
    cyc = int(np.count_nonzero(table_1e5.col("is_cyclic")))
    assert c.cyclic[0] == cyc


def test_json_roundtrip(table_1e5):
    c = census_from_table(table_1e5, SPECS[1], z_list=[0, 1, 2, 0.5])
    back = type(c).from_json(json.loads(json.dumps(c.to_json())))
    assert back.to_json() == c.to_json()


def test_bad_inputs(table_1e5):
    with pytest.raises(DomainError):
        census_from_table(table_1e5, PLUS, checkpoints=[10**6])
    with pytest.raises(DomainError):
        census_from_table(table_1e5, PLUS, z_list=[1j])
    with pytest.raises(DomainError):
        run_census(10**6, PLUS, table=table_1e5)
    with pytest.raises(DomainError):
        coefficient_key("w")


@pytest.mark.parametrize("spec", [MINUS, SPECS[1], SPECS[3]], ids=lambda s: s.dumps())
def test_graded_counts_rebuilt_from_per_f(table_1e5, spec):
    rows = per_f_rebuild(10**5, spec, table_1e5)
    assert all(n == r for _, n, r in rows)


def test_per_f_counts(table_1e5):
    pf = per_f_counts(10**5, PLUS, table_1e5)
    assert all(mp <= m for m, mp in pf.values())
    assert all(f * f < 10**5 for f in pf)
    total = sum(m for m, _ in pf.values())
    # alpha(1) / sum_f alpha(f) = (1 + a_3) / prod_p (1 + a_p) = (13/12) zeta(3)/zeta(2)
    predicted = 13 / 12 * 1.2020569031595942 / (math.pi**2 / 6)
    assert abs(pf[1][0] / total - predicted) < 0.05


def test_synthetic_residuals():
    a, b = 0.07, -0.15
    cps = [10**4 * 2**j for j in range(8)]
    fake = SimpleNamespace(
        checkpoints=cps, X_max=cps[-1], total=lambda i, v: round(a * cps[i] + b * cps[i] ** (5 / 6))
    )
    cs = SimpleNamespace(alpha=a, beta=b)
    rep = residual_report(fake, {"all": cs})
    for r in rep.for_key("all"):
        assert abs(r.r1) <= r.X ** (-2 / 3)


def test_slope_notice(table_1e5):
    c = census_from_table(table_1e5, PLUS, checkpoints=[10**4, 10**5])
    rep = residual_report(c, {"all": alpha_beta_sigma_z(PLUS, 0)})
    assert rep.slopes["all"] is None and rep.notices


def test_residual_report_is_deterministic(table_1e5):
    c = census_from_table(table_1e5, MINUS)
    coeffs = {"all": alpha_beta_sigma_z(MINUS, 0), "z=1": alpha_beta_sigma_z(MINUS, 1)}
    assert residual_report(c, coeffs) == residual_report(c, coeffs)
    r = residual_report(c, coeffs).row("all", 10**5)
    assert r.R0 < 0


def test_csv_export_roundtrip(table_1e5, tmp_path):
    c = census_from_table(table_1e5, MINUS)
    rep = residual_report(c, {"all": alpha_beta_sigma_z(MINUS, 0)})
    path = tmp_path / "c.csv"
    text = export(c, rep, "csv", path)
    assert path.read_text() == text
    cols, rows = read_csv(text)
    assert cols[:4] == ["X", "k", "N_k", "genus_sum"] and cols[-4:] == ["R0", "R1", "r0", "r1"]
    assert write_csv(rows, cols) == text
    assert rows == table_rows(c, rep)


def test_json_export(table_1e5):
    c = census_from_table(table_1e5, MINUS)
    coeffs = {"all": alpha_beta_sigma_z(MINUS, 0)}
    doc = json.loads(export(c, residual_report(c, coeffs), "json", coefficients=coeffs))
    meta = doc["metadata"]
    assert meta["build_id"] and meta["spec"] == MINUS.to_json()
    assert float(meta["coefficients"]["all"][0]["error_bound_decimal"]) < 1e-30
    assert doc["exact_rows"]
    with pytest.raises(DomainError):
        export(c, None, "xml")


def test_empty_table_gives_header_only():
    t = enumerate_table(20, None)
    c = census_from_table(t, PLUS, checkpoints=[20])
    assert export(c, None, "csv").count("\n") > 1  # one row per k for X = 20
    assert empty_csv().count("\n") == 1
    cols, rows = read_csv(empty_csv())
    assert rows == [] and "moment[z=2]" in cols
