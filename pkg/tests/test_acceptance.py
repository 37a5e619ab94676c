"""Exit criteria. Each test records one line in the terminal summary."""

from __future__ import annotations

import time

import pytest

from cubic_genus import checks
from cubic_genus.census import census_from_table, export
from cubic_genus.cubic_enum import default_threads, enumerate_table
from cubic_genus.local_invariants import LocalSpecification
from cubic_genus.oracle import brute_force_oracle

pytestmark = pytest.mark.acceptance


def record(log, n: int, results) -> None:
    results = list(results)
    ok = all(r.passed for r in results)
    failed = [r for r in results if not r.passed]
    shown = failed[0] if failed else results[-1]
    log[n] = (ok, f"{len(results) - len(failed)}/{len(results)} checks; {shown.name}: {shown.measured} (threshold {shown.threshold})")
    assert ok, "\n".join(r.line() for r in failed)


def test_criterion_1_oracle_equivalence(acceptance_log):
    start = time.perf_counter()
    results = []
    for X in (10**2, 10**3, 10**4, 10**5):
        mine = enumerate_table(X, None).disc_signature_pairs()
        ref = brute_force_oracle(X)
        results.append(checks.CheckResult(f"oracle equivalence at X = {X}", mine == ref, f"{len(mine)} vs {len(ref)}", "identical"))
    elapsed = time.perf_counter() - start
    results.append(checks.CheckResult("oracle runtime", elapsed <= 300, f"{elapsed:.1f} s", "300 s"))
    record(acceptance_log, 1, results)


def test_criterion_2_closed_forms(acceptance_log):
    record(acceptance_log, 2, checks.closed_form_checks())


def test_criterion_3_identity_suite(acceptance_log):
    record(acceptance_log, 3, checks.identity_checks())


@pytest.mark.slow
def test_criterion_4_exact_identities(acceptance_log, table_1e7):
    start = time.perf_counter()
    results = []
    for sign in ("+", "-"):
        results += checks.census_identity_checks(table_1e7, LocalSpecification.ordinary(sign), 10**7)
    elapsed = time.perf_counter() - start
    results.append(checks.CheckResult("identity runtime at X = 1e7", elapsed <= 1800, f"{elapsed:.1f} s", "1800 s"))
    record(acceptance_log, 4, results)


@pytest.mark.slow
def test_criterion_5_secondary_term(acceptance_log, table_1e7):
    results = checks.residual_checks(table_1e7, "+", 10**7) + checks.residual_checks(table_1e7, "-", 10**7)
    record(acceptance_log, 5, results)


def test_criterion_6_genus_spot_checks(acceptance_log, table_1e6):
    results = checks.genus_spot_checks()
    results += [checks.cyclic_count_check(table_1e6, X) for X in (10**4, 10**5, 10**6)]
    record(acceptance_log, 6, results)


def test_criterion_7_moment_regression(acceptance_log, table_1e6):
    results = [checks.moment_regression_check(table_1e6, s, 10**6, 7) for s in ("+", "-")]
    record(acceptance_log, 7, results)


def test_criterion_8_determinism(acceptance_log):
    X = 10**6
    outputs = {}
    for threads in sorted({1, 4, default_threads()}):
        texts = []
        for sign in ("+", "-"):
            spec = LocalSpecification.ordinary(sign)
            table = enumerate_table(X, spec.infinity, threads)
            c = census_from_table(table, spec)
            texts.append(export(c, None, "csv"))
        outputs[threads] = "".join(texts).encode()
    base = outputs[1]
    results = [
        checks.CheckResult(f"census CSV with {t} threads equals 1 thread", outputs[t] == base, f"{len(outputs[t])} bytes", "byte-identical")
        for t in outputs
    ]
    record(acceptance_log, 8, results)
