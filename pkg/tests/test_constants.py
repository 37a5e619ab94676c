from __future__ import annotations

import mpmath
import pytest
from mpmath import mpf

from cubic_genus.arith import sieve_primes
from cubic_genus.constants import coefficients as C
from cubic_genus.constants.euler import euler_product, prime_sum
from cubic_genus.constants.precision import PrecisionReal, precision, target_digits
from cubic_genus.constants.special import (
    gamma_one_third,
    gamma_two_thirds,
    zeta,
    zeta_one_third,
    zeta_one_third_continuation,
)
from cubic_genus.errors import DomainError, MassTableIncomplete
from cubic_genus.local_invariants import LocalSpecification

PLUS = LocalSpecification.ordinary("+")
MINUS = LocalSpecification.ordinary("-")
T7 = LocalSpecification("+", {7: "totram"})
TIGHT = mpf(10) ** -30


def agrees(pr: PrecisionReal, ref, tol=TIGHT) -> bool:
    return abs(pr.value - ref) <= tol + pr.err


# --- special values against mpmath's own implementations -----------------


def test_zeta_values():
    with precision():
        assert agrees(zeta(2), mpmath.pi**2 / 6)
        assert agrees(zeta(3), mpmath.zeta(3))
        assert agrees(zeta("5/3"), mpmath.zeta(mpf(5) / 3))
        assert abs(float(zeta("5/3")) - 2.1235) < 1e-4


def test_zeta_rejects_other_arguments():
    with pytest.raises(DomainError):
        zeta("1/2")


def test_zeta_one_third():
    with precision():
        z = zeta_one_third()
        assert z.value < 0
        assert agrees(z, mpmath.zeta(mpf(1) / 3))
        # second method agrees to 40 digits
        assert z.close_to(zeta_one_third_continuation(), mpf(10) ** -40)
        assert abs(float(z) + 0.97336) < 1e-5


def test_gamma_values():
    with precision():
        g = gamma_two_thirds()
        assert agrees(g, mpmath.gamma(mpf(2) / 3))
        refl = g * gamma_one_third()
        assert agrees(refl, 2 * mpmath.pi / mpmath.sqrt(3))
        assert abs(float(g**3) - 2.482959) < 1e-6


# --- local values and Euler products ---------------------------------------


def test_local_values_examples():
    lv = C.local_values(2)
    assert lv.a.contains(mpf(1) / 6) and lv.A.contains(mpf(1) / 7)
    assert C.local_values(7).n == 3 and C.local_values(5).n == 1
    with pytest.raises(DomainError):
        C.local_values(15)


def test_local_identities_hold():
    C.check_local_identities()


def test_trivial_product():
    with precision():
        assert euler_product(lambda x, r: 1 + 0 * x).contains(1)


def test_divergent_profile_rejected():
    with pytest.raises(DomainError):
        prime_sum(lambda x, r: x**3)  # sum 1/p diverges


def test_euler_product_against_truncation():
    # crude float product over primes below 2e5; tail of prod (1 + a_p) is below 1/P
    P = 200_000
    crude = 1.0
    for p in sieve_primes(P):
        crude *= 1 + 1 / (p * (p + 1))
    with precision():
        exact = euler_product(lambda x, r: 1 + C.a_local(x))
    assert 0 < float(exact) - crude < 1 / P


def test_error_bounds_meet_target():
    with precision():
        for cs in (C.alpha_beta_pm("+"), C.alpha_beta_sigma_z(T7, 2), C.alpha_beta_k_pm("-", 3)):
            assert cs.alpha.err < mpf(10) ** -target_digits()
            assert cs.beta.err < mpf(10) ** -target_digits()


# --- A_k and the graded sums -----------------------------------------------


@pytest.mark.parametrize("k", [0, 1, 2])
def test_A_k_against_direct_summation(k):
    direct, tail = C.brute_force_A_k(None, k, limit=10_000)
    with precision():
        A = C.A_k_B_k(None, k)[0]
    assert direct <= A.value + A.err
    assert A.value - A.err <= direct + tail


def test_A_k_decreasing_and_negative_index():
    vals = [float(C.A_k_B_k(None, k)[0]) for k in range(4)]
    assert vals[1] > vals[2] > vals[3] > 0
    assert C.A_k_B_k(None, -1) == (PrecisionReal.exact(0), PrecisionReal.exact(0))


def test_A_k_respects_excluded_primes():
    full = C.A_k_B_k(None, 1)[0]
    no7 = C.A_k_B_k(T7, 1)[0]
    assert float(no7) < float(full)
    direct, tail = C.brute_force_A_k(T7, 1, limit=5000)
    assert abs(float(no7) - float(direct)) < float(tail)


# --- three-adic masses -----------------------------------------------------


def test_three_adic_masses():
    m = C.three_adic_masses()
    assert m.C_all.contains(1) and m.K_all.contains(1)
    assert m.C_t31.close_to(PrecisionReal.exact(mpf(1) / 117), mpf(10) ** -40)
    c = mpmath.cbrt(9)
    assert agrees(m.K_t31, (c - 1) / (36 * (3 * c - 1)))
    assert m.K_t31.close_to(m.K_t31_second, mpf(10) ** -25)


def test_totram_at_three_needs_mass():
    spec = LocalSpecification("+", {3: "totram"})
    with pytest.raises(MassTableIncomplete):
        C.alpha_beta_sigma_z(spec, 1)


def test_fine_subset_needs_mass_and_registration_works():
    spec = LocalSpecification("+", {5: ["111", "12"]})
    with pytest.raises(MassTableIncomplete):
        C.density_constants(spec)
    table = C.MassTable()
    table.register(5, ["111", "12"], mpf(1) / 2, mpf(1) / 2)
    d = C.density_constants(spec, table)
    assert d.alpha.close_to(C.density_constants(PLUS).alpha * mpf(1) / 2, TIGHT)


# --- coefficient families --------------------------------------------------


def test_genus_sum_constants():
    p, m = C.alpha_beta_pm("+"), C.alpha_beta_pm("-")
    assert abs(float(p.alpha) - 0.07477052982182134) < 1e-15
    assert abs(float(p.beta) + 0.15668872236272864) < 1e-15
    assert (m.alpha - 3 * p.alpha).contains(0)
    assert (m.beta - mpmath.sqrt(3) * p.beta).contains(0, slack=TIGHT)
    assert p.beta.value < 0 and m.beta.value < 0


def test_genus_sum_against_crude_product():
    # 119/(1404 zeta(2)) prod (1 + n_p a_p) with a float product over primes below 1e5
    prod = 1.0
    for p in sieve_primes(100_000):
        prod *= 1 + (3 if p % 3 == 1 else 1) / (p * (p + 1))
    crude = 119 / (1404 * float(mpmath.zeta(2))) * prod
    assert abs(crude - float(C.alpha_beta_pm("+").alpha)) < 1e-5


def test_k_zero_uses_only_A0():
    with precision():
        a0 = C.alpha_beta_k_pm("+", 0).alpha
        ref = 29 * C.A_k_B_k(None, 0)[0] / (324 * zeta(2))
        assert a0.close_to(ref, TIGHT)
    with pytest.raises(DomainError):
        C.alpha_beta_k_pm("+", -1)


def test_sigma_k_below_l_vanishes():
    cs = C.alpha_beta_sigma_k(T7, 0)
    assert cs.alpha.contains(0) and cs.beta.contains(0)
    assert C.alpha_beta_sigma_k(T7, 1).alpha.value > 0


def test_sigma_k_carries_a7():
    # with Sigma_7 = T_7 the k = 1 constant is a_7 times the k = 0 constant of Sigma without 7
    spec_no7 = LocalSpecification("+", {7: ["111", "12", "3", "1^2 1"]})
    table = C.MassTable()
    ratio = C.alpha_beta_sigma_k(T7, 1).alpha / (C.alpha_beta_sigma_k(spec_no7, 0, table).alpha)
    # the A'_7 condition also inserts the factor C_7 (1 + a_7) = 1 - A_7 + a_7 (1 - A_7) = 1
    assert ratio.close_to(PrecisionReal.exact(mpf(1) / 56), mpf(10) ** -25)


def test_alpha_f_ratio():
    base = C.alpha_beta_f(PLUS, 1)
    for f in (2, 5, 7, 35, 70):
        cs = C.alpha_beta_f(PLUS, f)
        af = mpf(1)
        for p in (2, 5, 7):
            if f % p == 0:
                af /= p * (p + 1)
        assert (cs.alpha / base.alpha).close_to(PrecisionReal.exact(af), TIGHT)


def test_alpha_f_values_and_domain():
    with precision():
        a1 = C.alpha_beta_f(PLUS, 1).alpha
        assert a1.close_to((1 + C.local_values(3).a) / (12 * zeta(2)), TIGHT)
        with pytest.raises(DomainError):
            C.alpha_beta_f(PLUS, 3)
        with pytest.raises(DomainError):
            C.alpha_beta_f(PLUS, 4)
        with pytest.raises(DomainError):
            C.alpha_beta_f(T7, 7)
        prime = C.alpha_beta_prime_f(PLUS, 1)
        assert (prime.alpha / a1).close_to(C.three_adic_masses().C_t31, TIGHT)


def test_sigma_z_specializations():
    with precision():
        z0 = C.alpha_beta_sigma_z(PLUS, 0)
        assert agrees(z0.alpha, 1 / (12 * mpmath.zeta(3)))
        ref = 4 * mpmath.zeta(mpf(1) / 3) / (5 * mpmath.gamma(mpf(2) / 3) ** 3 * mpmath.zeta(mpf(5) / 3))
        assert agrees(z0.beta, ref)
        z1 = C.alpha_beta_sigma_z(MINUS, 1)
        pm = C.alpha_beta_pm("-")
        assert z1.alpha.close_to(pm.alpha, TIGHT) and z1.beta.close_to(pm.beta, TIGHT)


def test_sigma_z_complex():
    with precision():
        z = mpmath.mpc(1, 0.5)
        a = C.alpha_beta_sigma_z(PLUS, z)
        b = C.alpha_beta_sigma_z(PLUS, mpmath.conj(z))
        assert abs(complex(a.alpha.value) - complex(b.alpha.value).conjugate()) < 1e-25
        real = C.alpha_beta_sigma_z(PLUS, mpmath.mpc(1, 0))
        assert real.alpha.close_to(C.alpha_beta_pm("+").alpha, TIGHT)
        with pytest.raises(DomainError):
            C.alpha_beta_sigma_z(PLUS, 4.5)


@pytest.mark.parametrize("spec", [PLUS, T7, LocalSpecification("-", {13: "totram", 3: "t31"})])
def test_spec_constant_checks(spec):
    from cubic_genus.checks import spec_constant_checks

    results = spec_constant_checks(spec)
    assert results and all(r.passed for r in results), [r.line() for r in results if not r.passed]


def test_entries_format():
    entries = C.alpha_beta_pm("+").entries()
    assert [e["name"] for e in entries] == ["alpha+", "beta+"]
    assert set(entries[0]) == {"name", "value_decimal", "error_bound_decimal", "definition_ref"}
    assert entries[0]["value_decimal"].startswith("0.07477052982182133895527704")
