"""Named pass/fail checks shared by the ``verify`` command and the test suite.

Each check returns a :class:`CheckResult` carrying the measured quantity and
the threshold it was held to, so reports can show both.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mpf

from . import _kernels as K
from .census import census_from_table, genus_of_field_check, per_f_rebuild, residual_report
from .cubic_enum import FieldTable, Signature, enumerate_table, spf_table
from .errors import CubicGenusError
from .local_invariants import LocalSpecification, field_from_form, spec_summary
from .oracle import brute_force_oracle


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: str
    threshold: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: measured {self.measured} (threshold {self.threshold})"


def _num(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return mpmath.nstr(mpmath.mpmathify(x), 6)


def _close(name: str, value, target, tol) -> CheckResult:
    from .constants.precision import PrecisionReal

    v = value if isinstance(value, PrecisionReal) else PrecisionReal.exact(value)
    t = target if isinstance(target, PrecisionReal) else PrecisionReal.exact(target)
    gap = abs(v.value - t.value) + v.err + t.err
    return CheckResult(name, bool(gap <= tol), _num(gap), _num(tol))


# ---------------------------------------------------------------------------
# constants


def closed_form_checks(tol=mpf(10) ** -25) -> list[CheckResult]:
    from .constants import coefficients as C
    from .constants.euler import euler_product
    from .constants.precision import PrecisionReal, precision, sqrt
    from .constants.special import gamma_one_third, gamma_two_thirds, zeta, zeta_one_third

    with precision():
        sp = LocalSpecification.ordinary("+")
        z2, z3, z53 = zeta(2), zeta(3), zeta("5/3")
        prod_a = euler_product(lambda x, r: 1 + C.a_local(x))
        prod_b = euler_product(lambda x, r: C.g_local(x) * (1 + C.b_local(x)))
        cs0 = C.alpha_beta_sigma_z(sp, 0)
        g = gamma_two_thirds()
        refl = gamma_one_third() * g
        two_pi = PrecisionReal.exact(2 * mpmath.pi)
        return [
            _close("prod (1 + a_p) = zeta(2)/zeta(3)", prod_a, z2 / z3, tol),
            _close("prod g_p (1 + b_p) = 1/zeta(5/3)", prod_b, z53.reciprocal(), tol),
            _close("alpha+(0) = 1/(12 zeta(3))", cs0.alpha, (12 * z3).reciprocal(), tol),
            _close("beta+(0) = 4 zeta(1/3)/(5 Gamma(2/3)^3 zeta(5/3))", cs0.beta, 4 * zeta_one_third() / (5 * g**3 * z53), tol),
            _close("Gamma(1/3) Gamma(2/3) = 2 pi/sqrt 3", refl, two_pi / sqrt(PrecisionReal.exact(3)), tol),
        ]


def identity_checks(tol=mpf(10) ** -20, kmax: int = 12) -> list[CheckResult]:
    """Series, specialization and three-adic mass consistency checks."""
    from fractions import Fraction

    from .constants import coefficients as C
    from .constants.precision import precision

    out = []
    with precision():
        for sign in ("+", "-"):
            sp = LocalSpecification.ordinary(sign)
            whole = C.alpha_beta_pm(sign)
            sa = sb = 0
            for k in range(kmax + 1):
                cs = C.alpha_beta_k_pm(sign, k)
                sa = cs.alpha * 3**k + sa
                sb = cs.beta * 3**k + sb
            ta = C._series_tail(sp, 1, kmax, "a", C.DEFAULT_MASSES)
            tb = C._series_tail(sp, 1, kmax, "b", C.DEFAULT_MASSES)
            ga = abs(whole.alpha.value - sa.value) - whole.alpha.err - sa.err - ta
            gb = abs(whole.beta.value - sb.value) - whole.beta.err - sb.err - tb
            out.append(CheckResult(f"sum_k<=12 3^k alpha_k{sign} + tail contains alpha{sign}",
                                   bool(ga <= 0 and ta + sa.err <= tol), f"gap {_num(max(ga, 0))}, tail {_num(ta)}", _num(tol)))
            out.append(CheckResult(f"sum_k<=12 3^k beta_k{sign} + tail contains beta{sign}",
                                   bool(gb <= 0 and tb + sb.err <= tol), f"gap {_num(max(gb, 0))}, tail {_num(tb)}", _num(tol)))
            z1 = C.alpha_beta_sigma_z(sp, 1)
            out.append(_close(f"alpha^Sigma(1) = alpha{sign}", z1.alpha, whole.alpha, tol))
            out.append(_close(f"beta^Sigma(1) = beta{sign}", z1.beta, whole.beta, tol))
            for k in range(4):
                a = C.alpha_beta_sigma_k(sp, k)
                b = C.alpha_beta_k_pm(sign, k)
                out.append(_close(f"alpha_{k}^Sigma = alpha_{k}{sign}", a.alpha, b.alpha, tol))
                out.append(_close(f"beta_{k}^Sigma = beta_{k}{sign}", a.beta, b.beta, tol))
        r1 = Fraction(13, 144) * Fraction(116, 117)
        r2 = Fraction(13, 144) * Fraction(1, 117)
        out.append(CheckResult("(13/144)(116/117) = 29/324", r1 == Fraction(29, 324), str(r1), "29/324"))
        out.append(CheckResult("(13/144)(1/117) = 1/1296", r2 == Fraction(1, 1296), str(r2), "1/1296"))
        lv3 = C.local_values(3)
        out.append(CheckResult("1 + a_3 = 13/12", lv3.a.contains(mpf(1) / 12), _num(lv3.a.value), "1/12"))
        m = C.three_adic_masses()
        out.append(_close("C_3(T31) = 1/117", m.C_t31, mpf(1) / 117, tol))
        out.append(_close("C_3(T31): genus-sum match = per-k match", m.C_t31, m.C_t31_second, tol))
        out.append(_close("K_3(T31): genus-sum match = per-k match", m.K_t31, m.K_t31_second, tol))
    return out


def spec_constant_checks(spec: LocalSpecification, tol=mpf(10) ** -25) -> list[CheckResult]:
    """Checks that apply to any specification with a complete mass table."""
    from .constants import coefficients as C
    from .constants.precision import precision

    out = []
    with precision():
        C.check_local_identities()
        out.append(CheckResult("local identities at p <= 97", True, "all hold", "exact"))
        z0 = C.alpha_beta_sigma_z(spec, 0)
        d = C.density_constants(spec)
        out.append(_close("alpha^Sigma(0) = C(Sigma)/(12 zeta(3))", z0.alpha, d.alpha, tol))
        out.append(_close("beta^Sigma(0) = K(Sigma) density constant", z0.beta, d.beta, tol))
        for z in (0, 1, 2):
            da, db = C.moment_series_check(spec, z, 14)
            ga = abs(da.value) - da.err
            gb = abs(db.value) - db.err
            out.append(CheckResult(f"alpha^Sigma({z}) = sum_k 3^(k z) alpha_k^Sigma", bool(ga <= 0 and da.err <= mpf(10) ** -15),
                                   f"radius {_num(da.err)}", "1e-15"))
            out.append(CheckResult(f"beta^Sigma({z}) = sum_k 3^(k z) beta_k^Sigma", bool(gb <= 0 and db.err <= mpf(10) ** -15),
                                   f"radius {_num(db.err)}", "1e-15"))
        if not spec.primes:
            pm = C.alpha_beta_pm(spec.infinity)
            z1 = C.alpha_beta_sigma_z(spec, 1)
            out.append(_close("alpha^Sigma(1) matches the genus-sum constant", z1.alpha, pm.alpha, tol))
            out.append(_close("beta^Sigma(1) matches the genus-sum constant", z1.beta, pm.beta, tol))
    return out


# ---------------------------------------------------------------------------
# enumeration


def oracle_check(X: int, table: FieldTable | None = None) -> CheckResult:
    if table is None:
        table = enumerate_table(X, None)
    mine = table.below(X).disc_signature_pairs()
    theirs = brute_force_oracle(X)
    ok = mine == theirs
    return CheckResult(f"oracle equivalence at X = {X}", ok, f"{len(mine)} vs {len(theirs)} fields", "identical multisets")


def dump_consistency_check(table: FieldTable) -> CheckResult:
    """Recompute the invariant columns from the stored forms."""
    if len(table) == 0:
        return CheckResult("stored invariants match recomputation", True, "0 rows", "exact")
    forms = table.forms()
    spf = spf_table(int(np.abs(table.disc).max()) + 1)
    inv = K.field_invariants(forms, spf)
    stored = table.data[:, 6:12]
    bad = int(np.count_nonzero(np.any(stored != inv[:, 0:6], axis=1) | (inv[:, 7] != 0)))
    disc_bad = int(np.count_nonzero(forms[:, 0] != [K.form_disc(*map(int, r[1:])) for r in forms])) if len(table) < 200_000 else 0
    return CheckResult("stored invariants match recomputation", bad == 0 and disc_bad == 0, f"{bad + disc_bad} mismatched rows", "0")


def sampled_field_check(table: FieldTable, seed: int = 0, samples: int = 200) -> CheckResult:
    """Rebuild randomly chosen fields through the pure-Python path."""
    rng = random.Random(seed)
    n = len(table)
    idx = sorted(rng.sample(range(n), min(samples, n))) if n else []
    bad = 0
    for i in idx:
        row = table.data[i]
        fld = field_from_form(tuple(int(v) for v in row[2:6]))
        if fld.to_record() != tuple(int(v) for v in row[:12]):
            bad += 1
    return CheckResult(f"sampled fields rebuilt in Python (seed {seed})", bad == 0, f"{bad} of {len(idx)} differ", "0")


def census_identity_checks(table: FieldTable, spec: LocalSpecification, X: int | None = None) -> list[CheckResult]:
    X = table.X if X is None else X
    out = []
    sig_table = table.with_signature(spec.infinity).below(X)
    try:
        c = census_from_table(sig_table, spec)
        ok, msg = True, "exact"
    except CubicGenusError as exc:
        c, ok, msg = None, False, str(exc)
    out.append(CheckResult(f"moment identities ({spec.infinity.value}, X = {X})", ok, msg, "exact"))
    rows = per_f_rebuild(X, spec, sig_table)
    bad = [r for r in rows if r[1] != r[2]]
    out.append(CheckResult(f"N_k rebuilt from M, M' ({spec.infinity.value}, X = {X})", not bad,
                           f"{len(bad)} of {len(rows)} k differ", "0"))
    g = genus_of_field_check(sig_table)
    out.append(CheckResult(f"g_F = 3^(psi(f_F) + T31) ({spec.infinity.value}, X = {X})", not g, f"{len(g)} fields differ", "0"))
    return out


def residual_checks(table: FieldTable, sign, X: int) -> list[CheckResult]:
    """Secondary-term checks for the all-ordinary specification at X."""
    from .constants.coefficients import alpha_beta_sigma_z

    spec = LocalSpecification.ordinary(sign)
    c = census_from_table(table.with_signature(sign).below(X), spec, checkpoints=[X], z_list=[0, 1])
    cs = alpha_beta_sigma_z(spec, 0)
    rep = residual_report(c, {"all": cs})
    r = rep.row("all", X)
    beta = float(cs.beta)
    s = Signature.parse(sign).value
    return [
        CheckResult(f"r0 within beta +- 0.5|beta| ({s}, X = {X})", abs(r.r0 - beta) <= 0.5 * abs(beta),
                    f"r0 = {r.r0:.5f}, beta = {beta:.5f}", f"|r0 - beta| <= {0.5 * abs(beta):.5f}"),
        CheckResult(f"|R1| < |R0|/3 ({s}, X = {X})", abs(r.R1) < abs(r.R0) / 3, f"R1 = {r.R1:.1f}, R0 = {r.R0:.1f}", "ratio < 1/3"),
        CheckResult(f"|r1| <= 20 ({s}, X = {X})", abs(r.r1) <= 20, f"{r.r1:.5f}", "20"),
    ]


def moment_regression_check(table: FieldTable, sign, X: int = 10**6, p: int = 7) -> CheckResult:
    from .constants.coefficients import alpha_beta_sigma_z

    spec = LocalSpecification(Signature.parse(sign), {p: "totram"})
    c = census_from_table(table.with_signature(sign).below(X), spec, checkpoints=[X], z_list=[2])
    cs = alpha_beta_sigma_z(spec, 2)
    a, b = float(cs.alpha), float(cs.beta)
    obs = c.moment(0, 2)
    dev = abs(obs - (a * X + b * X ** (5 / 6)))
    return CheckResult(f"sum g_F^2 over Sigma_{p} = T_{p} ({Signature.parse(sign).value}, X = {X})",
                       dev < 0.1 * a * X, f"|deviation| = {dev:.1f} (sum {obs})", f"{0.1 * a * X:.1f}")


def cyclic_count_check(table: FieldTable, X: int) -> CheckResult:
    sub = table.below(X)
    n = int(np.count_nonzero(sub.col("is_cyclic")))
    bound = 3 * math.sqrt(X)
    return CheckResult(f"cyclic fields below {X} at most 3 sqrt(X)", n <= bound, str(n), f"{bound:.1f}")


def genus_spot_checks() -> list[CheckResult]:
    from .cubic_enum import BinaryCubicForm

    cases = [
        ("Q(cbrt 7)", BinaryCubicForm(1, 0, 0, -7), 3),
        ("disc -23 field", BinaryCubicForm(1, 0, -1, -1), 1),
        ("disc 49 cyclic field", BinaryCubicForm(1, 1, -2, -1), 1),
    ]
    out = []
    for name, form, want in cases:
        fld = field_from_form(form)
        out.append(CheckResult(f"g({name}) = {want}", fld.genus_number == want, f"g = {fld.genus_number}, disc = {fld.disc}", str(want)))
    return out


def spec_l(spec: LocalSpecification) -> int:
    return spec_summary(spec).l
