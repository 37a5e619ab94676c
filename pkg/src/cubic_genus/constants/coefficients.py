"""Coefficient families for counts of cubic fields graded by genus number.

Local quantities in terms of x = p^{-1/3}:

    a_p = x^6 / (1 + x^3)                 = 1 / (p (p + 1))
    b_p = x^6 / (1 + x^2 + x^3 + x^4)     = 1 / (p^2 + p^{4/3} + p + p^{2/3})
    A_p = 1 / (p^2 + p + 1)               (mass of the totally ramified class)
    B_p = (1 + x)(1 - x) x^6 / ((1 - x^5)(1 + x^3))

and n_p = 3 for p = 1 mod 3, n_p = 1 otherwise. The global factor

    G = prod_p (1 - (p^{1/3} + 1) / (p (p + 1)))

appears in every secondary coefficient. Masses C_p, K_p of local
conditions come from a :class:`MassTable`; entries that cannot be
determined raise :class:`MassTableIncomplete` instead of being guessed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

from ..arith import factorize, is_probable_prime, is_squarefree, sieve_primes
from ..cubic_enum import Signature
from ..errors import ConsistencyError, DomainError, MassTableIncomplete
from ..local_invariants import LocalCondition, LocalKind, LocalSpecification, NOT_TOTRAM, spec_summary
from .euler import DEFAULT_CUTOFF, euler_product, prime_sum
from .precision import PrecisionReal, Series, cbrt, exp, precision, sqrt
from .special import gamma_two_thirds, zeta, zeta_one_third

MAX_RE_Z = 4
IDENTITY_PRIMES = tuple(int(p) for p in sieve_primes(97))


# ---------------------------------------------------------------------------
# local quantities as functions of x = p^{-1/3}; these accept numbers or Series


def a_local(x):
    return x**6 / (1 + x**3)


def b_local(x):
    return x**6 / (1 + x**2 + x**3 + x**4)


def A_local(x):
    return x**6 / (1 + x**3 + x**6)


def B_local(x):
    return (1 + x) * (1 - x) * x**6 / ((1 - x**5) * (1 + x**3))


def g_local(x):
    """1 - (p^{1/3} + 1)/(p(p+1)) in terms of x."""
    return 1 - (x**5 + x**6) / (1 + x**3)


def n_local(p: int) -> int:
    return 3 if p % 3 == 1 else 1


@dataclass(frozen=True)
class LocalValues:
    p: int
    a: PrecisionReal
    b: PrecisionReal
    A: PrecisionReal
    B: PrecisionReal
    n: int


def _check_local_identities(p: int, lv: LocalValues) -> None:
    tol = mpf(10) ** (-(mp.dps - 10))
    P = mpf(p)
    x = P ** (-mpf(1) / 3)
    checks = {
        "1 - A_p = (1 - p^-2)/(1 - p^-3)": (1 - lv.A.value) - (1 - P**-2) / (1 - P**-3),
        "A_p/(1 - A_p) = a_p": lv.A.value / (1 - lv.A.value) - lv.a.value,
        "B_p/(1 - B_p) = b_p": lv.B.value / (1 - lv.B.value) - lv.b.value,
        "(1 - B_p)(1 + b_p) = 1": (1 - lv.B.value) * (1 + lv.b.value) - 1,
        "g_p (1 + b_p) = 1 - p^{-5/3}": g_local(x) * (1 + lv.b.value) - (1 - x**5),
        "a_p = 1/(p(p+1))": lv.a.value - 1 / (P * (P + 1)),
        "b_p closed form": lv.b.value - 1 / (P**2 + P ** (mpf(4) / 3) + P + P ** (mpf(2) / 3)),
    }
    for name, diff in checks.items():
        if abs(diff) > tol:
            raise ConsistencyError(f"local identity {name} fails at p = {p}: {mpmath.nstr(diff, 5)}")


@lru_cache(maxsize=None)
def _local_values(p: int, dps: int) -> LocalValues:
    with mp.workdps(dps):
        x = cbrt(PrecisionReal.exact(p)).reciprocal()
        lv = LocalValues(
            p=p,
            a=PrecisionReal.exact(mpf(1) / (p * (p + 1))),
            b=b_local(x),
            A=PrecisionReal.exact(mpf(1) / (p * p + p + 1)),
            B=B_local(x),
            n=n_local(p),
        )
        _check_local_identities(p, lv)
        return lv


def local_values(p: int) -> LocalValues:
    """(a_p, b_p, A_p, B_p, n_p) with the defining identities checked."""
    p = int(p)
    if not is_probable_prime(p):
        raise DomainError(f"{p} is not prime")
    with precision():
        return _local_values(p, mp.dps)


def check_local_identities(primes=IDENTITY_PRIMES) -> None:
    for p in primes:
        local_values(p)


# ---------------------------------------------------------------------------
# masses


@dataclass(frozen=True)
class ThreeAdicMasses:
    """Masses at 3 of the full set and of the T31 class (three algebras
    x^3 - 3x^2 + 3u, u in {1, 4, 7})."""

    C_all: PrecisionReal
    C_t31: PrecisionReal
    K_all: PrecisionReal
    K_t31: PrecisionReal
    C_t31_second: PrecisionReal
    K_t31_second: PrecisionReal


def _cube_root_nine() -> PrecisionReal:
    return cbrt(PrecisionReal.exact(9))


@lru_cache(maxsize=None)
def _three_adic(dps: int) -> ThreeAdicMasses:
    with mp.workdps(dps):
        c = _cube_root_nine()
        one = PrecisionReal.exact(1)
        a3 = local_values(3).a
        b3 = local_values(3).b
        # match of the z = 1 moment with the genus-sum constants:
        # (C_all + 2 C') / 12 = 119/1404 and (4/5)(K_all + 2 K') = 2(55c - 19)/(45(3c - 1))
        C1 = (PrecisionReal.exact(12 * 119) / 1404 - one) / 2
        K1 = (2 * (55 * c - 19) / (45 * (3 * c - 1)) * PrecisionReal.exact(5) / 4 - one) / 2
        # match of the per-k constants: (1 + a_3)/12 * C' = 1/1296 and
        # (4/5)(1 + b_3) K' = 4 (c - 1) / (45 (11 c - 3))
        C2 = PrecisionReal.exact(12) / 1296 / (1 + a3)
        K2 = (c - 1) / (9 * (11 * c - 3)) / (1 + b3)
        # the complementary coefficients must agree too
        C_rest = PrecisionReal.exact(12 * 29) / 324 / (1 + a3)
        K_rest = (107 * c - 35) / (9 * (11 * c - 3)) / (1 + b3)
        tol = mpf(10) ** -25
        for name, u, v in (
            ("C_3(T31)", C1, C2),
            ("K_3(T31)", K1, K2),
            ("C_3 total", one, C_rest + C2),
            ("K_3 total", one, K_rest + K2),
        ):
            if not u.close_to(v, tol):
                raise ConsistencyError(f"two derivations of {name} disagree: {u} vs {v}")
        if not C1.contains(PrecisionReal.exact(mpf(1) / 117)):
            raise ConsistencyError("C_3(T31) is not 1/117")
        return ThreeAdicMasses(one, C1, one, K1, C2, K2)


def three_adic_masses() -> ThreeAdicMasses:
    with precision():
        return _three_adic(mp.dps)


class MassTable:
    """Local masses (C_p, K_p) of local conditions.

    Built-in entries: the full set (mass 1), the totally ramified class
    (A_p, B_p) and its complement (1 - A_p, 1 - B_p) at p != 3, and at 3
    the full set, T31 and its complement. Finer conditions need
    :meth:`register`.
    """

    def __init__(self):
        self._extra: dict[tuple[int, LocalCondition], tuple[PrecisionReal, PrecisionReal]] = {}

    def register(self, p: int, condition, C, K) -> None:
        cond = LocalCondition.parse(condition, p)
        self._extra[(int(p), cond)] = (PrecisionReal.exact(C), PrecisionReal.exact(K))

    def masses(self, p: int, condition) -> tuple[PrecisionReal, PrecisionReal]:
        cond = LocalCondition.parse(condition, p)
        if (p, cond) in self._extra:
            return self._extra[(p, cond)]
        one = PrecisionReal.exact(1)
        if cond.kind is LocalKind.ALL:
            return one, one
        if p == 3:
            m = three_adic_masses()
            if cond.kind is LocalKind.T31:
                return m.C_t31, m.K_t31
            if cond.kind is LocalKind.NOT_T31:
                return one - m.C_t31, one - m.K_t31
            raise MassTableIncomplete(f"no mass for condition {cond.kind.value!r} at p = 3")
        lv = local_values(p)
        if cond.kind is LocalKind.TOTRAM:
            return lv.A, lv.B
        if cond.kind is LocalKind.SUBSET and cond.types == NOT_TOTRAM:
            return one - lv.A, one - lv.B
        names = sorted(t.value for t in cond.types)
        raise MassTableIncomplete(f"no entry for {names} at p = {p}")

    def three_parts(self, condition) -> tuple[tuple, tuple, tuple]:
        """((C, K) of Sigma_3, of Sigma_3 minus T31, of Sigma_3 meet T31).

        Entries that the table cannot supply are returned as None.
        """
        cond = LocalCondition.parse(condition, 3)
        m = three_adic_masses()
        zero = PrecisionReal.exact(0)
        meet = {
            LocalKind.ALL: (m.C_t31, m.K_t31),
            LocalKind.TOTRAM: (m.C_t31, m.K_t31),
            LocalKind.T31: (m.C_t31, m.K_t31),
            LocalKind.NOT_T31: (zero, zero),
        }[cond.kind]
        try:
            full = self.masses(3, cond)
        except MassTableIncomplete:
            return None, None, meet
        return full, (full[0] - meet[0], full[1] - meet[1]), meet


DEFAULT_MASSES = MassTable()


def _need(v, what: str):
    if v is None:
        raise MassTableIncomplete(what)
    return v


# ---------------------------------------------------------------------------
# shared products


def _common():
    z2 = zeta(2)
    z13 = zeta_one_third()
    g3 = gamma_two_thirds() ** 3
    return z2, z13, g3


def _cutoff_for(excluded) -> int:
    return max([DEFAULT_CUTOFF] + [int(p) + 1 for p in excluded])


@lru_cache(maxsize=None)
def _G(dps: int) -> PrecisionReal:
    with mp.workdps(dps):
        return euler_product(lambda x, r: g_local(x))


def global_G() -> PrecisionReal:
    """prod_p (1 - (p^{1/3} + 1)/(p(p+1)))."""
    with precision():
        return _G(mp.dps)


def _nz(z, r: int):
    """n_p^z for a prime of residue r mod 3."""
    if r != 1:
        return mpf(1)
    return mpmath.exp(z * mpmath.log(3))


@lru_cache(maxsize=None)
def _moment_product(side: str, z, excluded: frozenset, dps: int) -> PrecisionReal:
    loc = a_local if side == "a" else b_local
    with mp.workdps(dps):
        w = _nz(z, 1)

        def factor(x, r):
            return 1 + (w if r == 1 else 1) * loc(x)

        return euler_product(factor, lambda p: p not in excluded, cutoff=_cutoff_for(excluded))


def moment_product(side: str, z, excluded=frozenset()) -> PrecisionReal:
    """prod over p outside ``excluded`` (3 always included) of (1 + n_p^z c_p), c = a or b."""
    with precision():
        z = mpmath.mpmathify(z)
        if mpmath.im(z) == 0:
            z = mpmath.re(z)
        return _moment_product(side, z, frozenset(excluded), mp.dps)


# ---------------------------------------------------------------------------
# A_k(Sigma), B_k(Sigma)


@dataclass(frozen=True)
class GradedSums:
    """Coefficients of prod_{p in P, p=1(3)} (1 + u c_p) prod_{p in P, p!=1(3)} (1 + c_p)."""

    coeffs: tuple  # PrecisionReal per k
    base: PrecisionReal  # the product over p != 1 mod 3
    first_moment: mpf  # sum over p = 1 mod 3 in P of c_p

    def __getitem__(self, k: int) -> PrecisionReal:
        if k < 0:
            return PrecisionReal.exact(0)
        if k < len(self.coeffs):
            return self.coeffs[k]
        raise IndexError(k)

    def coefficient_bound(self, k: int) -> mpf:
        """Upper bound c_k <= base * S1^k / k!."""
        b = self.base.value + self.base.err
        return b * self.first_moment**k / mpmath.factorial(k)


@lru_cache(maxsize=None)
def _graded(side: str, excluded: frozenset, kmax: int, dps: int) -> GradedSums:
    loc = a_local if side == "a" else b_local
    with mp.workdps(dps):
        cutoff = _cutoff_for(excluded)

        def keep(p):
            return p != 3 and p not in excluded

        base = euler_product(lambda x, r: 1 + loc(x), keep, cutoff=cutoff, residues=(2,))
        S = [prime_sum(lambda x, r, j=j: loc(x) ** j, keep, cutoff=cutoff, residues=(1,)) for j in range(1, kmax + 1)]
        L = Series([mpf(0)] + [(-1) ** (j + 1) * S[j - 1].value / j for j in range(1, kmax + 1)])
        E = L.exp().c
        # perturbing each S_j by delta_j moves every coefficient of
        # exp(L) by at most sum_j delta_j / j times exp(sum_j |S_j| / j)
        spread = sum(s.err / (j + 1) for j, s in enumerate(S))
        size = mpmath.exp(sum((abs(s.value) + s.err) / (j + 1) for j, s in enumerate(S)))
        err = spread * size
        coeffs = tuple(base * PrecisionReal.with_error(E[k], err) for k in range(kmax + 1))
        return GradedSums(coeffs, base, S[0].value + S[0].err)


def graded_sums(spec: LocalSpecification | None, kmax: int, side: str = "a") -> GradedSums:
    excluded = spec_summary(spec).excluded if spec is not None else frozenset()
    with precision():
        return _graded(side, frozenset(excluded), max(int(kmax), 1), mp.dps)


def A_k_B_k(spec: LocalSpecification | None, k: int) -> tuple[PrecisionReal, PrecisionReal]:
    """(A_k(Sigma), B_k(Sigma)); negative k gives (0, 0)."""
    if k < 0:
        zero = PrecisionReal.exact(0)
        return zero, zero
    return graded_sums(spec, k, "a")[k], graded_sums(spec, k, "b")[k]


def brute_force_A_k(spec: LocalSpecification | None, k: int, limit: int = 10_000) -> tuple[mpf, mpf]:
    """Direct sum of a_f over Sigma-compatible squarefree f <= limit with psi(f) = k,
    and the tail bound sum_{f > limit} f^-2 < 1/limit."""
    excluded = spec_summary(spec).excluded if spec is not None else frozenset()
    total = mpf(0)
    for f in range(1, limit + 1):
        if f % 3 == 0 or not is_squarefree(f):
            continue
        ps = [p for p, _ in factorize(f)] if f > 1 else []
        if any(p in excluded for p in ps):
            continue
        if sum(1 for p in ps if p % 3 == 1) != k:
            continue
        term = mpf(1)
        for p in ps:
            term /= p * (p + 1)
        total += term
    return total, mpf(1) / limit


# ---------------------------------------------------------------------------
# coefficient sets


@dataclass(frozen=True)
class CoefficientSet:
    alpha: PrecisionReal
    beta: PrecisionReal
    metadata: dict = field(default_factory=dict)

    def entries(self, digits: int = 30) -> list[dict]:
        tag = self.metadata.get("name", "coefficient")
        ref = self.metadata.get("definition", "")
        out = []
        for sym, val in (("alpha", self.alpha), ("beta", self.beta)):
            out.append(
                {
                    "name": f"{sym}{tag}",
                    "value_decimal": val.decimal(digits),
                    "error_bound_decimal": val.err_decimal(),
                    "definition_ref": ref.get(sym, "") if isinstance(ref, dict) else ref,
                }
            )
        return out

    def to_json(self, digits: int = 30) -> str:
        return json.dumps(self.entries(digits), indent=2)


def _sign_constants(sign) -> tuple[PrecisionReal, PrecisionReal]:
    sig = Signature.parse(sign)
    if sig is Signature.TOTALLY_REAL:
        return PrecisionReal.exact(1), PrecisionReal.exact(1)
    return PrecisionReal.exact(3), sqrt(PrecisionReal.exact(3))


def _sign_tag(sign) -> str:
    return "+" if Signature.parse(sign) is Signature.TOTALLY_REAL else "-"


def alpha_beta_pm(sign) -> CoefficientSet:
    """Main and secondary constants of the genus-number sum."""
    with precision():
        C, Kc = _sign_constants(sign)
        z2, z13, g3 = _common()
        c = _cube_root_nine()
        pa = moment_product("a", 1)
        pb = moment_product("b", 1)
        alpha = 119 * C / (1404 * z2) * pa
        beta = 2 * (55 * c - 19) * Kc * z13 / (45 * (3 * c - 1) * g3) * global_G() * pb
        return CoefficientSet(
            alpha,
            beta,
            {
                "name": _sign_tag(sign),
                "sign": _sign_tag(sign),
                "family": "genus sum",
                "definition": {
                    "alpha": "119 C/(1404 zeta(2)) prod_p (1 + n_p a_p)",
                    "beta": "2(55 c - 19) K zeta(1/3)/(45(3c - 1) Gamma(2/3)^3) prod_p g_p (1 + n_p b_p), c = 9^(1/3)",
                },
            },
        )


def alpha_pm(sign) -> CoefficientSet:
    return alpha_beta_pm(sign)


beta_pm = alpha_pm


def alpha_beta_k_pm(sign, k: int) -> CoefficientSet:
    """Constants of N_k for the all-ordinary specification."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    with precision():
        C, Kc = _sign_constants(sign)
        z2, z13, g3 = _common()
        c = _cube_root_nine()
        A, A1 = A_k_B_k(None, k)[0], A_k_B_k(None, k - 1)[0]
        B, B1 = A_k_B_k(None, k)[1], A_k_B_k(None, k - 1)[1]
        alpha = C / (324 * z2) * (29 * A + A1 / 4)
        beta = 4 * z13 * Kc / (45 * (11 * c - 3) * g3) * global_G() * ((107 * c - 35) * B + (c - 1) * B1)
        return CoefficientSet(
            alpha,
            beta,
            {
                "name": f"_{k}{_sign_tag(sign)}",
                "sign": _sign_tag(sign),
                "k": k,
                "family": "k-graded count",
                "definition": {
                    "alpha": "C/(324 zeta(2)) (29 A_k + A_{k-1}/4)",
                    "beta": "4 zeta(1/3) K/(45(11c - 3) Gamma(2/3)^3) G ((107c - 35) B_k + (c - 1) B_{k-1})",
                },
            },
        )


alpha_k_pm = alpha_beta_k_pm
beta_k_pm = alpha_beta_k_pm


def _spec_parts(spec: LocalSpecification, table: MassTable):
    """Shared pieces: (summary, C_inf, K_inf, a_t, b_t, prod_{p|c} C_p(1+a_p), same for K)."""
    s = spec_summary(spec)
    C_inf, K_inf = _sign_constants(spec.infinity)
    a_t = PrecisionReal.exact(1)
    b_t = PrecisionReal.exact(1)
    cC = PrecisionReal.exact(1)
    cK = PrecisionReal.exact(1)
    for p, cond in spec.primes.items():
        if p == 3:
            continue
        lv = local_values(p)
        if cond.kind is LocalKind.TOTRAM:
            a_t = a_t * lv.a
            b_t = b_t * lv.b
        elif not cond.is_ordinary:
            Cp, Kp = table.masses(p, cond)
            cC = cC * Cp * (1 + lv.a)
            cK = cK * Kp * (1 + lv.b)
    return s, C_inf, K_inf, a_t, b_t, cC, cK


def _check_compatible(spec: LocalSpecification, f: int) -> list[int]:
    f = int(f)
    if f < 1 or not is_squarefree(f):
        raise DomainError(f"f = {f} is not a positive squarefree integer")
    s = spec_summary(spec)
    ps = [p for p, _ in factorize(f)] if f > 1 else []
    bad = [p for p in ps if not s.in_P(p)]
    if bad:
        raise DomainError(f"f = {f} is not compatible with the specification (primes {bad})")
    return ps


def _spec_name(spec: LocalSpecification) -> str:
    return spec.dumps()


def alpha_beta_f(spec: LocalSpecification, f: int, table: MassTable = DEFAULT_MASSES) -> CoefficientSet:
    """Main terms of M(X, f), the count of fields in Sigma whose totally
    ramified primes outside 3 are exactly those dividing t f."""
    ps = _check_compatible(spec, f)
    with precision():
        s, C_inf, K_inf, a_t, b_t, cC, cK = _spec_parts(spec, table)
        z2, z13, g3 = _common()
        full, _, _ = table.three_parts(spec.condition(3))
        full = _need(full, f"mass of condition {spec.condition(3).kind.value!r} at 3")
        lv3 = local_values(3)
        af, bf = a_t, b_t
        for p in ps:
            lv = local_values(p)
            af, bf = af * lv.a, bf * lv.b
        alpha = C_inf / (12 * z2) * af * full[0] * (1 + lv3.a) * cC
        beta = 4 * z13 * K_inf / (5 * g3) * bf * global_G() * full[1] * (1 + lv3.b) * cK
        return CoefficientSet(alpha, beta, {"name": f"(f={f})", "f": f, "spec": _spec_name(spec), "family": "M(X, f)",
                                            "definition": "C_inf/(12 zeta(2)) a_tf prod_{p|3c} C_p (1 + a_p); beta analogous with G"})


def alpha_beta_prime_f(spec: LocalSpecification, f: int, table: MassTable = DEFAULT_MASSES) -> CoefficientSet:
    """Main terms of M'(X, f), the part of M(X, f) lying in T31 at 3."""
    ps = _check_compatible(spec, f)
    with precision():
        s, C_inf, K_inf, a_t, b_t, cC, cK = _spec_parts(spec, table)
        z2, z13, g3 = _common()
        _, _, meet = table.three_parts(spec.condition(3))
        lv3 = local_values(3)
        af, bf = a_t, b_t
        for p in ps:
            lv = local_values(p)
            af, bf = af * lv.a, bf * lv.b
        alpha = (1 + lv3.a) * C_inf * meet[0] / (12 * z2) * af * cC
        beta = 4 * (1 + lv3.b) * z13 * K_inf * meet[1] / (5 * g3) * bf * global_G() * cK
        return CoefficientSet(alpha, beta, {"name": f"'(f={f})", "f": f, "spec": _spec_name(spec), "family": "M'(X, f)",
                                            "definition": "(1 + a_3) C_inf C_3(Sigma_3 meet T31)/(12 zeta(2)) a_tf prod_{p|c}"})


alpha_f = beta_f = alpha_beta_f
alpha_prime_f = beta_prime_f = alpha_beta_prime_f


def alpha_beta_sigma_k(spec: LocalSpecification, k: int, table: MassTable = DEFAULT_MASSES) -> CoefficientSet:
    """Constants of N_k(X, Sigma)."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    with precision():
        s, C_inf, K_inf, a_t, b_t, cC, cK = _spec_parts(spec, table)
        meta = {"name": f"_{k}^Sigma", "k": k, "spec": _spec_name(spec), "family": "k-graded count over Sigma",
                "definition": "(1 + a_3) C_inf/(12 zeta(2)) a_t I_3(k) prod_{p|c}; beta analogous with G and J_3"}
        if k < s.l:
            zero = PrecisionReal.exact(0)
            return CoefficientSet(zero, zero, meta)
        z2, z13, g3 = _common()
        _, rest, meet = table.three_parts(spec.condition(3))
        j = k - s.l
        Ak, Bk = A_k_B_k(spec, j)
        Ak1, Bk1 = A_k_B_k(spec, j - 1)
        if rest is None:
            if j == 0 or Ak.value != 0 or Bk.value != 0:
                rest = _need(None, f"mass of condition {spec.condition(3).kind.value!r} at 3")
        I3 = rest[0] * Ak + meet[0] * Ak1
        J3 = rest[1] * Bk + meet[1] * Bk1
        lv3 = local_values(3)
        alpha = (1 + lv3.a) * C_inf / (12 * z2) * a_t * I3 * cC
        beta = 4 * (1 + lv3.b) * z13 * K_inf / (5 * g3) * b_t * J3 * global_G() * cK
        return CoefficientSet(alpha, beta, meta)


alpha_sigma_k = beta_sigma_k = alpha_beta_sigma_k


def alpha_beta_sigma_z(spec: LocalSpecification, z, table: MassTable = DEFAULT_MASSES) -> CoefficientSet:
    """Constants of the moment sum of g_F^z over fields in Sigma (z may be complex)."""
    with precision():
        z = mpmath.mpmathify(z)
        if mpmath.re(z) > MAX_RE_Z:
            raise DomainError(f"Re(z) = {mpmath.re(z)} exceeds the supported bound {MAX_RE_Z}")
        if mpmath.im(z) == 0:
            z = mpmath.re(z)
        s, C_inf, K_inf, a_t, b_t, cC, cK = _spec_parts(spec, table)
        z2, z13, g3 = _common()
        full, _, meet = table.three_parts(spec.condition(3))
        full = _need(full, f"mass of condition {spec.condition(3).kind.value!r} at 3")
        w3 = PrecisionReal.exact(mpmath.exp(z * mpmath.log(3)))
        pre = PrecisionReal.exact(mpmath.exp(s.l * z * mpmath.log(3)))
        pa = moment_product("a", z, s.excluded)
        pb = moment_product("b", z, s.excluded)
        alpha = pre * C_inf / (12 * z2) * a_t * (full[0] + (w3 - 1) * meet[0]) * cC * pa
        beta = pre * 4 * z13 * K_inf / (5 * g3) * b_t * global_G() * (full[1] + (w3 - 1) * meet[1]) * cK * pb
        return CoefficientSet(alpha, beta, {"name": f"^Sigma(z={mpmath.nstr(z, 6)})", "z": str(z), "spec": _spec_name(spec),
                                            "family": "moment over Sigma",
                                            "definition": "3^{lz} C_inf/(12 zeta(2)) a_t (C_3 + (3^z - 1) C_3') prod_{p|c} prod_{P+3} (1 + n_p^z a_p)"})


alpha_sigma_z = beta_sigma_z = alpha_beta_sigma_z


def density_constants(spec: LocalSpecification, table: MassTable = DEFAULT_MASSES) -> CoefficientSet:
    """C(Sigma)/(12 zeta(3)) and K(Sigma) 4 zeta(1/3)/(5 Gamma(2/3)^3 zeta(5/3)):
    the two-term constants of the plain field count N(X, Sigma)."""
    with precision():
        C_inf, K_inf = _sign_constants(spec.infinity)
        C, Kc = C_inf, K_inf
        for p, cond in spec.primes.items():
            Cp, Kp = table.masses(p, cond)
            C, Kc = C * Cp, Kc * Kp
        z13 = zeta_one_third()
        g3 = gamma_two_thirds() ** 3
        alpha = C / (12 * zeta(3))
        beta = Kc * 4 * z13 / (5 * g3 * zeta("5/3"))
        return CoefficientSet(alpha, beta, {"name": "(Sigma) density", "spec": _spec_name(spec), "family": "field count",
                                            "definition": "C(Sigma)/(12 zeta(3)); K(Sigma) 4 zeta(1/3)/(5 Gamma(2/3)^3 zeta(5/3))"})


def moment_series_check(spec: LocalSpecification, z, kmax: int = 14, table: MassTable = DEFAULT_MASSES) -> tuple[PrecisionReal, PrecisionReal]:
    """Differences alpha^Sigma(z) - sum_{k<=kmax} 3^{kz} alpha_k^Sigma (and beta), with
    the truncation bound folded into the error radius."""
    with precision():
        s = spec_summary(spec)
        whole = alpha_beta_sigma_z(spec, z, table)
        sa = PrecisionReal.exact(0)
        sb = PrecisionReal.exact(0)
        for k in range(s.l, kmax + 1):
            cs = alpha_beta_sigma_k(spec, k, table)
            w = PrecisionReal.exact(mpmath.exp(k * mpmath.mpmathify(z) * mpmath.log(3)))
            sa = sa + w * cs.alpha
            sb = sb + w * cs.beta
        tail_a = _series_tail(spec, z, kmax, "a", table)
        tail_b = _series_tail(spec, z, kmax, "b", table)
        da = whole.alpha - sa
        db = whole.beta - sb
        return (PrecisionReal(da.value, da.err + tail_a), PrecisionReal(db.value, db.err + tail_b))


def _series_tail(spec, z, kmax: int, side: str, table: MassTable) -> mpf:
    """Bound for sum_{k > kmax} |3^{kz} alpha_k^Sigma| (or beta) via c_j <= base S1^j / j!."""
    s = spec_summary(spec)
    gs = graded_sums(spec, 1, side)
    _, C_inf, K_inf, a_t, b_t, cC, cK = _spec_parts(spec, table)
    _, rest, meet = table.three_parts(spec.condition(3))
    z2, z13, g3 = _common()
    lv3 = local_values(3)
    if side == "a":
        pre = (1 + lv3.a) * C_inf / (12 * z2) * a_t * cC
        r, m = (rest[0] if rest else PrecisionReal.exact(1)), meet[0]
    else:
        pre = 4 * (1 + lv3.b) * z13 * K_inf / (5 * g3) * b_t * global_G() * cK
        r, m = (rest[1] if rest else PrecisionReal.exact(1)), meet[1]
    P = abs(pre.value) + pre.err
    R = abs(r.value) + r.err
    M = abs(m.value) + m.err
    w = mpmath.exp(mpmath.re(mpmath.mpmathify(z)) * mpmath.log(3))
    tot = mpf(0)
    for k in range(kmax + 1, kmax + 400):
        j = k - s.l
        term = w**k * P * (R * gs.coefficient_bound(j) + (M * gs.coefficient_bound(j - 1) if j >= 1 else 0))
        tot += term
        if term < tot * mpf(10) ** (-10) and k > kmax + 5:
            # the ratio of consecutive terms is below w S1 / j < 1/2 here
            tot += term
            break
    return tot
