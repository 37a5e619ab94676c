"""Brute-force cubic field census used to cross-check the form enumeration.

It shares no code with the reduction-theory path. Every cubic field K with
|d_K| < X contains a theta outside Z with Tr(theta) in {0, 1} and

    T2(theta) <= Tr(theta)^2 / 3 + sqrt(4/3) * sqrt(|d_K| / 3)

(Hunter's theorem for degree 3), so its characteristic polynomial
x^3 - s x^2 + e2 x - e3 lies in a finite box. For each irreducible
candidate the field discriminant is D / ind^2, where the p-part of the
index of Z[theta] is read from the Hermite basis of the p-maximal order.
Candidates generating the same field are merged by matching roots and
confirming the embedding exactly.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

ORACLE_MAX_X = 10**6


@dataclass(frozen=True)
class OraclePoly:
    s: int
    e2: int
    e3: int
    poly_disc: int
    field_disc: int
    index: int

    @property
    def coeffs(self) -> tuple[int, int, int]:
        """(A, B, C) of x^3 + A x^2 + B x + C."""
        return (-self.s, self.e2, -self.e3)


# ---------------------------------------------------------------------------
# sieving helpers (numpy only)


def _small_factor_table(n: int) -> np.ndarray:
    """Least prime factor for composite m <= n, 0 for primes and 0, 1.

    Composite m <= n has a factor <= sqrt(n), so uint16 suffices while
    n < 65536^2.
    """
    if n >= 65535**2:
        raise DomainError("factor table range too large")
    tbl = np.zeros(n + 1, dtype=np.uint16)
    r = math.isqrt(n)
    flags = np.ones(r + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(r) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    # larger primes first so the least factor is written last
    for p in np.nonzero(flags)[0][::-1]:
        p = int(p)
        tbl[p * p :: p] = p
    return tbl


def _square_part_root(values: np.ndarray, tbl: np.ndarray) -> np.ndarray:
    """For each n > 0 the largest m with m^2 | n."""
    n = values.astype(np.int64).copy()
    root = np.ones_like(n)
    last = np.zeros_like(n)
    active = n > 1
    while active.any():
        idx = np.nonzero(active)[0]
        m = n[idx]
        p = tbl[m].astype(np.int64)
        prime = p == 0
        p[prime] = m[prime]
        n[idx] = m // p
        hit = last[idx] == p
        root[idx[hit]] *= p[hit]
        # consume the pair so p^3 contributes one square only
        last[idx] = np.where(hit, 0, p)
        active = n > 1
    return root


# ---------------------------------------------------------------------------
# p-maximal index of Z[alpha]


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def _char_poly_ok(A: int, B: int, C: int, u: int, t: int, p: int, j: int) -> bool:
    """Is (alpha^2 + u alpha + t) / p^j integral for alpha a root of x^3+Ax^2+Bx+C?"""
    # multiplication by alpha on (1, alpha, alpha^2): columns are images
    # alpha*1 = alpha, alpha*alpha = alpha^2, alpha*alpha^2 = -C - B alpha - A alpha^2
    ma = ((0, 0, -C), (1, 0, -B), (0, 1, -A))
    ma2 = tuple(tuple(sum(ma[i][k] * ma[k][l] for k in range(3)) for l in range(3)) for i in range(3))
    g = [[ma2[i][l] + u * ma[i][l] + (t if i == l else 0) for l in range(3)] for i in range(3)]
    tr = g[0][0] + g[1][1] + g[2][2]
    m2 = (
        g[0][0] * g[1][1] - g[0][1] * g[1][0]
        + g[0][0] * g[2][2] - g[0][2] * g[2][0]
        + g[1][1] * g[2][2] - g[1][2] * g[2][1]
    )
    det = (
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    )
    q = p**j
    return tr % q == 0 and m2 % (q * q) == 0 and det % (q * q * q) == 0


def index_valuation(A: int, B: int, C: int, p: int) -> int:
    """v_p of the index of Z[alpha] in the maximal order, alpha^3 + A alpha^2 + B alpha + C = 0."""

    def lin_ok(r: int, i: int) -> bool:
        f0 = -r**3 + A * r * r - B * r + C  # f(-r)
        f1 = 3 * r * r - 2 * A * r + B  # f'(-r)
        f2 = -3 * r + A  # f''(-r) / 2
        return _vp(f0, p) >= 3 * i and _vp(f1, p) >= 2 * i and _vp(f2, p) >= i

    # largest i with (alpha + r)/p^i integral; r is unique mod p^i
    i, r = 0, 0
    while True:
        q = p**i
        nxt = [r + k * q for k in range(p) if lin_ok(r + k * q, i + 1)]
        if not nxt:
            break
        r = nxt[0]
        i += 1

    # largest j with (alpha^2 + u alpha + t)/p^j integral
    tr1 = -A
    tr2 = A * A - 2 * B
    j = 0
    level = [(0, 0)]
    while level:
        q = p**j
        nq = q * p
        found = set()
        for u0, t0 in level:
            for du in range(p):
                u = u0 + du * q
                if p != 3:
                    # trace condition pins t modulo p^{j+1}
                    t = (-(tr2 + u * tr1) * pow(3, -1, nq)) % nq
                    if (t - t0) % q == 0 and _char_poly_ok(A, B, C, u, t, p, j + 1):
                        found.add((u % nq, t))
                else:
                    for dt in range(p):
                        t = t0 + dt * q
                        if _char_poly_ok(A, B, C, u, t, p, j + 1):
                            found.add((u % nq, t % nq))
        if not found:
            break
        level = sorted(found)
        j += 1
    return i + j


def poly_disc(A: int, B: int, C: int) -> int:
    return A * A * B * B - 4 * B**3 - 4 * A**3 * C - 27 * C * C + 18 * A * B * C


def _factor_small(n: int) -> list[tuple[int, int]]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def field_discriminant(A: int, B: int, C: int) -> tuple[int, int]:
    """(d_K, index) for the monic irreducible cubic x^3 + Ax^2 + Bx + C."""
    D = poly_disc(A, B, C)
    ind = 1
    for p, e in _factor_small(D):
        if e >= 2:
            ind *= p ** index_valuation(A, B, C, p)
    return D // (ind * ind), ind


# ---------------------------------------------------------------------------
# isomorphism test


def _poly_mod(num: list[int], A: int, B: int, C: int) -> list[int]:
    """Reduce an integer polynomial (low degree first) modulo x^3 + Ax^2 + Bx + C."""
    c = list(num)
    for k in range(len(c) - 1, 2, -1):
        lead = c[k]
        if lead:
            c[k] = 0
            c[k - 1] -= A * lead
            c[k - 2] -= B * lead
            c[k - 3] -= C * lead
    return c[:3] + [0] * (3 - len(c[:3]))


def _pmul(x: list[int], y: list[int]) -> list[int]:
    out = [0] * (len(x) + len(y) - 1)
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                out[i + j] += a * b
    return out


def _embeds(g: OraclePoly, f: OraclePoly, N: list[int]) -> bool:
    """Exact check that N(alpha)/ind_f is a root of g, alpha a root of f."""
    A, B, C = f.coeffs
    m = f.index
    Nr = _poly_mod(N, A, B, C)
    N2 = _poly_mod(_pmul(Nr, Nr), A, B, C)
    N3 = _poly_mod(_pmul(N2, Nr), A, B, C)
    ga, gb, gc = g.coeffs
    # m^3 g(N/m) = N^3 + ga m N^2 + gb m^2 N + gc m^3
    total = [N3[k] + ga * m * N2[k] + gb * m * m * Nr[k] for k in range(3)]
    total[0] += gc * m**3
    return total == [0, 0, 0]


def same_field(f: OraclePoly, g: OraclePoly) -> bool:
    """Whether f and g define isomorphic fields (equal field discriminants assumed)."""
    ra = np.roots([1.0, *map(float, f.coeffs)])
    rb = np.roots([1.0, *map(float, g.coeffs)])
    V = np.stack([np.ones(3, dtype=complex), ra, ra * ra], axis=1)
    for perm in itertools.permutations(range(3)):
        try:
            c = np.linalg.solve(V, rb[list(perm)])
        except np.linalg.LinAlgError:
            return False
        if np.max(np.abs(c.imag)) > 1e-6 * (1 + np.max(np.abs(c.real))):
            continue
        scaled = c.real * f.index
        N = [int(round(v)) for v in scaled]
        if np.max(np.abs(scaled - N)) > 1e-4:
            continue
        if _embeds(g, f, N):
            return True
    return False


# ---------------------------------------------------------------------------
# driver


def hunter_candidates(X: int):
    """Irreducible (s, e2, e3, D) in the Hunter box, as int64 arrays per chunk."""
    c = math.sqrt(4.0 / 3.0) * math.sqrt(X / 3.0)
    for s in (0, 1):
        bound = s * s / 3.0 + c
        E2 = int(math.floor((bound + s * s) / 2.0))
        E3 = int(math.floor((bound / 3.0) ** 1.5))
        e3 = np.arange(-E3, E3 + 1, dtype=np.int64)
        for e2v in range(-E2, E2 + 1):
            n = e3.size
            M = np.zeros((n, 3, 3))
            M[:, 0, 0] = s
            M[:, 0, 1] = -e2v
            M[:, 0, 2] = e3
            M[:, 1, 0] = 1.0
            M[:, 2, 1] = 1.0
            roots = np.linalg.eigvals(M)
            T2 = (np.abs(roots) ** 2).sum(axis=1)
            keep = T2 <= bound * (1 + 1e-9) + 1e-9
            # a rational root of a monic integer cubic is an integer
            rr = np.round(roots.real)
            A, B = -s, e2v
            Cc = -e3
            val = ((rr + A) * rr + B) * rr + Cc[:, None]
            has_int_root = np.any((np.abs(roots.imag) < 1e-3) & (np.abs(val) < 0.5), axis=1)
            keep &= ~has_int_root
            if not keep.any():
                continue
            C_ = Cc[keep]
            D = A * A * B * B - 4 * B**3 - 4 * A**3 * C_ - 27 * C_ * C_ + 18 * A * B * C_
            nz = D != 0
            yield s, e2v, -C_[nz], D[nz]


def brute_force_oracle(X: int) -> list[tuple[int, str]]:
    """Sorted list of (disc, signature) over all cubic fields with |disc| < X."""
    return [(f.field_disc, "totally_real" if f.field_disc > 0 else "complex") for f in oracle_fields(X)]


def oracle_fields(X: int) -> list[OraclePoly]:
    """One representative polynomial per field, sorted by (disc, s, e2, e3)."""
    X = int(X)
    if X < 1:
        raise DomainError("X must be positive")
    if X > ORACLE_MAX_X:
        raise DomainError(f"oracle is limited to X <= {ORACLE_MAX_X}")
    chunks = list(hunter_candidates(X))
    if not chunks:
        return []
    maxD = max(int(np.abs(ch[3]).max()) for ch in chunks)
    tbl = _small_factor_table(max(maxD, 4))
    groups: dict[int, list[OraclePoly]] = defaultdict(list)
    for s, e2v, e3, D in chunks:
        absD = np.abs(D)
        sq = _square_part_root(absD, tbl)
        # |d_K| >= |D| / sq^2; drop candidates that cannot reach below X
        ok = absD // (sq * sq) < X
        for e3v, Dv in zip(e3[ok].tolist(), D[ok].tolist()):
            A, B, C = -s, e2v, -e3v
            dK, ind = field_discriminant(A, B, C)
            if abs(dK) < X:
                groups[dK].append(OraclePoly(s, e2v, e3v, Dv, dK, ind))
    out: list[OraclePoly] = []
    for dK in sorted(groups):
        reps: list[OraclePoly] = []
        for cand in sorted(groups[dK], key=lambda q: (q.index, q.s, abs(q.e2), q.e2, abs(q.e3), q.e3)):
            if not any(same_field(rep, cand) for rep in reps):
                reps.append(cand)
        out.extend(sorted(reps, key=lambda q: (q.s, q.e2, q.e3)))
    return out
