"""numba hot loops for reduced-form enumeration and per-field invariants.

Forms are ``(a, b, c, d)`` for ``a x^3 + b x^2 y + c x y^2 + d y^3``.
All arithmetic is int64; callers bound X so that no intermediate exceeds
2^62 (see ``cubic_enum.MAX_X``).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# splitting-type codes
ST_111 = 0
ST_12 = 1
ST_3 = 2
ST_1_21 = 3
ST_1_3 = 4


@njit(cache=True, nogil=True)
def spf_sieve(n):
    """Smallest-prime-factor table for 0..n (int32)."""
    spf = np.zeros(n + 1, dtype=np.int32)
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = i
            if i <= n // i:
                for j in range(i * i, n + 1, i):
                    if spf[j] == 0:
                        spf[j] = i
    return spf


@njit(cache=True, nogil=True)
def form_disc(a, b, c, d):
    return b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d


@njit(cache=True, nogil=True)
def _floordiv(x, y):
    return x // y


@njit(cache=True, nogil=True)
def _ceildiv(x, y):
    return -((-x) // y)


@njit(cache=True, nogil=True)
def _isqrt(n):
    if n < 0:
        return -1
    r = np.int64(math.sqrt(float(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True, nogil=True)
def _hessian_reduced(a, b, c, d):
    p = b * b - 3 * a * c
    q = b * c - 9 * a * d
    r = c * c - 3 * b * d
    return abs(q) <= p and p <= r


@njit(cache=True, nogil=True)
def _lex_less(x0, x1, x2, x3, y0, y1, y2, y3):
    if x0 != y0:
        return x0 < y0
    if x1 != y1:
        return x1 < y1
    if x2 != y2:
        return x2 < y2
    return x3 < y3


@njit(cache=True, nogil=True)
def _act(a, b, c, d, m00, m01, m10, m11):
    """Coefficients of F(m00 x + m01 y, m10 x + m11 y)."""
    # F(X, Y) with X = m00 x + m01 y, Y = m10 x + m11 y, expanded by hand
    na = a * m00**3 + b * m00**2 * m10 + c * m00 * m10**2 + d * m10**3
    nd = a * m01**3 + b * m01**2 * m11 + c * m01 * m11**2 + d * m11**3
    nb = (
        3 * a * m00**2 * m01
        + b * (m00**2 * m11 + 2 * m00 * m01 * m10)
        + c * (m01 * m10**2 + 2 * m00 * m10 * m11)
        + 3 * d * m10**2 * m11
    )
    nc = (
        3 * a * m00 * m01**2
        + b * (m01**2 * m10 + 2 * m00 * m01 * m11)
        + c * (m00 * m11**2 + 2 * m01 * m10 * m11)
        + 3 * d * m10 * m11**2
    )
    return na, nb, nc, nd


@njit(cache=True, nogil=True)
def positive_canonical(a, b, c, d):
    """True iff (a,b,c,d) is the lexicographically least form with a > 0 and
    reduced Hessian among its images under unimodular matrices with entries
    in {-1, 0, 1}. Those images are all the Hessian-reduced forms in the class.
    """
    if a <= 0 or not _hessian_reduced(a, b, c, d):
        return False
    for m00 in range(-1, 2):
        for m01 in range(-1, 2):
            for m10 in range(-1, 2):
                for m11 in range(-1, 2):
                    det = m00 * m11 - m01 * m10
                    if det != 1 and det != -1:
                        continue
                    na, nb, nc, nd = _act(a, b, c, d, m00, m01, m10, m11)
                    if na <= 0:
                        continue
                    if not _hessian_reduced(na, nb, nc, nd):
                        continue
                    if _lex_less(na, nb, nc, nd, a, b, c, d):
                        return False
    return True


@njit(cache=True, nogil=True)
def negative_reduced(a, b, c, d):
    """Reduction for disc < 0: a > 0 and the complex root w of F(x, 1) lies
    in 0 < Re w < 1/2, |w| > 1. Each inequality is a sign test of F at a
    rational point against the unique real root; irreducibility excludes
    equality."""
    if a <= 0:
        return False
    if a * d - b * c <= 0:
        return False
    if (a + b) * (a + b) + c * (a + b) - a * d <= 0:
        return False
    if d * d - a * a + a * c - b * d <= 0:
        return False
    return True


@njit(cache=True, nogil=True)
def _eval_form(a, b, c, d, x, y):
    return a * x * x * x + b * x * x * y + c * x * y * y + d * y * y * y


@njit(cache=True, nogil=True)
def _real_roots(a, b, c, d, out):
    """Real roots of a t^3 + b t^2 + c t + d (a != 0), polished by Newton.
    Returns the count written into ``out``."""
    A = b / a
    B = c / a
    C = d / a
    q = (A * A - 3.0 * B) / 9.0
    r = (2.0 * A * A * A - 9.0 * A * B + 27.0 * C) / 54.0
    n = 0
    if r * r < q * q * q:
        th = math.acos(max(-1.0, min(1.0, r / math.sqrt(q * q * q))))
        s = -2.0 * math.sqrt(q)
        out[0] = s * math.cos(th / 3.0) - A / 3.0
        out[1] = s * math.cos((th + 2.0 * math.pi) / 3.0) - A / 3.0
        out[2] = s * math.cos((th - 2.0 * math.pi) / 3.0) - A / 3.0
        n = 3
    else:
        u = -math.copysign(1.0, r) * (abs(r) + math.sqrt(r * r - q * q * q)) ** (1.0 / 3.0)
        v = q / u if u != 0.0 else 0.0
        out[0] = u + v - A / 3.0
        n = 1
    if n == 1:
        # deflate to catch near-double roots the closed form may misclassify
        t = out[0]
        for _ in range(3):
            f = ((a * t + b) * t + c) * t + d
            fp = (3.0 * a * t + 2.0 * b) * t + c
            if fp == 0.0:
                break
            t -= f / fp
        out[0] = t
        qb = b + a * t
        qc = c + qb * t
        dq = qb * qb - 4.0 * a * qc
        scale = qb * qb + abs(4.0 * a * qc) + 1.0
        if dq >= -1e-9 * scale:
            sq = math.sqrt(max(dq, 0.0))
            out[1] = (-qb + sq) / (2.0 * a)
            out[2] = (-qb - sq) / (2.0 * a)
            n = 3
    for i in range(n):
        t = out[i]
        for _ in range(3):
            f = ((a * t + b) * t + c) * t + d
            fp = (3.0 * a * t + 2.0 * b) * t + c
            if fp == 0.0:
                break
            t -= f / fp
        out[i] = t
    return n


@njit(cache=True, nogil=True)
def is_irreducible(a, b, c, d):
    """No rational root (x:y). Requires a != 0 and d != 0 handled: d == 0
    means y divides F."""
    if a == 0 or d == 0:
        return False
    roots = np.empty(3, dtype=np.float64)
    n = _real_roots(float(a), float(b), float(c), float(d), roots)
    aa = abs(a)
    for q in range(1, aa + 1):
        if aa % q != 0:
            continue
        for i in range(n):
            m = np.int64(math.floor(roots[i] * q + 0.5))
            for p in range(m - 1, m + 2):
                if _eval_form(a, b, c, d, p, q) == 0:
                    return False
    return True


@njit(cache=True, nogil=True)
def maximal_at(a, b, c, d, p):
    """Davenport-Heilbronn test: the ring of F is maximal at p unless
    F = 0 mod p or some GL2(Z)-translate has p^2 | a' and p | b'."""
    if a % p == 0 and b % p == 0 and c % p == 0 and d % p == 0:
        return False
    if a % p == 0 and b % p == 0:
        # multiple root at (1:0); leading coefficient is a
        return a % (p * p) != 0
    pp = p * p
    for x in range(p):
        fx = ((a * x + b) * x + c) * x + d
        if fx % p != 0:
            continue
        fpx = (3 * a * x + 2 * b) * x + c
        if fpx % p != 0:
            continue
        # multiple root at (x:1); translate it to (1:0)
        return fx % pp != 0
    return True


@njit(cache=True, nogil=True)
def is_maximal(a, b, c, d, disc, spf):
    n = abs(disc)
    while n > 1:
        p = np.int64(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e >= 2 and not maximal_at(a, b, c, d, p):
            return False
    return True


@njit(cache=True, nogil=True)
def _keep(a, b, c, d, disc, spf):
    if not is_maximal(a, b, c, d, disc, spf):
        return False
    return is_irreducible(a, b, c, d)


@njit(cache=True, nogil=True)
def _push(buf, n, a, b, c, d, disc):
    if n >= buf.shape[0]:
        nb = np.empty((2 * buf.shape[0], 5), dtype=np.int64)
        nb[: buf.shape[0]] = buf
        buf = nb
    buf[n, 0] = disc
    buf[n, 1] = a
    buf[n, 2] = b
    buf[n, 3] = c
    buf[n, 4] = d
    return buf


@njit(cache=True, nogil=True)
def enumerate_positive(X, a_lo, a_hi, spf):
    """Maximal irreducible reduced forms with 0 < disc < X and a in [a_lo, a_hi]."""
    buf = np.empty((1024, 5), dtype=np.int64)
    n = 0
    pmax = _isqrt(X - 1)
    root4 = math.sqrt(float(pmax))
    for a in range(a_lo, a_hi + 1):
        bmax = np.int64(root4 + 1.5 * a) + 1
        for b in range(-bmax, 1):
            bb = b * b
            c_lo = _ceildiv(bb - pmax, 3 * a)
            c_hi = _floordiv(bb - 1, 3 * a)
            for c in range(c_lo, c_hi + 1):
                P = bb - 3 * a * c
                bc = b * c
                d_lo = _ceildiv(bc - P, 9 * a)
                d_hi = _floordiv(bc + P, 9 * a)
                for d in range(d_lo, d_hi + 1):
                    R = c * c - 3 * b * d
                    if R < P:
                        continue
                    Q = bc - 9 * a * d
                    disc = form_disc(a, b, c, d)
                    if disc <= 0 or disc >= X:
                        continue
                    if Q == 0 or Q == P or Q == -P or P == R:
                        if not positive_canonical(a, b, c, d):
                            continue
                    elif not (b < 0 or (b == 0 and d < 0)):
                        continue
                    if _keep(a, b, c, d, disc, spf):
                        buf = _push(buf, n, a, b, c, d, disc)
                        n += 1
    return buf[:n].copy()


@njit(cache=True, nogil=True)
def enumerate_negative(X, a_lo, a_hi, spf):
    """Maximal irreducible reduced forms with -X < disc < 0, a in [a_lo, a_hi]."""
    buf = np.empty((1024, 5), dtype=np.int64)
    n = 0
    Xf = float(X)
    for a in range(a_lo, a_hi + 1):
        af = float(a)
        L0 = (Xf / 3.0) ** 0.25 / af
        ymax2 = (Xf / (4.0 * af**4)) ** (1.0 / 3.0)
        b_lo = np.int64(math.floor(-af * (1.5 + L0))) - 1
        b_hi = np.int64(math.ceil(af * L0)) + 1
        c_lo = np.int64(math.floor(af * (1.0 - L0))) - 1
        c_hi = np.int64(math.ceil(af * (0.75 + L0 + ymax2))) + 1
        a2 = 54.0 * af * af
        for b in range(b_lo, b_hi + 1):
            for c in range(c_lo, c_hi + 1):
                # exact window from the first two reduction inequalities
                d_lo = _floordiv(b * c, a) + 1
                d_hi = _ceildiv((a + b) * (a + b + c), a) - 1
                if d_lo > d_hi:
                    continue
                # disc(d) = -27 a^2 d^2 + B d + C must lie in (-X, 0)
                B = float(18 * a * b * c - 4 * b * b * b)
                C = float(b * b * c * c - 4 * a * c * c * c)
                delta1 = B * B + 108.0 * af * af * (C + Xf)
                if delta1 <= 0.0:
                    continue
                s1 = math.sqrt(delta1)
                w_lo = np.int64(math.floor((B - s1) / a2)) - 1
                w_hi = np.int64(math.ceil((B + s1) / a2)) + 1
                if w_lo < d_lo:
                    w_lo = d_lo
                if w_hi > d_hi:
                    w_hi = d_hi
                if w_lo > w_hi:
                    continue
                delta0 = B * B + 108.0 * af * af * C
                g_lo = w_hi + 1
                g_hi = w_hi
                if delta0 > 0.0:
                    s0 = math.sqrt(delta0)
                    # disc > 0 strictly inside the gap; shrink it by one for safety
                    g_lo = np.int64(math.ceil((B - s0) / a2)) + 1
                    g_hi = np.int64(math.floor((B + s0) / a2)) - 1
                d = w_lo
                while d <= w_hi:
                    if d >= g_lo and d <= g_hi:
                        d = g_hi + 1
                        continue
                    disc = form_disc(a, b, c, d)
                    if disc < 0 and disc > -X:
                        if d * d - a * a + a * c - b * d > 0:
                            if _keep(a, b, c, d, disc, spf):
                                buf = _push(buf, n, a, b, c, d, disc)
                                n += 1
                    d += 1
    return buf[:n].copy()


@njit(cache=True, nogil=True)
def splitting_type(a, b, c, d, p):
    """Factorization shape of F mod p (F assumed maximal at p)."""
    am = a % p
    bm = b % p
    cm = c % p
    dm = d % p
    nroots = 0
    mult_root = -2  # -2: none, -1: at infinity, else x
    if am == 0:
        nroots += 1
        if bm == 0:
            mult_root = -1
    for x in range(p):
        fx = ((am * x + bm) * x + cm) * x + dm
        if fx % p == 0:
            nroots += 1
            fpx = (3 * am * x + 2 * bm) * x + cm
            if fpx % p == 0:
                mult_root = x
    if nroots == 0:
        return ST_3
    if mult_root == -2:
        if nroots == 3:
            return ST_111
        return ST_12
    if nroots == 2:
        return ST_1_21
    # single root of multiplicity >= 2: decide double vs triple
    if mult_root == -1:
        # F = y^2 (b x + c y) + a x^3 ... with a = b = 0 mod p
        return ST_1_3 if cm == 0 else ST_1_21
    x0 = mult_root
    # second derivative of f at x0 vanishes mod p iff triple root (p > 3);
    # for p = 2, 3 compare against a (x - x0)^3 coefficientwise
    s2 = (3 * am * x0 + bm) % p  # coefficient of t^2 in f(t + x0)
    s1 = ((3 * am * x0 + 2 * bm) * x0 + cm) % p
    if s2 == 0 and s1 == 0:
        return ST_1_3
    return ST_1_21


@njit(cache=True, nogil=True)
def _legendre(d, p):
    r = d % p
    if r == 0:
        return 0
    e = (p - 1) // 2
    result = 1
    base = r
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return 1 if result == 1 else -1


@njit(cache=True, nogil=True)
def _is_sqfree_odd_part(m, spf):
    n = abs(m)
    while n > 1:
        p = spf[n]
        n //= p
        if n % p == 0:
            return False
    return True


@njit(cache=True, nogil=True)
def _is_fundamental(dd, spf):
    if dd % 4 == 1:
        return _is_sqfree_odd_part(dd, spf)
    if dd % 4 == 0:
        m = dd // 4
        if m % 4 == 2 or m % 4 == 3:
            return _is_sqfree_odd_part(m, spf)
    return False


@njit(cache=True, nogil=True)
def field_invariants(forms, spf):
    """Per-field invariants for rows of ``forms`` = (disc, a, b, c, d).

    Output columns: is_cyclic, f_F, d_F, three_power, e_F, genus_exponent,
    three_totram, error_code. A nonzero error code marks a failed internal
    identity (decomposition not unique, Kronecker rule violated, cyclic
    field with e = 0)."""
    m = forms.shape[0]
    out = np.zeros((m, 8), dtype=np.int64)
    for i in range(m):
        disc = forms[i, 0]
        a = forms[i, 1]
        b = forms[i, 2]
        c = forms[i, 3]
        d = forms[i, 4]
        err = 0
        cyclic = 0
        if disc > 0:
            r = _isqrt(disc)
            if r * r == disc:
                cyclic = 1
        f = np.int64(1)
        n = abs(disc)
        while n > 1:
            p = np.int64(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if p != 3 and e >= 2:
                if splitting_type(a, b, c, d, p) == ST_1_3:
                    f *= p
        three_totram = 0
        if b % 3 == 0 and c % 3 == 0:
            three_totram = 1
        q = disc // (f * f)
        if q * f * f != disc:
            err = 1
        # three_power from the 3-adic valuation of disc / f^2
        v3 = 0
        t = q
        while t % 3 == 0 and t != 0:
            t //= 3
            v3 += 1
        found = 0
        dF = np.int64(0)
        tp = np.int64(0)
        for pw in (1, 9, 81):
            if q % pw == 0:
                cand = q // pw
                if _is_fundamental(cand, spf):
                    found += 1
                    dF = cand
                    tp = pw
        if found != 1:
            err = 2
        ecount = 0
        n = f
        while n > 1:
            p = np.int64(spf[n])
            n //= p
            if p == 2:
                continue
            leg = _legendre(dF, p)
            if (leg == 1) != (p % 3 == 1):
                err = 3
            if leg == 1:
                ecount += 1
        if three_totram == 1 and dF % 3 == 1:
            ecount += 1
        gexp = ecount
        if cyclic == 1:
            if ecount == 0:
                err = 4
            gexp = ecount - 1
        out[i, 0] = cyclic
        out[i, 1] = f
        out[i, 2] = dF
        out[i, 3] = tp
        out[i, 4] = ecount
        out[i, 5] = gexp
        out[i, 6] = three_totram
        out[i, 7] = err
    return out


@njit(cache=True, nogil=True)
def splitting_types_at(forms, p):
    m = forms.shape[0]
    out = np.empty(m, dtype=np.int8)
    for i in range(m):
        out[i] = splitting_type(forms[i, 1], forms[i, 2], forms[i, 3], forms[i, 4], p)
    return out
