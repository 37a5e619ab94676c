"""Extended-precision numbers with an attached error radius.

:class:`PrecisionReal` stores a midpoint (mpf, or mpc for complex values)
and a nonnegative radius. Arithmetic propagates radii the way midpoint-
radius interval arithmetic does, plus one rounding unit per operation, so
the true value always lies within ``radius`` of ``value``.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Union

import mpmath
from mpmath import mp, mpc, mpf

from ..errors import DomainError

DEFAULT_DPS = 60
GUARANTEED_DIGITS = 30


def working_dps() -> int:
    """Working precision in decimal digits; CGC_PRECISION overrides the digit target."""
    env = os.environ.get("CGC_PRECISION")
    if env:
        try:
            target = int(env)
        except ValueError:
            raise DomainError(f"CGC_PRECISION must be an integer, got {env!r}") from None
        if target < 10:
            raise DomainError("CGC_PRECISION must be at least 10")
        return max(DEFAULT_DPS, 2 * target)
    return DEFAULT_DPS


def target_digits() -> int:
    env = os.environ.get("CGC_PRECISION")
    return int(env) if env else GUARANTEED_DIGITS


@contextmanager
def precision(dps: int | None = None):
    with mp.workdps(dps or working_dps()):
        yield


def _ulp(v) -> mpf:
    return abs(v) * mpf(10) ** (-(mp.dps - 3)) if v != 0 else mpf(10) ** (-(mp.dps + 10))


Number = Union[int, float, mpf, mpc, "PrecisionReal"]


@dataclass(frozen=True)
class PrecisionReal:
    value: object  # mpf or mpc
    err: mpf

    def __post_init__(self) -> None:
        if self.err < 0:
            raise ValueError("error radius must be nonnegative")

    # construction -----------------------------------------------------
    @classmethod
    def exact(cls, v) -> "PrecisionReal":
        if isinstance(v, PrecisionReal):
            return v
        if isinstance(v, complex):
            v = mpc(v)
        elif not isinstance(v, (mpf, mpc)):
            v = mpmath.mpmathify(v)
        return cls(v, _ulp(v))

    @classmethod
    def with_error(cls, v, err) -> "PrecisionReal":
        v = mpmath.mpmathify(v)
        return cls(v, mpf(abs(err)) + _ulp(v))

    # accessors --------------------------------------------------------
    @property
    def is_complex(self) -> bool:
        return isinstance(self.value, mpc)

    @property
    def real(self) -> "PrecisionReal":
        return PrecisionReal(mpmath.re(self.value), self.err)

    @property
    def imag(self) -> "PrecisionReal":
        return PrecisionReal(mpmath.im(self.value), self.err)

    def contains(self, other: Number, slack=0) -> bool:
        o = _lift(other)
        return abs(self.value - o.value) <= self.err + o.err + mpmath.mpmathify(slack)

    def close_to(self, other: Number, tol) -> bool:
        """|self - other| plus both radii is below ``tol``."""
        o = _lift(other)
        return abs(self.value - o.value) + self.err + o.err <= mpmath.mpmathify(tol)

    def decimal(self, digits: int = GUARANTEED_DIGITS) -> str:
        if self.is_complex:
            re, im = mpmath.re(self.value), mpmath.im(self.value)
            sign = "+" if im >= 0 else "-"
            return f"{mpmath.nstr(re, digits, strip_zeros=False)}{sign}{mpmath.nstr(abs(im), digits, strip_zeros=False)}j"
        return mpmath.nstr(self.value, digits, strip_zeros=False)

    def err_decimal(self) -> str:
        return mpmath.nstr(self.err, 5)

    def __float__(self) -> float:
        return float(mpmath.re(self.value))

    def __complex__(self) -> complex:
        return complex(self.value)

    def __repr__(self) -> str:
        return f"PrecisionReal({self.decimal(20)} +/- {mpmath.nstr(self.err, 3)})"

    # arithmetic -------------------------------------------------------
    def __neg__(self) -> "PrecisionReal":
        return PrecisionReal(-self.value, self.err)

    def __add__(self, other: Number) -> "PrecisionReal":
        o = _lift(other)
        v = self.value + o.value
        return PrecisionReal(v, self.err + o.err + _ulp(v))

    __radd__ = __add__

    def __sub__(self, other: Number) -> "PrecisionReal":
        return self + (-_lift(other))

    def __rsub__(self, other: Number) -> "PrecisionReal":
        return _lift(other) - self

    def __mul__(self, other: Number) -> "PrecisionReal":
        o = _lift(other)
        v = self.value * o.value
        e = abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err
        return PrecisionReal(v, e + _ulp(v))

    __rmul__ = __mul__

    def reciprocal(self) -> "PrecisionReal":
        m = abs(self.value)
        if m <= self.err:
            raise ZeroDivisionError("interval contains zero")
        v = 1 / self.value
        return PrecisionReal(v, self.err / (m * (m - self.err)) + _ulp(v))

    def __truediv__(self, other: Number) -> "PrecisionReal":
        return self * _lift(other).reciprocal()

    def __rtruediv__(self, other: Number) -> "PrecisionReal":
        return _lift(other) * self.reciprocal()

    def __pow__(self, n: int) -> "PrecisionReal":
        if not isinstance(n, int):
            raise TypeError("use pw() for non-integer exponents")
        if n < 0:
            return (self ** (-n)).reciprocal()
        out = PrecisionReal.exact(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


def _lift(x: Number) -> PrecisionReal:
    return x if isinstance(x, PrecisionReal) else PrecisionReal.exact(x)


def exp(x: Number) -> PrecisionReal:
    x = _lift(x)
    v = mpmath.exp(x.value)
    return PrecisionReal(v, abs(v) * mpmath.expm1(x.err) + _ulp(v))


def log(x: Number) -> PrecisionReal:
    x = _lift(x)
    m = abs(x.value)
    if m <= x.err:
        raise DomainError("log of an interval containing zero")
    v = mpmath.log(x.value)
    return PrecisionReal(v, x.err / (m - x.err) + _ulp(v))


def pw(x: Number, s) -> PrecisionReal:
    """x ** s for real x > 0 (interval) and any exponent s."""
    x = _lift(x)
    s = _lift(s)
    return exp(log(x) * s)


def sqrt(x: Number) -> PrecisionReal:
    x = _lift(x)
    if mpmath.re(x.value) - x.err <= 0 and not x.is_complex:
        raise DomainError("sqrt needs a positive interval")
    v = mpmath.sqrt(x.value)
    return PrecisionReal(v, x.err / (abs(v) + mpmath.sqrt(max(abs(x.value) - x.err, 0))) + _ulp(v))


def cbrt(x: Number) -> PrecisionReal:
    x = _lift(x)
    if x.value - x.err <= 0:
        raise DomainError("cbrt needs a positive interval")
    v = mpmath.cbrt(x.value)
    lo = mpmath.cbrt(x.value - x.err)
    return PrecisionReal(v, v - lo + _ulp(v))


# ---------------------------------------------------------------------------
# truncated power series in one variable


class Series:
    """Truncated power series sum c_k x^k, k < n, with mp coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = list(coeffs)

    @classmethod
    def var(cls, n: int) -> "Series":
        c = [mpf(0)] * n
        if n > 1:
            c[1] = mpf(1)
        return cls(c)

    @classmethod
    def const(cls, v, n: int) -> "Series":
        c = [mpf(0)] * n
        c[0] = mpmath.mpmathify(v)
        return cls(c)

    @property
    def n(self) -> int:
        return len(self.c)

    def _other(self, o) -> "Series":
        return o if isinstance(o, Series) else Series.const(o, self.n)

    def __add__(self, o):
        o = self._other(o)
        return Series([a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self.c])

    def __sub__(self, o):
        return self + (-self._other(o))

    def __rsub__(self, o):
        return self._other(o) - self

    def __mul__(self, o):
        if not isinstance(o, Series):
            o = mpmath.mpmathify(o)
            return Series([a * o for a in self.c])
        n = self.n
        out = [mpf(0)] * n
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j in range(n - i):
                b = o.c[j]
                if b != 0:
                    out[i + j] += a * b
        return Series(out)

    __rmul__ = __mul__

    def inverse(self) -> "Series":
        if self.c[0] == 0:
            raise ZeroDivisionError("series with zero constant term")
        n = self.n
        inv = [mpf(0)] * n
        inv[0] = 1 / self.c[0]
        for k in range(1, n):
            s = 0
            for j in range(1, k + 1):
                if self.c[j] != 0:
                    s += self.c[j] * inv[k - j]
            inv[k] = -s * inv[0]
        return Series(inv)

    def __truediv__(self, o):
        if not isinstance(o, Series):
            return self * (1 / mpmath.mpmathify(o))
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._other(o) * self.inverse()

    def __pow__(self, k: int):
        out = Series.const(1, self.n)
        for _ in range(k):
            out = out * self
        return out

    def log(self) -> "Series":
        """log of a series with constant term 1."""
        if self.c[0] != 1:
            raise DomainError("log needs constant term 1")
        n = self.n
        # (log f)' = f'/f
        d = Series([(k + 1) * self.c[k + 1] for k in range(n - 1)] + [mpf(0)])
        q = (d * self.inverse()).c
        return Series([mpf(0)] + [q[k - 1] / k for k in range(1, n)])

    def exp(self) -> "Series":
        """exp of a series with zero constant term."""
        if self.c[0] != 0:
            raise DomainError("exp needs constant term 0")
        n = self.n
        out = [mpf(0)] * n
        out[0] = mpf(1)
        # g = exp(f): k g_k = sum_{j=1}^{k} j f_j g_{k-j}
        for k in range(1, n):
            s = 0
            for j in range(1, k + 1):
                if self.c[j] != 0:
                    s += j * self.c[j] * out[k - j]
            out[k] = s / k
        return Series(out)
