"""Enumeration of cubic fields through reduced maximal binary cubic forms.

A cubic field of discriminant D corresponds to exactly one GL2(Z)-class of
irreducible integral binary cubic forms whose ring is maximal. We walk the
reduced representatives of those classes inside coefficient boxes that are
complete for |D| < X, test maximality at each p with p^2 | D, and attach the
genus data computed by :mod:`cubic_genus._kernels`.

The bulk path works on numpy tables (:class:`FieldTable`); the dataclass
records are for inspection and small X.
"""

from __future__ import annotations

import enum
import io
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

import numpy as np

from . import _kernels as K
from .errors import ConsistencyError, DomainError, OverflowCheckError, ResourceError

# Largest supported discriminant bound. Every intermediate in the kernels is
# then far below 2^62.
MAX_X = 10**9
# Bytes allowed for the smallest-prime-factor table (int32 per entry).
SPF_BUDGET = 1_600_000_000

_INT64_MAX = (1 << 63) - 1

DUMP_MAGIC = b"CGC1"
_DUMP_HEADER = struct.Struct("<4sqq")
DUMP_COLUMNS = (
    "disc",
    "signature",
    "a",
    "b",
    "c",
    "d",
    "is_cyclic",
    "f_F",
    "d_F",
    "three_power",
    "e_F",
    "genus_exponent",
)


class Signature(str, enum.Enum):
    TOTALLY_REAL = "totally_real"
    COMPLEX = "complex"

    @property
    def sign(self) -> int:
        return 1 if self is Signature.TOTALLY_REAL else -1

    @classmethod
    def of_disc(cls, disc: int) -> "Signature":
        if disc == 0:
            raise DomainError("zero discriminant has no signature")
        return cls.TOTALLY_REAL if disc > 0 else cls.COMPLEX

    @classmethod
    def parse(cls, value: "str | Signature") -> "Signature":
        if isinstance(value, Signature):
            return value
        key = str(value).strip().lower()
        aliases = {"+": "totally_real", "real": "totally_real", "-": "complex", "positive": "totally_real", "negative": "complex"}
        key = aliases.get(key, key).replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown signature {value!r}") from None


@dataclass(frozen=True)
class BinaryCubicForm:
    """a x^3 + b x^2 y + c x y^2 + d y^3."""

    a: int
    b: int
    c: int
    d: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, x: int, y: int) -> int:
        return self.a * x**3 + self.b * x * x * y + self.c * x * y * y + self.d * y**3

    def transform(self, m00: int, m01: int, m10: int, m11: int) -> "BinaryCubicForm":
        """The form F(m00 x + m01 y, m10 x + m11 y)."""
        a, b, c, d = self.as_tuple()
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
        return BinaryCubicForm(na, nb, nc, nd)


@dataclass(frozen=True)
class CubicField:
    disc: int
    signature: Signature
    form: BinaryCubicForm
    is_cyclic: bool
    f_F: int
    d_F: int
    three_power: int
    e_F: int
    genus_exponent: int

    @property
    def genus_number(self) -> int:
        return 3**self.genus_exponent

    def to_record(self) -> tuple[int, ...]:
        return (
            self.disc,
            self.signature.sign,
            *self.form.as_tuple(),
            int(self.is_cyclic),
            self.f_F,
            self.d_F,
            self.three_power,
            self.e_F,
            self.genus_exponent,
        )

    @classmethod
    def from_record(cls, rec: Iterable[int]) -> "CubicField":
        r = [int(v) for v in rec]
        return cls(
            disc=r[0],
            signature=Signature.TOTALLY_REAL if r[1] > 0 else Signature.COMPLEX,
            form=BinaryCubicForm(r[2], r[3], r[4], r[5]),
            is_cyclic=bool(r[6]),
            f_F=r[7],
            d_F=r[8],
            three_power=r[9],
            e_F=r[10],
            genus_exponent=r[11],
        )


def _as_form(form) -> BinaryCubicForm:
    if isinstance(form, BinaryCubicForm):
        return form
    a, b, c, d = form
    return BinaryCubicForm(int(a), int(b), int(c), int(d))


def form_disc(form) -> int:
    """Discriminant of the form; raises if it does not fit in int64."""
    a, b, c, d = _as_form(form).as_tuple()
    disc = 18 * a * b * c * d + b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d
    if abs(disc) > _INT64_MAX:
        raise OverflowCheckError(f"discriminant of {(a, b, c, d)} exceeds int64")
    return disc


def hessian(form) -> tuple[int, int, int]:
    a, b, c, d = _as_form(form).as_tuple()
    return (b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)


def is_irreducible(form) -> bool:
    a, b, c, d = _as_form(form).as_tuple()
    if a == 0 or d == 0:
        return False
    return bool(K.is_irreducible(a, b, c, d))


def is_reduced(form) -> bool:
    """Whether ``form`` is the canonical representative of its class.

    Positive discriminant: reduced Hessian, a > 0, and lexicographically
    least among the reduced images. Negative discriminant: a > 0 and the
    complex root w of F(x, 1) has 0 < Re w < 1/2 and |w| > 1.
    """
    f = _as_form(form)
    disc = form_disc(f)
    if disc == 0:
        raise DomainError("degenerate form")
    if disc > 0:
        return bool(K.positive_canonical(*f.as_tuple()))
    return bool(K.negative_reduced(*f.as_tuple()))


def is_maximal(form, p: int) -> bool:
    """p-maximality of the cubic ring attached to ``form`` (needs p^2 | disc)."""
    f = _as_form(form)
    return bool(K.maximal_at(*f.as_tuple(), int(p)))


def is_cyclic(fld: CubicField) -> bool:
    if fld.disc <= 0:
        return False
    r = math.isqrt(fld.disc)
    return r * r == fld.disc


# ---------------------------------------------------------------------------
# bulk enumeration


@dataclass
class FieldTable:
    """Columnar field list sorted by (|disc|, disc, a, b, c, d).

    ``data`` has one row per field and the columns of :data:`DUMP_COLUMNS`,
    followed by a ``three_totram`` flag (3 totally ramified).
    """

    X: int
    data: np.ndarray

    COLUMNS = DUMP_COLUMNS + ("three_totram",)

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.shape[1] != len(self.COLUMNS):
            raise ValueError(f"bad table shape {self.data.shape}")

    def __len__(self) -> int:
        return self.data.shape[0]

    def col(self, name: str) -> np.ndarray:
        return self.data[:, self.COLUMNS.index(name)]

    @property
    def disc(self) -> np.ndarray:
        return self.col("disc")

    def forms(self) -> np.ndarray:
        """(disc, a, b, c, d) rows in the kernel layout."""
        return np.ascontiguousarray(self.data[:, [0, 2, 3, 4, 5]])

    def select(self, mask: np.ndarray) -> "FieldTable":
        return FieldTable(self.X, self.data[mask])

    def with_signature(self, signature) -> "FieldTable":
        s = Signature.parse(signature)
        return self.select(self.col("signature") == s.sign)

    def below(self, X: int) -> "FieldTable":
        """Fields with |disc| < X (X must not exceed the table bound)."""
        if X > self.X:
            raise DomainError(f"table built for X={self.X}, asked for {X}")
        n = int(np.searchsorted(np.abs(self.disc), X, side="left"))
        return FieldTable(X, self.data[:n])

    def field(self, i: int) -> CubicField:
        return CubicField.from_record(self.data[i, : len(DUMP_COLUMNS)])

    def fields(self) -> Iterator[CubicField]:
        for i in range(len(self)):
            yield self.field(i)

    def disc_signature_pairs(self) -> list[tuple[int, str]]:
        return sorted((int(d), Signature.of_disc(int(d)).value) for d in self.disc)

    @staticmethod
    def concat(X: int, parts: list["FieldTable"]) -> "FieldTable":
        if not parts:
            return FieldTable(X, np.zeros((0, len(FieldTable.COLUMNS)), dtype=np.int64))
        return FieldTable(X, _sort_rows(np.concatenate([p.data for p in parts])))


def _sort_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    # lexsort uses the last key as primary
    order = np.lexsort((rows[:, 5], rows[:, 4], rows[:, 3], rows[:, 2], rows[:, 0], np.abs(rows[:, 0])))
    return rows[order]


_SPF_CACHE: dict[str, np.ndarray] = {}


def spf_table(n: int) -> np.ndarray:
    """Shared smallest-prime-factor table covering 0..n (grown on demand)."""
    cached = _SPF_CACHE.get("spf")
    if cached is not None and cached.shape[0] > n:
        return cached
    if 4 * (n + 1) > SPF_BUDGET:
        raise ResourceError(f"factor table for {n} exceeds {SPF_BUDGET} bytes")
    size = max(n, 1 << 16)
    tbl = K.spf_sieve(size)
    _SPF_CACHE["spf"] = tbl
    return tbl


def a_bound(X: int, signature) -> int:
    """Largest leading coefficient a reduced form with |disc| < X can have."""
    s = Signature.parse(signature)
    if s is Signature.TOTALLY_REAL:
        # 27 a^4 D <= 4 P^3 / ... gives a <= (2/3)^{3/2} D^{1/4}
        return int((2.0 / 3.0) ** 1.5 * X**0.25) + 1
    return int((16.0 * X / 27.0) ** 0.25) + 1


def default_threads() -> int:
    return os.cpu_count() or 1


def _check_X(X: int) -> int:
    if isinstance(X, float):
        if not X.is_integer():
            raise DomainError(f"X must be an integer, got {X}")
        X = int(X)
    if X < 1:
        raise DomainError(f"X must be >= 1, got {X}")
    if X > MAX_X:
        raise DomainError(f"X={X} exceeds the supported bound {MAX_X}")
    return int(X)


def _shard_bounds(a_max: int, shards: int) -> list[tuple[int, int]]:
    # small a carries most of the work, so hand out single values first
    shards = max(1, shards)
    if a_max < 1:
        return []
    if shards == 1:
        return [(1, a_max)]
    return [(a, a) for a in range(1, a_max + 1)]


def enumerate_table(X: int, signature=None, threads: int | None = None) -> FieldTable:
    """All cubic fields with 0 < +-disc < X as a sorted :class:`FieldTable`.

    ``signature`` None means both. Output does not depend on ``threads``.
    """
    X = _check_X(X)
    sigs = [Signature.TOTALLY_REAL, Signature.COMPLEX] if signature is None else [Signature.parse(signature)]
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise DomainError("threads must be >= 1")
    width = len(FieldTable.COLUMNS)
    if X <= 23:
        return FieldTable(X, np.zeros((0, width), dtype=np.int64))
    spf = spf_table(X)
    jobs = []
    for s in sigs:
        kern = K.enumerate_positive if s is Signature.TOTALLY_REAL else K.enumerate_negative
        for lo, hi in _shard_bounds(a_bound(X, s), threads):
            jobs.append((kern, lo, hi))

    def run(job):
        kern, lo, hi = job
        forms = kern(np.int64(X), np.int64(lo), np.int64(hi), spf)
        return forms, K.field_invariants(forms, spf)

    if threads == 1 or len(jobs) <= 1:
        results = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    parts = []
    for forms, inv in results:
        if forms.shape[0] == 0:
            continue
        bad = np.nonzero(inv[:, 7])[0]
        if bad.size:
            i = int(bad[0])
            raise ConsistencyError(
                f"invariant check {int(inv[i, 7])} failed for form {tuple(int(v) for v in forms[i, 1:])}"
            )
        rows = np.empty((forms.shape[0], width), dtype=np.int64)
        rows[:, 0] = forms[:, 0]
        rows[:, 1] = np.where(forms[:, 0] > 0, 1, -1)
        rows[:, 2:6] = forms[:, 1:5]
        rows[:, 6:12] = inv[:, 0:6]
        rows[:, 12] = inv[:, 6]
        parts.append(rows)
    if not parts:
        return FieldTable(X, np.zeros((0, width), dtype=np.int64))
    return FieldTable(X, _sort_rows(np.concatenate(parts)))


def enumerate_fields(X: int, signature, threads: int | None = None) -> Iterator[CubicField]:
    """Stream of :class:`CubicField` with 0 < +-disc < X, sorted by |disc|."""
    yield from enumerate_table(X, signature, threads).fields()


# ---------------------------------------------------------------------------
# CGC1 dump


def write_dump(table: FieldTable, target: "str | os.PathLike | BinaryIO") -> None:
    body = np.ascontiguousarray(table.data[:, : len(DUMP_COLUMNS)], dtype="<i8")
    header = _DUMP_HEADER.pack(DUMP_MAGIC, table.X, body.shape[0])
    if isinstance(target, (str, os.PathLike)):
        with open(target, "wb") as fh:
            fh.write(header)
            fh.write(body.tobytes())
    else:
        target.write(header)
        target.write(body.tobytes())


def read_dump(source: "str | os.PathLike | BinaryIO") -> FieldTable:
    if isinstance(source, (str, os.PathLike)):
        raw = Path(source).read_bytes()
    else:
        raw = source.read()
    if len(raw) < _DUMP_HEADER.size:
        raise ValueError("truncated dump header")
    magic, X, count = _DUMP_HEADER.unpack_from(raw)
    if magic != DUMP_MAGIC:
        raise ValueError(f"bad dump magic {magic!r}")
    width = len(DUMP_COLUMNS)
    need = _DUMP_HEADER.size + 8 * width * count
    if len(raw) != need:
        raise ValueError(f"dump size {len(raw)} does not match {count} records")
    body = np.frombuffer(raw, dtype="<i8", offset=_DUMP_HEADER.size).reshape(count, width)
    data = np.empty((count, width + 1), dtype=np.int64)
    data[:, :width] = body
    # 3 is totally ramified exactly when 27 | disc
    data[:, width] = (data[:, 0] % 27 == 0).astype(np.int64)
    return FieldTable(int(X), data)


def dump_bytes(table: FieldTable) -> bytes:
    buf = io.BytesIO()
    write_dump(table, buf)
    return buf.getvalue()
