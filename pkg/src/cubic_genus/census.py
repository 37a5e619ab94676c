"""Tallies of cubic fields by genus number at a ladder of discriminant bounds.

Two variants are kept side by side. The ``noncyclic`` tallies feed the
comparison with the asymptotic constants; the ``exact`` tallies also count
cyclic fields (with their own genus numbers) so that the integer moment
identities can be checked on everything that was enumerated.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import _kernels as K
from .arith import psi
from .cubic_enum import FieldTable, Signature, enumerate_table
from .errors import ConsistencyError, DomainError, UnsupportedSpecError
from .local_invariants import LocalKind, LocalSpecification, SplittingType, spec_summary

DEFAULT_CHECKPOINTS = 20
VARIANTS = ("noncyclic", "exact")

_TYPE_CODE = {
    SplittingType.SPLIT: K.ST_111,
    SplittingType.PARTIAL: K.ST_12,
    SplittingType.INERT: K.ST_3,
    SplittingType.PARTIAL_RAMIFIED: K.ST_1_21,
    SplittingType.TOTALLY_RAMIFIED: K.ST_1_3,
}


def default_checkpoints(X_max: int, count: int = DEFAULT_CHECKPOINTS) -> list[int]:
    """ceil(X_max / 2^j) for j = count-1 .. 0, ascending and deduplicated."""
    pts = sorted({-(-int(X_max) // (1 << j)) for j in range(count)})
    return [x for x in pts if x >= 1]


def in_T31_mask(disc: np.ndarray) -> np.ndarray:
    """v_3(disc) = 4 and disc / 81 = 1 mod 3."""
    q = disc // 81
    return (disc % 81 == 0) & (q % 3 == 1)


def sigma_mask(table: FieldTable, spec: LocalSpecification) -> np.ndarray:
    """Boolean mask of the rows of ``table`` lying in the specification."""
    disc = table.disc
    mask = table.col("signature") == spec.infinity.sign
    if not mask.any():
        return mask
    forms = None
    for p, cond in spec.primes.items():
        if p == 3:
            if cond.kind is LocalKind.TOTRAM:
                mask &= table.col("three_totram") == 1
            elif cond.kind is LocalKind.T31:
                mask &= in_T31_mask(disc)
            elif cond.kind is LocalKind.NOT_T31:
                mask &= ~in_T31_mask(disc)
            else:
                raise UnsupportedSpecError(f"condition {cond.kind.value} at p = 3")
            continue
        if forms is None:
            forms = table.forms()
        codes = K.splitting_types_at(forms, np.int64(p))
        if cond.kind is LocalKind.TOTRAM:
            mask &= codes == K.ST_1_3
        else:
            allowed = np.array(sorted(_TYPE_CODE[t] for t in cond.types), dtype=np.int8)
            mask &= np.isin(codes, allowed)
    return mask


def _moment_key(z) -> str:
    return f"z={z}"


def _check_z(z):
    if isinstance(z, bool) or not isinstance(z, (int, float)):
        raise DomainError(f"census moments need real z, got {z!r}")
    if isinstance(z, float) and z.is_integer():
        z = int(z)
    if isinstance(z, int) and z < 0:
        raise DomainError("integer moments must have z >= 0")
    return z


@dataclass
class CensusTable:
    """Integer tallies per checkpoint.

    ``counts[variant][i][k]`` is the number of fields of that variant with
    |disc| < checkpoints[i] and genus number 3^k. ``direct[variant][z][i]``
    is the moment sum of g_F^z accumulated field by field, kept separately
    from the graded counts so the two can be compared.
    """

    X_max: int
    spec: LocalSpecification
    checkpoints: list
    z_list: list
    counts: dict
    direct: dict
    cyclic: list
    l: int = 0

    @property
    def kmax(self) -> int:
        return len(self.counts["noncyclic"][0]) - 1 if self.checkpoints else -1

    def N_k(self, i: int, k: int, variant: str = "noncyclic") -> int:
        row = self.counts[variant][i]
        return row[k] if 0 <= k < len(row) else 0

    def total(self, i: int, variant: str = "noncyclic") -> int:
        return sum(self.counts[variant][i])

    def moment(self, i: int, z, variant: str = "noncyclic"):
        """sum_k 3^{kz} N_k (an exact integer for integer z >= 0)."""
        row = self.counts[variant][i]
        if isinstance(z, int):
            return sum(3 ** (k * z) * n for k, n in enumerate(row))
        return sum(3.0 ** (k * z) * n for k, n in enumerate(row))

    def genus_sum(self, i: int, variant: str = "noncyclic") -> int:
        return self.moment(i, 1, variant)

    def check_identities(self) -> list[str]:
        """Exact comparison of graded and field-by-field moments; returns failures."""
        bad = []
        for variant in VARIANTS:
            for z in self.z_list:
                for i, X in enumerate(self.checkpoints):
                    lhs = self.moment(i, z, variant)
                    rhs = self.direct[variant][_moment_key(z)][i]
                    same = lhs == rhs if isinstance(z, int) else math.isclose(lhs, rhs, rel_tol=1e-12)
                    if not same:
                        bad.append(f"{variant} z={z} X={X}: graded {lhs} vs direct {rhs}")
        # cyclic fields lose one factor of 3, so only the non-cyclic tallies vanish below l
        for i, X in enumerate(self.checkpoints):
            for k in range(min(self.l, len(self.counts["noncyclic"][i]))):
                if self.counts["noncyclic"][i][k]:
                    bad.append(f"X={X}: N_{k} nonzero below l = {self.l}")
        for variant in VARIANTS:
            for i in range(1, len(self.checkpoints)):
                prev, cur = self.counts[variant][i - 1], self.counts[variant][i]
                if any(a > b for a, b in zip(prev, cur)):
                    bad.append(f"{variant}: counts decrease between checkpoints {i - 1} and {i}")
        return bad

    def to_json(self) -> dict:
        return {
            "X_max": self.X_max,
            "spec": self.spec.to_json(),
            "checkpoints": list(self.checkpoints),
            "z_list": list(self.z_list),
            "l": self.l,
            "counts": self.counts,
            "direct": self.direct,
            "cyclic": self.cyclic,
        }

    @classmethod
    def from_json(cls, data) -> "CensusTable":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return cls(
            X_max=int(data["X_max"]),
            spec=LocalSpecification.from_json(data["spec"]),
            checkpoints=[int(x) for x in data["checkpoints"]],
            z_list=[_check_z(z) for z in data["z_list"]],
            counts=data["counts"],
            direct=data["direct"],
            cyclic=[int(c) for c in data["cyclic"]],
            l=int(data.get("l", 0)),
        )


def _tally(absdisc: np.ndarray, kcol: np.ndarray, checkpoints: list, kmax: int) -> list:
    out = []
    per_k = [absdisc[kcol == k] for k in range(kmax + 1)]
    for X in checkpoints:
        out.append([int(np.searchsorted(a, X, side="left")) for a in per_k])
    return out


def _direct_moments(absdisc: np.ndarray, kcol: np.ndarray, checkpoints: list, z_list: list) -> dict:
    out = {}
    for z in z_list:
        vals = []
        for X in checkpoints:
            n = int(np.searchsorted(absdisc, X, side="left"))
            ks = kcol[:n]
            if isinstance(z, int):
                # exact integer sum over the fields, one power per distinct k
                uniq, cnt = np.unique(ks, return_counts=True)
                vals.append(sum(int(c) * 3 ** (int(k) * z) for k, c in zip(uniq, cnt)))
            else:
                vals.append(float(np.sum(3.0 ** (ks.astype(np.float64) * z))))
        out[_moment_key(z)] = vals
    return out


def census_from_table(
    table: FieldTable,
    spec: LocalSpecification,
    checkpoints: Iterable[int] | None = None,
    z_list: Iterable = (0, 1, 2),
) -> CensusTable:
    """Tally an already enumerated table (for example one read from a dump)."""
    X_max = table.X
    cps = default_checkpoints(X_max) if checkpoints is None else sorted({int(x) for x in checkpoints})
    if cps and (cps[0] < 1 or cps[-1] > X_max):
        raise DomainError(f"checkpoints must lie in [1, {X_max}]")
    zs = [_check_z(z) for z in z_list]
    summ = spec_summary(spec)
    sub = table.select(sigma_mask(table, spec))
    absdisc = np.abs(sub.disc)
    kcol = sub.col("genus_exponent")
    cyc = sub.col("is_cyclic") == 1
    kmax = max(int(kcol.max()) if kcol.size else 0, summ.l)
    counts = {
        "noncyclic": _tally(absdisc[~cyc], kcol[~cyc], cps, kmax),
        "exact": _tally(absdisc, kcol, cps, kmax),
    }
    direct = {
        "noncyclic": _direct_moments(absdisc[~cyc], kcol[~cyc], cps, zs),
        "exact": _direct_moments(absdisc, kcol, cps, zs),
    }
    cyc_abs = absdisc[cyc]
    cyclic = [int(np.searchsorted(cyc_abs, X, side="left")) for X in cps]
    out = CensusTable(X_max, spec, cps, zs, counts, direct, cyclic, summ.l)
    bad = out.check_identities()
    if bad:
        raise ConsistencyError("census identity failure: " + "; ".join(bad[:5]))
    return out


def run_census(
    X_max: int,
    spec: LocalSpecification,
    checkpoints: Iterable[int] | None = None,
    z_list: Iterable = (0, 1, 2),
    threads: int | None = None,
    table: FieldTable | None = None,
) -> CensusTable:
    """Enumerate fields of the specification's signature and tally them."""
    if table is None:
        table = enumerate_table(X_max, spec.infinity, threads)
    elif table.X < X_max:
        raise DomainError(f"table covers X < {table.X}, census needs {X_max}")
    elif table.X > X_max:
        table = table.below(X_max)
    return census_from_table(table, spec, checkpoints, z_list)


# ---------------------------------------------------------------------------
# per-f counts


def per_f_counts(X: int, spec: LocalSpecification, table: FieldTable | None = None, threads=None) -> dict:
    """f -> (M(X, f), M'(X, f)) over non-cyclic fields of the specification.

    M counts fields with f_F = t f; M' those among them with 3 totally
    ramified and d_F = 1 mod 3.
    """
    if table is None:
        table = enumerate_table(X, spec.infinity, threads)
    else:
        table = table.below(X)
    summ = spec_summary(spec)
    sub = table.select(sigma_mask(table, spec) & (table.col("is_cyclic") == 0))
    fF = sub.col("f_F")
    if np.any(fF % summ.t):
        raise ConsistencyError("a field in the specification has t not dividing f_F")
    f = fF // summ.t
    prime = (sub.col("three_totram") == 1) & (sub.col("d_F") % 3 == 1)
    if np.any(prime != in_T31_mask(sub.disc)):
        raise ConsistencyError("T31 membership disagrees with the d_F description")
    out: dict[int, tuple[int, int]] = {}
    uniq, inv = np.unique(f, return_inverse=True)
    M = np.bincount(inv, minlength=uniq.size)
    Mp = np.bincount(inv, weights=prime.astype(np.int64), minlength=uniq.size)
    for u, m, mp_ in zip(uniq, M, Mp):
        u = int(u)
        if u * u >= X and m:
            raise ConsistencyError(f"M(X, f) nonzero for f = {u} >= sqrt(X)")
        out[u] = (int(m), int(mp_))
    return out


def per_f_rebuild(X: int, spec: LocalSpecification, table: FieldTable | None = None, threads=None) -> list[tuple[int, int, int]]:
    """[(k, N_k, rebuilt)] with N_k rebuilt from per-f counts as
    sum_{psi(f)=k-l} (M - M') + sum_{psi(f)=k-l-1} M'."""
    if table is None:
        table = enumerate_table(X, spec.infinity, threads)
    else:
        table = table.below(X)
    summ = spec_summary(spec)
    pf = per_f_counts(X, spec, table)
    sub = table.select(sigma_mask(table, spec) & (table.col("is_cyclic") == 0))
    kcol = sub.col("genus_exponent")
    kmax = max(int(kcol.max()) if kcol.size else 0, summ.l) + 1
    rebuilt = [0] * (kmax + 1)
    for f, (m, mp_) in pf.items():
        j = psi(f) if f > 1 else 0
        k = j + summ.l
        rebuilt[k] += m - mp_
        rebuilt[k + 1] += mp_
    direct = np.bincount(kcol, minlength=kmax + 1) if kcol.size else np.zeros(kmax + 1, dtype=np.int64)
    return [(k, int(direct[k]), rebuilt[k]) for k in range(kmax + 1)]


# ---------------------------------------------------------------------------
# residuals


@dataclass(frozen=True)
class ResidualRow:
    key: str
    X: int
    observed: float
    R0: float
    R1: float
    r0: float
    r1: float


@dataclass
class ResidualReport:
    rows: list = field(default_factory=list)
    slopes: dict = field(default_factory=dict)
    notices: list = field(default_factory=list)

    def for_key(self, key: str) -> list:
        return [r for r in self.rows if r.key == key]

    def row(self, key: str, X: int) -> ResidualRow:
        for r in self.rows:
            if r.key == key and r.X == X:
                return r
        raise KeyError((key, X))


def coefficient_key(kind: str, value=None) -> str:
    """'all' for the total count, 'k=<k>' for N_k, 'z=<z>' for moment sums."""
    if kind == "all":
        return "all"
    if kind == "k":
        return f"k={int(value)}"
    if kind == "z":
        return _moment_key(_check_z(value))
    raise DomainError(f"unknown coefficient kind {kind!r}")


def _observed(table: CensusTable, key: str, i: int, variant: str):
    if key == "all":
        return table.total(i, variant)
    kind, val = key.split("=")
    if kind == "k":
        return table.N_k(i, int(val), variant)
    z = _check_z(float(val))
    return table.moment(i, z, variant)


def _slope(xs: list, ys: list):
    lx = np.log(np.asarray(xs, dtype=np.float64))
    ly = np.log(np.asarray(ys, dtype=np.float64))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    return float(coef[0])


def residual_report(table: CensusTable, coefficients: Mapping, variant: str = "noncyclic") -> ResidualReport:
    """Residuals of each tallied series against its two-term prediction.

    ``coefficients`` maps keys from :func:`coefficient_key` to objects with
    ``alpha`` and ``beta`` (real parts are used).
    """
    rep = ResidualReport()
    top = [i for i, X in enumerate(table.checkpoints) if 10 * X >= table.X_max]
    for key in sorted(coefficients):
        cs = coefficients[key]
        a = float(cs.alpha.real) if hasattr(cs.alpha, "real") else float(cs.alpha)
        b = float(cs.beta.real) if hasattr(cs.beta, "real") else float(cs.beta)
        for i, X in enumerate(table.checkpoints):
            obs = _observed(table, key, i, variant)
            x = float(X)
            R0 = obs - a * x
            R1 = R0 - b * x ** (5.0 / 6.0)
            rep.rows.append(ResidualRow(key, X, float(obs), R0, R1, R0 / x ** (5.0 / 6.0), R1 / x ** (2.0 / 3.0)))
        pts = [(table.checkpoints[i], abs(rep.row(key, table.checkpoints[i]).R1)) for i in top]
        pts = [(x, y) for x, y in pts if y > 0]
        if len(pts) < 3:
            rep.slopes[key] = None
            rep.notices.append(f"{key}: fewer than 3 usable checkpoints in the top decade, slope omitted")
        else:
            rep.slopes[key] = _slope([p[0] for p in pts], [p[1] for p in pts])
    return rep


# ---------------------------------------------------------------------------
# export


def build_id() -> str:
    """Digest of the package sources, stable across runs of the same build."""
    h = hashlib.sha1()
    root = Path(__file__).resolve().parent
    for path in sorted(root.rglob("*.py")):
        h.update(path.relative_to(root).as_posix().encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:12]


def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12e}"


def csv_columns(z_list: Iterable) -> list[str]:
    return ["X", "k", "N_k", "genus_sum", *[f"moment[{_moment_key(z)}]" for z in z_list], "cyclic_count", "R0", "R1", "r0", "r1"]


def table_rows(table: CensusTable, report: ResidualReport | None = None, variant: str = "noncyclic") -> list[dict]:
    """One row per (checkpoint, k) plus a 'all' row per checkpoint, as strings."""
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")
    cols = csv_columns(table.z_list)
    rows = []
    for i, X in enumerate(table.checkpoints):
        gs = table.genus_sum(i, variant)
        moms = [table.moment(i, z, variant) for z in table.z_list]
        for k in ["all", *range(table.kmax + 1)]:
            key = "all" if k == "all" else f"k={k}"
            n = table.total(i, variant) if k == "all" else table.N_k(i, k, variant)
            res = [None] * 4
            if report is not None:
                try:
                    r = report.row(key, X)
                    res = [r.R0, r.R1, r.r0, r.r1]
                except KeyError:
                    pass
            vals = [X, k if k == "all" else int(k), n, gs, *moms, table.cyclic[i], *res]
            rows.append({c: (str(v) if c == "k" else _fmt(v)) for c, v in zip(cols, vals)})
    return rows


def write_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    reader = csv.DictReader(io.StringIO(text))
    return list(reader.fieldnames or []), [dict(r) for r in reader]


def export(
    table: CensusTable,
    report: ResidualReport | None = None,
    fmt: str = "csv",
    path=None,
    coefficients: Mapping | None = None,
    variant: str = "noncyclic",
) -> str:
    """Render the table as CSV or JSON text; also written to ``path`` if given."""
    cols = csv_columns(table.z_list)
    rows = table_rows(table, report, variant)
    if fmt == "csv":
        text = write_csv(rows, cols)
    elif fmt == "json":
        meta = {
            "spec": table.spec.to_json(),
            "X_max": table.X_max,
            "z_list": list(table.z_list),
            "variant": variant,
            "build_id": build_id(),
            "coefficients": {k: v.entries() for k, v in sorted((coefficients or {}).items())},
        }
        if report is not None:
            meta["slopes"] = report.slopes
            meta["notices"] = report.notices
        doc = {
            "metadata": meta,
            "columns": cols,
            "rows": rows,
            "exact_rows": table_rows(table, None, "exact") if variant == "noncyclic" else [],
        }
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    else:
        raise DomainError(f"unknown export format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def empty_csv(z_list: Iterable = (0, 1, 2)) -> str:
    return write_csv([], csv_columns(list(z_list)))


def default_spec(signature) -> LocalSpecification:
    return LocalSpecification.ordinary(Signature.parse(signature))


def genus_of_field_check(table: FieldTable) -> list[int]:
    """Row indices where g_F disagrees with 3^{psi(f_F) + [T31]} (non-cyclic)."""
    bad = []
    disc = table.disc
    t31 = in_T31_mask(disc)
    for i in np.nonzero(table.col("is_cyclic") == 0)[0]:
        f = int(table.col("f_F")[i])
        expect = (psi(f) if f > 1 else 0) + int(t31[i])
        if expect != int(table.col("genus_exponent")[i]):
            bad.append(int(i))
    return bad


__all__ = [
    "CensusTable",
    "ResidualReport",
    "ResidualRow",
    "census_from_table",
    "coefficient_key",
    "default_checkpoints",
    "export",
    "per_f_rebuild",
    "per_f_counts",
    "read_csv",
    "residual_report",
    "run_census",
    "sigma_mask",
    "table_rows",
    "write_csv",
]
