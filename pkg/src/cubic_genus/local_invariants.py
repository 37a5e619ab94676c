"""Local data of cubic fields and local specifications.

Splitting types are read off the maximal form modulo p. The decomposition
disc = three_power * d_F * f_F^2 and the genus exponent follow from the
set of totally ramified primes.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping

from . import _kernels as K
from .arith import factorize, is_fundamental_discriminant, is_probable_prime, kronecker, psi, valuation
from .cubic_enum import BinaryCubicForm, CubicField, Signature, form_disc, is_maximal
from .errors import ConsistencyError, DomainError, UnsupportedSpecError


class SplittingType(str, enum.Enum):
    SPLIT = "111"
    PARTIAL = "12"
    INERT = "3"
    PARTIAL_RAMIFIED = "1^2 1"
    TOTALLY_RAMIFIED = "1^3"

    @classmethod
    def from_code(cls, code: int) -> "SplittingType":
        return _CODE_TO_TYPE[int(code)]

    @classmethod
    def parse(cls, text: str) -> "SplittingType":
        key = str(text).strip().replace("²", "^2").replace("³", "^3").replace("(", "").replace(")", "")
        aliases = {"1^21": "1^2 1", "1^2,1": "1^2 1", "113": "1^3", "1^3": "1^3", "11 1": "111"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown splitting type {text!r}") from None


_CODE_TO_TYPE = {
    K.ST_111: SplittingType.SPLIT,
    K.ST_12: SplittingType.PARTIAL,
    K.ST_3: SplittingType.INERT,
    K.ST_1_21: SplittingType.PARTIAL_RAMIFIED,
    K.ST_1_3: SplittingType.TOTALLY_RAMIFIED,
}

# the four types making up A'_p (everything except totally ramified)
NOT_TOTRAM = frozenset(
    {SplittingType.SPLIT, SplittingType.PARTIAL, SplittingType.INERT, SplittingType.PARTIAL_RAMIFIED}
)


def _form_of(obj) -> BinaryCubicForm:
    if isinstance(obj, CubicField):
        return obj.form
    if isinstance(obj, BinaryCubicForm):
        return obj
    a, b, c, d = obj
    return BinaryCubicForm(int(a), int(b), int(c), int(d))


def _disc_of(obj) -> int:
    if isinstance(obj, CubicField):
        return obj.disc
    return form_disc(_form_of(obj))


def splitting_type(fld, p: int) -> SplittingType:
    """Splitting type of p in the field whose maximal form is ``fld``."""
    if not is_probable_prime(p):
        raise DomainError(f"{p} is not prime")
    form = _form_of(fld)
    disc = _disc_of(fld)
    if disc % (p * p) == 0 and not is_maximal(form, p):
        raise ConsistencyError(f"form {form.as_tuple()} is not maximal at {p}")
    return SplittingType.from_code(K.splitting_type(*form.as_tuple(), p))


def three_totally_ramified(fld) -> bool:
    a, b, c, d = _form_of(fld).as_tuple()
    return b % 3 == 0 and c % 3 == 0


def conductor_f(fld) -> int:
    """Product of the primes other than 3 that are totally ramified."""
    disc = _disc_of(fld)
    f = 1
    for p, e in factorize(disc):
        if p != 3 and e >= 2 and splitting_type(fld, p) is SplittingType.TOTALLY_RAMIFIED:
            f *= p
    return f


def decompose_disc(fld, f_F: int | None = None) -> tuple[int, int, int]:
    """(d_F, f_F, three_power) with disc = three_power * d_F * f_F^2."""
    disc = _disc_of(fld)
    f = conductor_f(fld) if f_F is None else f_F
    q, r = divmod(disc, f * f)
    if r:
        raise ConsistencyError(f"f_F^2 = {f * f} does not divide disc {disc}")
    hits = [(q // pw, pw) for pw in (1, 9, 81) if q % pw == 0 and is_fundamental_discriminant(q // pw)]
    if len(hits) != 1:
        raise ConsistencyError(f"disc {disc} has {len(hits)} decompositions with f_F = {f}")
    d_F, pw = hits[0]
    return d_F, f, pw


def e_invariant(fld, d_F: int | None = None, f_F: int | None = None) -> int:
    if d_F is None or f_F is None:
        d_F, f_F, _ = decompose_disc(fld)
    e = 0
    for p, _ in factorize(f_F) if f_F > 1 else ():
        if p == 2:
            continue
        chi = kronecker(d_F, p)
        if (chi == 1) != (p % 3 == 1):
            raise ConsistencyError(f"(d_F/p) = {chi} for d_F = {d_F}, p = {p}")
        e += chi == 1
    if three_totally_ramified(fld) and d_F % 3 == 1:
        e += 1
    return e


def _is_square_disc(disc: int) -> bool:
    if disc <= 0:
        return False
    from math import isqrt

    return isqrt(disc) ** 2 == disc


def genus_exponent(fld) -> int:
    e = e_invariant(fld)
    if _is_square_disc(_disc_of(fld)):
        if e == 0:
            raise ConsistencyError("cyclic field with e_F = 0")
        return e - 1
    return e


def genus_number(fld) -> int:
    return 3 ** genus_exponent(fld)


def in_T31(fld) -> bool:
    """3 totally ramified with disc_3 = 3^4 and unit part 1 mod 3."""
    disc = _disc_of(fld)
    return valuation(disc, 3) == 4 and (disc // 81) % 3 == 1


def field_from_form(form) -> CubicField:
    """Assemble a :class:`CubicField` from a maximal irreducible form."""
    form = _form_of(form)
    disc = form_disc(form)
    d_F, f_F, tp = decompose_disc(form)
    e = e_invariant(form, d_F, f_F)
    cyc = _is_square_disc(disc)
    if cyc and e == 0:
        raise ConsistencyError("cyclic field with e_F = 0")
    return CubicField(
        disc=disc,
        signature=Signature.of_disc(disc),
        form=form,
        is_cyclic=cyc,
        f_F=f_F,
        d_F=d_F,
        three_power=tp,
        e_F=e,
        genus_exponent=e - 1 if cyc else e,
    )


# ---------------------------------------------------------------------------
# local specifications


class LocalKind(str, enum.Enum):
    ALL = "all"
    TOTRAM = "totram"
    T31 = "t31"
    NOT_T31 = "not_t31"
    SUBSET = "subset"


@dataclass(frozen=True)
class LocalCondition:
    kind: LocalKind
    types: frozenset = frozenset()

    @classmethod
    def parse(cls, value, p: int) -> "LocalCondition":
        if isinstance(value, LocalCondition):
            cond = value
        elif isinstance(value, str):
            try:
                kind = LocalKind(value.strip().lower())
            except ValueError:
                raise DomainError(f"unknown local condition {value!r} at p = {p}") from None
            if kind is LocalKind.SUBSET:
                raise DomainError("subset conditions are given as a list of splitting types")
            cond = cls(kind)
        else:
            types = frozenset(SplittingType.parse(t) for t in value)
            if not types <= NOT_TOTRAM:
                raise DomainError(f"subset at p = {p} must avoid the totally ramified type")
            cond = cls(LocalKind.SUBSET, types)
        if p == 3 and cond.kind is LocalKind.SUBSET:
            raise UnsupportedSpecError("splitting-type subsets are not supported at p = 3")
        if p != 3 and cond.kind in (LocalKind.T31, LocalKind.NOT_T31):
            raise DomainError(f"{cond.kind.value} is only meaningful at p = 3")
        return cond

    @property
    def is_ordinary(self) -> bool:
        return self.kind is LocalKind.ALL or (self.kind is LocalKind.SUBSET and self.types == NOT_TOTRAM)

    def to_json(self):
        if self.kind is LocalKind.SUBSET:
            order = [t for t in SplittingType if t in self.types]
            return [t.value for t in order]
        return self.kind.value


@dataclass(frozen=True)
class LocalSpecification:
    """Sigma: a signature at infinity and finitely many non-trivial local
    conditions. Unlisted primes carry the full set."""

    infinity: Signature
    primes: Mapping[int, LocalCondition] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for p, cond in dict(self.primes).items():
            p = int(p)
            if not is_probable_prime(p):
                raise DomainError(f"{p} is not prime")
            cond = LocalCondition.parse(cond, p)
            if cond.kind is not LocalKind.ALL:
                clean[p] = cond
        object.__setattr__(self, "infinity", Signature.parse(self.infinity))
        object.__setattr__(self, "primes", dict(sorted(clean.items())))

    @classmethod
    def ordinary(cls, signature) -> "LocalSpecification":
        return cls(Signature.parse(signature), {})

    def condition(self, p: int) -> LocalCondition:
        return self.primes.get(p, LocalCondition(LocalKind.ALL))

    @classmethod
    def from_json(cls, data) -> "LocalSpecification":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        if not isinstance(data, dict) or "infinity" not in data:
            raise DomainError("specification JSON needs an 'infinity' entry")
        extra = set(data) - {"infinity", "primes"}
        if extra:
            raise DomainError(f"unexpected keys {sorted(extra)}")
        primes = {}
        for key, val in (data.get("primes") or {}).items():
            try:
                p = int(key)
            except ValueError:
                raise DomainError(f"prime key {key!r} is not an integer") from None
            primes[p] = LocalCondition.parse(val, p)
        return cls(Signature.parse(data["infinity"]), primes)

    def to_json(self) -> dict:
        return {
            "infinity": self.infinity.value,
            "primes": {str(p): c.to_json() for p, c in self.primes.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class SpecSummary:
    c: int
    l: int
    t: int
    excluded: frozenset  # primes p != 3 outside the set P (Sigma_p != All)

    def in_P(self, p: int) -> bool:
        return p != 3 and p not in self.excluded


def spec_summary(spec: LocalSpecification) -> SpecSummary:
    c, t = 1, 1
    excluded = set()
    for p, cond in spec.primes.items():
        if p == 3:
            continue
        excluded.add(p)
        if cond.kind is LocalKind.TOTRAM:
            t *= p
        elif not cond.is_ordinary:
            c *= p
    l = sum(1 for p, cond in spec.primes.items() if cond.kind is LocalKind.TOTRAM and p % 3 == 1)
    if l != (psi(t) if t > 1 else 0):
        raise ConsistencyError("l differs from psi(t)")
    return SpecSummary(c=c, l=l, t=t, excluded=frozenset(excluded))


def satisfies(fld, spec: LocalSpecification) -> bool:
    disc = _disc_of(fld)
    if Signature.of_disc(disc) is not spec.infinity:
        return False
    for p, cond in spec.primes.items():
        if p == 3:
            if cond.kind is LocalKind.TOTRAM:
                ok = three_totally_ramified(fld)
            elif cond.kind is LocalKind.T31:
                ok = in_T31(fld)
            elif cond.kind is LocalKind.NOT_T31:
                ok = not in_T31(fld)
            else:
                raise UnsupportedSpecError(f"condition {cond.kind.value} at p = 3")
            if not ok:
                return False
            continue
        st = splitting_type(fld, p)
        if cond.kind is LocalKind.TOTRAM:
            if st is not SplittingType.TOTALLY_RAMIFIED:
                return False
        elif st not in cond.types:
            return False
    return True
