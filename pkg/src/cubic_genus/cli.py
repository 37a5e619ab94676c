"""Command-line front end: ``cubic-genus <command> ...``.

Exit codes: 0 success, 2 usage or configuration error, 3 a verification
check failed, 4 resource limit or overflow.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import __version__
from .errors import (
    ConsistencyError,
    CubicGenusError,
    DomainError,
    MassTableIncomplete,
    ResourceError,
    UnsupportedSpecError,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_RESOURCE = 4


class UsageError(Exception):
    pass


def parse_x(text) -> int:
    """Parse a bound such as ``100000``, ``1e6`` or ``2.5e5`` into an integer."""
    try:
        d = Decimal(str(text).strip().replace("_", ""))
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if d != d.to_integral_value() or d < 1:
        raise argparse.ArgumentTypeError(f"X must be a positive integer, got {text!r}")
    return int(d)


def parse_z_list(text: str) -> list:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        v = complex(part.replace("i", "j"))
        if v.imag == 0:
            r = v.real
            out.append(int(r) if float(r).is_integer() else r)
        else:
            out.append(v)
    return out


def parse_k_range(text: str) -> list[int]:
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
    else:
        lo_i, hi_i = 0, int(text)
    if lo_i < 0 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}")
    return list(range(lo_i, hi_i + 1))


def load_spec(text: str | None, signature: str | None):
    from .local_invariants import LocalSpecification

    if text is None:
        return LocalSpecification.ordinary(signature or "totally_real")
    candidate = Path(text)
    raw = candidate.read_text() if not text.lstrip().startswith("{") and candidate.exists() else text
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DomainError(f"specification is neither a JSON object nor a readable file: {exc}") from None
    spec = LocalSpecification.from_json(data)
    if signature is not None and spec.infinity.value != _signature_value(signature):
        raise DomainError("--signature disagrees with the specification's 'infinity' entry")
    return spec


def _signature_value(s: str) -> str:
    from .cubic_enum import Signature

    return Signature.parse(s).value


@dataclass
class RunConfig:
    subcommand: str
    X_max: int | None = None
    signature: str | None = None
    spec: dict | None = None
    z_list: list = field(default_factory=list)
    k_range: list = field(default_factory=list)
    checkpoints: int | None = None
    out: str | None = None
    fmt: str = "csv"
    threads: int | None = None
    precision: int | None = None
    skip_oracle: bool = False
    seed: int = 0
    dump: str | None = None

    def canonical(self) -> str:
        d = asdict(self)
        d["z_list"] = [str(z) for z in self.z_list]
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_canonical(cls, text: str) -> "RunConfig":
        d = json.loads(text)
        d["z_list"] = parse_z_list(",".join(d.get("z_list", [])))
        return cls(**d)


# ---------------------------------------------------------------------------


def _both(sig: str | None):
    from .cubic_enum import Signature

    if sig in (None, "both"):
        return [Signature.TOTALLY_REAL, Signature.COMPLEX]
    return [Signature.parse(sig)]


def cmd_enumerate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .cubic_enum import enumerate_table, write_dump

    if cfg.X_max is None:
        raise UsageError("enumerate needs --x")
    sigs = _both(cfg.signature)
    table = enumerate_table(cfg.X_max, None if len(sigs) == 2 else sigs[0], cfg.threads)
    if cfg.out:
        write_dump(table, cfg.out)
    for s in sigs:
        print(f"{s.value}: {len(table.with_signature(s))}", file=out)
    return EXIT_OK


def cmd_constants(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .checks import spec_constant_checks
    from .constants import coefficients as C
    from .constants.precision import target_digits
    from .local_invariants import LocalSpecification

    spec = LocalSpecification.from_json(cfg.spec)
    digits = max(30, target_digits())
    entries = []
    if not spec.primes:
        entries += C.alpha_beta_pm(spec.infinity).entries(digits)
        for k in cfg.k_range:
            entries += C.alpha_beta_k_pm(spec.infinity, k).entries(digits)
    for k in cfg.k_range:
        entries += C.alpha_beta_sigma_k(spec, k).entries(digits)
    for z in cfg.z_list:
        entries += C.alpha_beta_sigma_z(spec, z).entries(digits)
    entries += C.density_constants(spec).entries(digits)
    checks = spec_constant_checks(spec)
    doc = {
        "spec": spec.to_json(),
        "digits": digits,
        "constants": entries,
        "checks": [{"name": c.name, "passed": c.passed, "measured": c.measured, "threshold": c.threshold} for c in checks],
    }
    text = json.dumps(doc, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def _load_table(cfg: RunConfig, signature=None):
    from .cubic_enum import enumerate_table, read_dump

    if cfg.dump:
        table = read_dump(cfg.dump)
        if cfg.X_max is not None and cfg.X_max < table.X:
            table = table.below(cfg.X_max)
        return table
    if cfg.X_max is None:
        raise UsageError("--x or --dump is required")
    return enumerate_table(cfg.X_max, signature, cfg.threads)


def cmd_census(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .census import census_from_table, coefficient_key, default_checkpoints, export, residual_report
    from .constants import coefficients as C
    from .errors import MassTableIncomplete as _MTI
    from .local_invariants import LocalSpecification

    spec = LocalSpecification.from_json(cfg.spec)
    table = _load_table(cfg, spec.infinity).with_signature(spec.infinity)
    cps = default_checkpoints(table.X, cfg.checkpoints or 20)
    zs = [z for z in cfg.z_list if not isinstance(z, complex)] or [0, 1, 2]
    census = census_from_table(table, spec, cps, zs)
    coeffs = {}
    try:
        coeffs[coefficient_key("all")] = C.alpha_beta_sigma_z(spec, 0)
        for k in range(census.kmax + 1):
            coeffs[coefficient_key("k", k)] = C.alpha_beta_sigma_k(spec, k)
        for z in zs:
            coeffs[coefficient_key("z", z)] = C.alpha_beta_sigma_z(spec, z)
    except _MTI as exc:
        print(f"note: {exc}; residuals omitted", file=sys.stderr)
        coeffs = {}
    report = residual_report(census, coeffs) if coeffs else None
    text = export(census, report, cfg.fmt, cfg.out, coeffs)
    if not cfg.out:
        out.write(text)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .oracle import brute_force_oracle

    if cfg.X_max is None:
        raise UsageError("oracle needs --x")
    pairs = brute_force_oracle(cfg.X_max)
    for s in _both(cfg.signature):
        print(f"{s.value}: {sum(1 for _, v in pairs if v == s.value)}", file=out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from . import checks
    from .cubic_enum import Signature
    from .local_invariants import LocalSpecification
    from .oracle import ORACLE_MAX_X

    X = cfg.X_max if cfg.X_max is not None else (None if cfg.dump else 10**5)
    cfg.X_max = X
    table = _load_table(cfg)
    X = table.X
    results = [checks.dump_consistency_check(table), checks.sampled_field_check(table, cfg.seed)]
    if not cfg.skip_oracle:
        if X > ORACLE_MAX_X:
            raise UsageError(f"the oracle is limited to X <= {ORACLE_MAX_X}; pass --skip-oracle")
        results.append(checks.oracle_check(X, table))
    for s in (Signature.TOTALLY_REAL, Signature.COMPLEX):
        results += checks.census_identity_checks(table, LocalSpecification.ordinary(s), X)
    results += checks.genus_spot_checks()
    results.append(checks.cyclic_count_check(table, X))
    if X >= 10**5:
        for s in ("+", "-"):
            results += checks.residual_checks(table, s, X)
    for r in results:
        print(r.line(), file=out)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed} passed, {failed} failed", file=out)
    return EXIT_OK if failed == 0 else EXIT_VERIFY


COMMANDS = {
    "enumerate": cmd_enumerate,
    "constants": cmd_constants,
    "census": cmd_census,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubic-genus", description="Cubic fields by discriminant and genus number.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, need_x=False):
        sp.add_argument("--x", type=parse_x, required=need_x, help="discriminant bound, e.g. 1e6")
        sp.add_argument("--signature", choices=["totally_real", "complex", "both", "+", "-"], default=None)
        sp.add_argument("--threads", type=int, default=None)

    e = sub.add_parser("enumerate", help="enumerate fields and write a CGC1 dump")
    common(e, need_x=True)
    e.add_argument("--out", help="dump file")

    c = sub.add_parser("constants", help="print coefficient families as JSON")
    c.add_argument("--signature", choices=["totally_real", "complex", "+", "-"], default=None)
    c.add_argument("--spec", help="specification as inline JSON or a path")
    c.add_argument("--k-range", type=parse_k_range, default=parse_k_range("0..5"))
    c.add_argument("--z", type=parse_z_list, default=parse_z_list("0,1,2"))
    c.add_argument("--out")

    s = sub.add_parser("census", help="tally fields by genus number at checkpoints")
    common(s)
    s.add_argument("--spec")
    s.add_argument("--z", type=parse_z_list, default=parse_z_list("0,1,2"))
    s.add_argument("--checkpoints", type=int, default=20, help="number of geometric checkpoints")
    s.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
    s.add_argument("--dump", help="read fields from a CGC1 dump instead of enumerating")
    s.add_argument("--out")

    v = sub.add_parser("verify", help="run oracle, identity and residual checks")
    common(v)
    v.add_argument("--skip-oracle", action="store_true")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--dump")

    o = sub.add_parser("oracle", help="count fields with the independent polynomial search")
    common(o, need_x=True)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    import os

    cmd = ns.subcommand
    sig = getattr(ns, "signature", None)
    sig = {"+": "totally_real", "-": "complex"}.get(sig, sig)
    spec = None
    if cmd in ("constants", "census"):
        if sig == "both":
            raise UsageError(f"{cmd} works on one signature at a time")
        spec = load_spec(getattr(ns, "spec", None), sig).to_json()
    env = os.environ.get("CGC_PRECISION")
    return RunConfig(
        subcommand=cmd,
        X_max=getattr(ns, "x", None),
        signature=sig,
        spec=spec,
        z_list=list(getattr(ns, "z", []) or []),
        k_range=list(getattr(ns, "k_range", []) or []),
        checkpoints=getattr(ns, "checkpoints", None),
        out=getattr(ns, "out", None),
        fmt=getattr(ns, "fmt", "csv"),
        threads=getattr(ns, "threads", None),
        precision=int(env) if env and env.isdigit() else None,
        skip_oracle=getattr(ns, "skip_oracle", False),
        seed=getattr(ns, "seed", 0),
        dump=getattr(ns, "dump", None),
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = config_from_args(ns)
        if cfg.threads is not None and cfg.threads < 1:
            raise UsageError("--threads must be at least 1")
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MassTableIncomplete as exc:
        print(f"mass table incomplete: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, UnsupportedSpecError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConsistencyError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CubicGenusError as exc:  # pragma: no cover - remaining library errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
