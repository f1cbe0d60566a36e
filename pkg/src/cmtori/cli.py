"""Command-line interface.  Every subcommand prints one JSON document."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from mpmath import nstr

from . import arith, classical, localinv, reciprocity
from .cmgroup import (
    DEFAULT_CLOSURE_CAP,
    MAX_COCYCLE_DEGREE,
    CMGaloisGroup,
    CMType,
    closure,
    cocycle_splitting,
    dodson_decompose,
    normalize_cm_type,
    parse_group,
    validate_cm,
)
from .errors import CmToriError, DomainError, ResourceError
from .exactalg import IntegerMatrix, InvariantFactors

SCHEMA_VERSION = 1
EXIT_OK, EXIT_DOMAIN, EXIT_RESOURCE, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65
PRECISION_ENV = "CMTORI_PRECISION"
CONFIG_ENV = "CMTORI_CONFIG"
DEFAULT_CONFIG_PATH = Path("~/.config/cmtori/config.json")

LAMBDA_NOTE = (
    "lambda(s) is the exact minimum of weight(n)/(n-1) over 2 <= n <= psi(s). "
    "For s = 6, 7 this gives 6/29 (at n = 30), smaller than the value 1/5 "
    "sometimes quoted; the computed minimum is reported."
)


class InputError(CmToriError):
    """Malformed or structurally invalid JSON input."""


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    precision_digits: int = 50
    closure_cap: int = DEFAULT_CLOSURE_CAP
    h2_order_cap: int = localinv.H2_ORDER_CAP
    alpha_overrides: dict[int, int] = field(default_factory=dict)
    alpha_literature: list[int] = field(default_factory=list)
    output: str = "pretty"

    def __post_init__(self) -> None:
        if self.precision_digits < 30:
            raise DomainError("precision_digits must be at least 30")
        if self.closure_cap < 1 or self.h2_order_cap < 1:
            raise DomainError("caps must be positive")
        if self.output not in ("pretty", "json"):
            raise DomainError(f"output must be 'pretty' or 'json', not {self.output!r}")

    def alpha_table(self) -> arith.AlphaTable:
        return arith.AlphaTable(dict(self.alpha_overrides), frozenset(self.alpha_literature))

    @classmethod
    def from_mapping(cls, data: dict) -> RunConfig:
        known = {"precision_digits", "closure_cap", "h2_order_cap",
                 "alpha_overrides", "alpha_literature", "output"}
        extra = set(data) - known
        if extra:
            raise InputError(f"unknown config keys: {sorted(extra)}")
        kw = dict(data)
        if "alpha_overrides" in kw:
            kw["alpha_overrides"] = {int(k): int(v) for k, v in kw["alpha_overrides"].items()}
        return cls(**kw)


def _load_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc.msg} at line {exc.lineno}, column {exc.colno}") from None


def _field(doc: Any, key: str, kind: type) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"missing key {key!r}")
    val = doc[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise InputError(f"{key!r} must be an integer")
    if kind is list and not isinstance(val, list):
        raise InputError(f"{key!r} must be an array")
    return val


def _int_rows(val: Any, what: str) -> list[list[int]]:
    if not isinstance(val, list) or not all(
        isinstance(r, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in r)
        for r in val
    ):
        raise InputError(f"{what} must be an array of integer arrays")
    return val


def _read_group(doc: Any, cfg: RunConfig) -> tuple[CMGaloisGroup, CMType]:
    g = _field(doc, "g", int)
    gens = _int_rows(_field(doc, "generators", list), "generators")
    group = parse_group(g, gens, cfg.closure_cap)
    sigma = doc.get("sigma")
    cmtype = CMType.standard(g) if sigma is None else CMType(g, frozenset(_int_rows([sigma], "sigma")[0]))
    return group, cmtype


def _read_matrices(doc: Any, dim: int, what: str) -> list[IntegerMatrix]:
    out = []
    for flat in _int_rows(_field(doc, "generators", list), what):
        if len(flat) != dim * dim:
            raise InputError(f"{what}: expected {dim * dim} entries per matrix, got {len(flat)}")
        out.append(IntegerMatrix(dim, dim, tuple(flat)))
    return out


def _read_action(doc: Any) -> localinv.LatticeAction:
    dim = _field(doc, "dim", int)
    if dim < 1:
        raise DomainError("dim must be positive")
    return localinv.LatticeAction.generate(_read_matrices(doc, dim, "generators"), dim)


def _factors(inv: InvariantFactors) -> list[int]:
    return list(inv.factors)


def _generators_of(group: CMGaloisGroup) -> list[list[int]]:
    gens: list = []
    span = {group.elements[0].identity(group.g)}
    for x in group.elements:
        if x not in span:
            gens.append(x)
            span = set(closure(gens, group.g).elements)
    return [list(x.image) for x in gens]


def _datum_json(group: CMGaloisGroup, cmtype: CMType) -> dict:
    doc = reciprocity.analyze(group, cmtype).to_json()
    doc["generators"] = _generators_of(group)
    return doc


def _datum_worker(args: tuple[int, list[list[int]]]) -> dict:
    g, elems = args
    from .cmgroup import SignedPermutation
    group = CMGaloisGroup.from_elements(g, (SignedPermutation(tuple(e)) for e in elems))
    return _datum_json(group, CMType.standard(g))


# subcommand handlers: (args, cfg) -> JSON-ready dict

def cmd_lambda(args, cfg: RunConfig) -> dict:
    table = cfg.alpha_table()
    rows = []
    for s in range(1, args.max_s + 1):
        lc = arith.lambda_constant(s)
        a = table(s)
        rows.append({
            "s": s,
            "psi": lc.psi,
            "lambda": str(lc.value),
            "argmin": lc.argmin,
            "alpha": a,
            "c": {"primes": arith.primes_upto(s + 1), "exponent": -a * a},
        })
    return {"table": rows, "note": LAMBDA_NOTE}


def cmd_weight(args, cfg: RunConfig) -> dict:
    w = arith.weight(args.n)
    return {"n": w.n, "totient_sum": w.totient_sum, "epsilon": w.epsilon, "weight": w.weight}


def cmd_psi(args, cfg: RunConfig) -> dict:
    return {"s": args.s, "psi": arith.psi(args.s)}


def cmd_cm_validate(args, cfg: RunConfig) -> dict:
    group, cmtype = _read_group(_load_json(args.file), cfg)
    rep = validate_cm(group)
    doc: dict = {"g": group.g, "order": group.order, "valid": rep.ok, "failure": rep.failure}
    if rep.ok:
        ngroup, _ = normalize_cm_type(group, cmtype)
        data = dodson_decompose(ngroup)
        searched = group.g <= MAX_COCYCLE_DEGREE
        split = cocycle_splitting(ngroup, data) if searched else None
        doc.update({
            "v": data.v,
            "g0_order": len(data.g0_elements),
            "cocycle_trivial": (split is not None) if searched else None,
            "splitting_vector": list(split) if split is not None else None,
        })
    return doc


def cmd_cm_analyze(args, cfg: RunConfig) -> dict:
    group, cmtype = _read_group(_load_json(args.file), cfg)
    return reciprocity.analyze(group, cmtype).to_json()


def cmd_cm_enumerate(args, cfg: RunConfig) -> dict:
    data = reciprocity.enumerate_cm_data(args.g)
    jobs = [(args.g, [list(x.image) for x in grp.elements]) for grp, _ in data]
    if cfg_jobs(args) > 1:
        with ProcessPoolExecutor(max_workers=cfg_jobs(args)) as pool:
            out = list(pool.map(_datum_worker, jobs))
    else:
        out = [_datum_worker(j) for j in jobs]
    # every transitive subgroup containing rho, not only realized Galois groups
    return {"g": args.g, "universe": "combinatorial", "count": len(out), "data": out}


def cfg_jobs(args) -> int:
    return max(1, getattr(args, "jobs", 1) or 1)


def cmd_reciprocity_family(args, cfg: RunConfig) -> dict:
    if args.full_cg is not None:
        name, param = "full_cg", args.full_cg
    elif args.klein_g4:
        name, param = "klein_g4", None
    else:
        name, param = "cyclic_2p", args.cyclic_2p
    group, cmtype = reciprocity.make_family(name, param, cfg.closure_cap)
    doc = reciprocity.kernel_component_group(group, cmtype).to_json()
    doc["family"] = name if param is None else f"{name}({param})"
    return doc


def cmd_reciprocity_kernel(args, cfg: RunConfig) -> dict:
    group, cmtype = _read_group(_load_json(args.file), cfg)
    ngroup, ntype = normalize_cm_type(group, cmtype)
    lat = reciprocity.reciprocity_vectors(ngroup, ntype)
    doc = reciprocity.kernel_component_group(ngroup, ntype).to_json()
    doc["basis"] = list(lat.basis_labels)
    doc["vectors"] = lat.generators.to_rows()
    return doc


def cmd_cohomology(args, cfg: RunConfig) -> dict:
    action = _read_action(_load_json(args.file))
    if args.degree == "h1":
        inv = localinv.h1_general(action, args.method)
    else:
        inv = localinv.h2_general(action, args.method, cfg.h2_order_cap)
    return {"degree": int(args.degree[1]), "order_G": action.order, "dim": action.dim,
            "method": args.method, "invariant_factors": _factors(inv), "group": str(inv)}


def cmd_conductor(args, cfg: RunConfig) -> dict:
    doc = _load_json(args.file)
    dim = _field(doc, "dim", int)
    levels = _field(doc, "levels", list)
    acts = []
    for i, lev in enumerate(levels):
        acts.append(localinv.LatticeAction.generate(_read_matrices(lev, dim, f"level {i}"), dim))
    filt = localinv.RamificationFiltration(tuple(acts))
    val = localinv.artin_conductor(filt)
    return {"dim": dim, "orders": list(filt.orders), "conductor": str(val.value),
            "integral": val.integral}


def cmd_quasidisc(args, cfg: RunConfig) -> dict:
    inputs = localinv.QuasiDiscInputs(args.aT, args.a, args.b, args.c,
                                      tuple(args.component), args.dim)
    qd = localinv.quasi_discriminant(inputs, cfg.precision_digits)
    return {"numerator": qd.numerator, "denominator": qd.denominator,
            "two_pi_power": qd.two_pi_power, "symbolic": qd.symbolic(),
            "value": nstr(qd.value, cfg.precision_digits)}


def cmd_classical_h(args, cfg: RunConfig) -> dict:
    D = classical.FundamentalDiscriminant(args.D)
    return {"D": D.D, "w": classical.unit_count(D),
            "h_dirichlet": classical.class_number_iq(D, cfg.precision_digits),
            "h_forms": classical.reduced_form_count(D)}


def cmd_classical_shyr(args, cfg: RunConfig) -> dict:
    rep = classical.shyr_consistency(args.D, cfg.precision_digits)
    return rep.to_json(cfg.precision_digits)


def cmd_bound(args, cfg: RunConfig) -> dict:
    ob = classical.orbit_bound(args.d, args.DL, args.eps, args.iT, args.index,
                               args.B, args.c, cfg.precision_digits)
    doc = ob.to_json(cfg.precision_digits)
    if ob.vacuous:
        doc["warning"] = "exponent lambda(d)/2 - eps is not positive; the bound is vacuous"
    return doc


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _global_flags(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--config", default=default, help="JSON config file (RunConfig keys)")
    p.add_argument("--output", choices=("pretty", "json"), default=default)
    p.add_argument("--precision", type=int, default=default,
                   help="significant digits for real outputs")
    p.add_argument("--jobs", type=int, default=default if default else 1,
                   help="worker processes for bulk commands")


def _add_parents(sub, common: argparse.ArgumentParser) -> None:
    add = sub.add_parser

    def add_parser(name, **kw):
        kw.setdefault("parents", [common])
        child = add(name, **kw)
        orig = child.add_subparsers

        def add_subparsers(**skw):
            nested = orig(**skw)
            _add_parents(nested, common)
            return nested

        child.add_subparsers = add_subparsers
        return child

    sub.add_parser = add_parser


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted both before and after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    p = _Parser(prog="cmtori", description="Exact invariants of CM tori and reciprocity kernels.")
    _global_flags(p, None)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_parents(sub, common)

    s = sub.add_parser("lambda", help="table of psi(s), lambda(s), alpha(s)")
    s.add_argument("--max-s", type=int, default=7)
    s.set_defaults(func=cmd_lambda)

    s = sub.add_parser("weight", help="weight w(n) of an integer")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_weight)

    s = sub.add_parser("psi", help="minimal n with w(n) = s")
    s.add_argument("s", type=int)
    s.set_defaults(func=cmd_psi)

    cm = sub.add_parser("cm", help="validate, analyze or enumerate CM Galois groups")
    cm = cm.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = cm.add_parser("validate", help="check the CM conditions on a group")
    s.add_argument("file", help="group JSON, or - for stdin")
    s.set_defaults(func=cmd_cm_validate)
    s = cm.add_parser("analyze", help="reflex data and Dodson decomposition")
    s.add_argument("file")
    s.set_defaults(func=cmd_cm_analyze)
    s = cm.add_parser("enumerate", help="all classes for small g")
    s.add_argument("-g", type=int, required=True)
    s.set_defaults(func=cmd_cm_enumerate)

    rec = sub.add_parser("reciprocity", help="reciprocity kernel component group")
    rec = rec.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = rec.add_parser("family", help="built-in example families")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--full-cg", type=int, metavar="G")
    grp.add_argument("--klein-g4", action="store_true")
    grp.add_argument("--cyclic-2p", type=int, metavar="P")
    s.set_defaults(func=cmd_reciprocity_family)
    s = rec.add_parser("kernel", help="kernel report for a group file")
    s.add_argument("file")
    s.set_defaults(func=cmd_reciprocity_kernel)

    coh = sub.add_parser("cohomology", help="H^1 or H^2 of a finite group on a lattice")
    coh = coh.add_subparsers(dest="degree", required=True, parser_class=_Parser)
    for deg in ("h1", "h2"):
        s = coh.add_parser(deg)
        s.add_argument("file", help="action JSON, or - for stdin")
        s.add_argument("--method", choices=("torsion", "explicit"), default="torsion")
        s.set_defaults(func=cmd_cohomology)

    s = sub.add_parser("conductor", help="Artin conductor from a ramification filtration")
    s.add_argument("file", help="filtration JSON, or - for stdin")
    s.set_defaults(func=cmd_conductor)

    s = sub.add_parser("quasidisc", help="quasi-discriminant from its exponents")
    s.add_argument("--aT", type=int, required=True)
    s.add_argument("--a", type=int, default=0)
    s.add_argument("--b", type=int, default=0)
    s.add_argument("--c", type=int, default=0)
    s.add_argument("--component", type=int, action="append", default=[])
    s.add_argument("--dim", type=int)
    s.set_defaults(func=cmd_quasidisc)

    cl = sub.add_parser("classical", help="imaginary quadratic class numbers")
    cl = cl.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in (("h", cmd_classical_h), ("shyr", cmd_classical_shyr)):
        s = cl.add_parser(name)
        s.add_argument("-D", type=int, required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("bound", help="conditional Galois orbit lower bound")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--DL", type=int, required=True)
    s.add_argument("--eps", type=_fraction, required=True)
    s.add_argument("--iT", type=int, default=0)
    s.add_argument("--index", type=int, default=1)
    s.add_argument("--B", default="1")
    s.add_argument("--c", default="1")
    s.set_defaults(func=cmd_bound)
    return p


def load_config(args) -> RunConfig:
    data: dict = {}
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        data = _load_json(path)
    else:
        default = DEFAULT_CONFIG_PATH.expanduser()
        if default.is_file():
            data = _load_json(str(default))
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    cfg = RunConfig.from_mapping(data)
    env = os.environ.get(PRECISION_ENV)
    if env:
        try:
            cfg.precision_digits = int(env)
        except ValueError:
            raise DomainError(f"{PRECISION_ENV} must be an integer") from None
    if args.precision is not None:
        cfg.precision_digits = args.precision
    if args.output is not None:
        cfg.output = args.output
    RunConfig.__post_init__(cfg)
    return cfg


def render(doc: dict, cfg: RunConfig) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    if cfg.output == "json":
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        cfg = load_config(args)
        doc = args.func(args, cfg)
    except InputError as exc:
        print(f"cmtori: input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ResourceError as exc:
        print(f"cmtori: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, CmToriError) as exc:
        print(f"cmtori: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(render(doc, cfg))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
