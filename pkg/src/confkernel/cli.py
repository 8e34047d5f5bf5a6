"""Command-line front end: checks, solvers, catalog listing, report rendering."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from itertools import product

from . import catalog, maps, modules
from .biderivations import check_lemma51, is_biderivation
from .catalog import SchemaError, UnknownKeyError
from .lcsa import Parity, check_axioms
from .parse import ParseError
from .report import SCHEMA_VERSION, make_record, render_json, render_text
from .solver import SolverError, SymbolicParameterError, solve_biderivations, solve_derivations, solve_keyeq
from .textformat import FormatError, read_text

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

INPUT_ERRORS = (FormatError, ParseError, SchemaError, UnknownKeyError, SymbolicParameterError, SolverError,
                maps.ShapeError, maps.ParityMismatchError, OSError, json.JSONDecodeError)


class UsageError(ValueError):
    pass


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def parse_params(pairs, extra: dict | None = None) -> dict:
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise UsageError(f"expected NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    for k, v in (extra or {}).items():
        if v is not None:
            out[k] = v
    return out


def _algebra_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--algebra", required=required, help="catalog key of the algebra")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="algebra parameter (rational as p/q); repeatable")
    for name in ("alpha", "beta", "gamma", "tau"):
        p.add_argument(f"--{name}", help=f"shorthand for --param {name}=VALUE")


def _algebra_params(args) -> dict:
    return parse_params(args.param, {k: getattr(args, k, None) for k in ("alpha", "beta", "gamma", "tau")})


def _bounds(args) -> tuple:
    bd = args.bound_del if args.bound_del is not None else args.bound
    bl = args.bound_lam if args.bound_lam is not None else args.bound
    return bd, bl


def _str_params(params: dict) -> dict:
    return {k: str(v) for k, v in sorted(params.items())}


def _matrix_strings(alg, matrix) -> dict:
    out = {}
    for i, j in product(range(alg.n), repeat=2):
        c = matrix[i][j]
        if not c.is_zero():
            out[f"{alg.gens[i]}->{alg.gens[j]}"] = str(c)
    return out


def _bimap_strings(alg, phi) -> dict:
    out = {}
    for a, b, c in product(range(alg.n), repeat=3):
        p = phi.F[a][b][c]
        if not p.is_zero():
            out[f"({alg.gens[a]},{alg.gens[b]})->{alg.gens[c]}"] = str(p)
    return out


# ---- check ----------------------------------------------------------------------

def _load_algebra(args):
    if args.builtin and args.file:
        raise UsageError("give either --builtin or --file")
    if args.builtin:
        params = parse_params(args.param)
        alg = catalog.build(args.builtin, params, symbolic=args.symbolic)
        return alg, {"builtin": args.builtin, "params": _str_params(params), "digest": digest(catalog.dumps(alg))}
    if args.file:
        text = read_text(args.file)
        return catalog.loads(text), {"file": args.file, "digest": digest(text)}
    raise UsageError("need --builtin or --file")


def _target_algebra(args):
    if not args.algebra:
        raise UsageError("--algebra is required")
    params = parse_params(args.param)
    return catalog.build(args.algebra, params, symbolic=args.symbolic), params


def cmd_check(args) -> tuple:
    what = args.target
    if what == "algebra":
        alg, inp = _load_algebra(args)
        reports = check_axioms(alg)
    elif what == "map":
        if not args.file:
            raise UsageError("check map needs --file")
        alg, params = _target_algebra(args)
        text = read_text(args.file)
        inp = {"file": args.file, "algebra": args.algebra, "params": _str_params(params), "digest": digest(text)}
        kind = args.kind or "derivation"
        if kind == "derivation":
            reports = [maps.is_derivation(alg, maps.loads_map(text, alg))]
        elif kind == "homomorphism":
            reports = [maps.is_homomorphism(maps.loads_endo(text, alg), alg)]
        elif kind == "automorphism":
            reports = [maps.is_automorphism(maps.loads_endo(text, alg), alg)]
        else:
            raise UsageError(f"unknown map kind {kind!r}")
    elif what == "bimap":
        if not args.file:
            raise UsageError("check bimap needs --file")
        alg, params = _target_algebra(args)
        text = read_text(args.file)
        inp = {"file": args.file, "algebra": args.algebra, "params": _str_params(params), "digest": digest(text)}
        from .biderivations import loads_bimap

        phi = loads_bimap(text, alg)
        reports = [is_biderivation(alg, phi)]
        if args.kind == "consequence":
            reports.append(check_lemma51(alg, phi))
    elif what == "module":
        if args.builtin and args.file:
            raise UsageError("give either --builtin or --file")
        if args.builtin:
            params = parse_params(args.param)
            M = modules.build_module(args.builtin, params, symbolic=args.symbolic)
            inp = {"builtin": args.builtin, "params": _str_params(params), "digest": digest(modules.dumps_module(M))}
        elif args.file:
            text = read_text(args.file)
            M = modules.loads_module(text)
            inp = {"file": args.file, "digest": digest(text)}
        else:
            raise UsageError("need --builtin or --file")
        reports = [modules.is_module(M)]
    else:
        raise UsageError(f"unknown check target {what!r}")
    results = [r.to_dict() for r in reports]
    record = make_record(["check", what], results, {"input": inp})
    return record, EXIT_OK if record["passed"] else EXIT_FAIL


# ---- solve ----------------------------------------------------------------------

def _numeric_algebra(args):
    params = _algebra_params(args)
    alg = catalog.build(args.algebra, params)
    if alg.is_symbolic():
        raise SymbolicParameterError(
            f"{args.algebra} needs values for {', '.join(alg.ring.params)}; pass them with --param NAME=VALUE")
    return alg, params


def cmd_solve(args) -> tuple:
    kind = args.kind
    results = []
    extra: dict = {}
    if kind == "derivations":
        alg, params = _numeric_algebra(args)
        bd, bl = _bounds(args)
        parities = ["even", "odd"] if args.parity == "both" else [args.parity]
        for par in parities:
            res = solve_derivations(alg, par, bd, bl, stability=not args.no_stability)
            names = list(res.basis.unknowns)
            results.append({
                "kind": "derivations", "parity": par, "dim": res.dim, "inner_dim": res.inner_dim,
                "outer_dim": res.outer_dim, "stable": res.stable, "outer_dim_next": res.outer_dim_next,
                "basis": [{k: str(v[k]) for k in names if not v[k].is_zero()} for v in res.basis.vectors],
                "outer": [_matrix_strings(alg, m.matrix) for m in res.outer],
                "passed": True,
            })
        extra = {"algebra": args.algebra, "params": _str_params(params), "bounds": {"del": bd, "lam": bl}}
    elif kind == "biderivations":
        alg, params = _numeric_algebra(args)
        bd, bl = _bounds(args)
        res = solve_biderivations(alg, bd, bl, stability=not args.no_stability)
        basis = []
        for par, (b, names) in res.parts.items():
            from .biderivations import ConformalBiMap

            for vec in b.vectors:
                phi = ConformalBiMap.from_assignment(alg, par, names, vec)
                basis.append({"parity": Parity(par).word, "values": _bimap_strings(alg, phi)})
        results.append({
            "kind": "biderivations", "dim": res.dim, "inner_dim": res.inner_dim, "outer_dim": res.outer_dim,
            "dims_by_parity": {Parity(p).word: b.dimension for p, (b, _) in res.parts.items()},
            "stable": res.stable, "basis": basis,
            "outer": [{"parity": m.parity.word, "values": _bimap_strings(alg, m)} for m in res.outer],
            "passed": True,
        })
        extra = {"algebra": args.algebra, "params": _str_params(params), "bounds": {"del": bd, "lam": bl}}
    elif kind == "keyeq":
        a, b, c = (Fraction(x) for x in (args.a, args.b, args.c))
        basis = solve_keyeq(a, b, c, args.bound)
        results.append({"kind": "keyeq", "dim": basis.dimension,
                        "basis": [str(v["f"]) for v in basis.vectors], "passed": True})
        extra = {"params": {"a": str(a), "b": str(b), "c": str(c)}, "bounds": {"total": args.bound}}
    elif kind == "modules":
        alg, params = _numeric_algebra(args)
        w = {k: Fraction(getattr(args, k)) for k in ("delta0", "delta1", "a", "b")}
        res = modules.discover_rank11(alg, w["delta0"], w["delta1"], w["a"], w["b"], args.bound)
        results.append({"kind": "modules", "dim": res.dimension, "h0": [str(h) for h in res.h0()],
                        "notes": res.notes, "passed": True})
        extra = {"algebra": args.algebra, "params": _str_params(params),
                 "weights": {k: str(v) for k, v in w.items()}, "bounds": {"del": args.bound, "lam": args.bound}}
    else:
        raise UsageError(f"unknown solve kind {kind!r}")
    return make_record(["solve", kind], results, extra), EXIT_OK


# ---- catalog / report ----------------------------------------------------------------

def cmd_catalog(args) -> tuple:
    algs = []
    for k in catalog.keys():
        e = catalog.entry(k)
        algs.append({"key": k, "params": [p.name + ("!=0" if p.nonzero else "") for p in e.params],
                     "description": e.description})
    mods = []
    for k in modules.module_keys():
        f = modules.module_family(k)
        mods.append({"key": k, "over": f.algebra_key, "params": [p.name for p in f.params],
                     "description": f.description})
    return make_record(["catalog", "list"], [], {"algebras": algs, "modules": mods}), EXIT_OK


def cmd_report(args) -> tuple:
    record = json.loads(read_text(args.file))
    if not isinstance(record, dict) or record.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"not a schema {SCHEMA_VERSION} report record")
    return record, EXIT_OK


# ---- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="confkernel", description="Exact checks and solvers for Lie conformal superalgebras")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")
    fmt.add_argument("--output", help="also write the JSON record to this file")
    sub = ap.add_subparsers(dest="command", required=True)

    chk = sub.add_parser("check", parents=[fmt], help="check axioms of an algebra, map, bimap or module")
    chk.add_argument("target", choices=("algebra", "map", "bimap", "module"))
    chk.add_argument("--builtin")
    chk.add_argument("--file")
    chk.add_argument("--algebra", help="algebra key for map/bimap checks")
    chk.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    chk.add_argument("--symbolic", action="store_true", help="keep parameters without given values symbolic")
    chk.add_argument("--kind", help="map: derivation|homomorphism|automorphism; bimap: biderivation|consequence")

    sol = sub.add_parser("solve", help="run a bounded-degree solver")
    ssub = sol.add_subparsers(dest="kind", required=True)
    for name in ("derivations", "biderivations"):
        p = ssub.add_parser(name, parents=[fmt])
        _algebra_flags(p)
        p.add_argument("--bound", type=int, default=3)
        p.add_argument("--bound-del", type=int)
        p.add_argument("--bound-lam", type=int)
        p.add_argument("--no-stability", action="store_true", help="skip the re-run at bound_lam + 1")
        if name == "derivations":
            p.add_argument("--parity", choices=("even", "odd", "both"), default="both")
    p = ssub.add_parser("keyeq", parents=[fmt])
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--bound", type=int, default=4)
    p = ssub.add_parser("modules", parents=[fmt])
    _algebra_flags(p)
    p.add_argument("--delta0", required=True)
    p.add_argument("--delta1", required=True)
    p.add_argument("--a", default="0")
    p.add_argument("--b", default="0")
    p.add_argument("--bound", type=int, default=3)

    cat = sub.add_parser("catalog", parents=[fmt], help="list built-in algebras and module families")
    cat.add_argument("action", choices=("list",))

    rep = sub.add_parser("report", help="re-render a saved JSON report")
    rep.add_argument("file")
    rep.add_argument("--format", choices=("text", "json"), default="text")
    rep.set_defaults(output=None)
    return ap


HANDLERS = {"check": cmd_check, "solve": cmd_solve, "catalog": cmd_catalog, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        record, code = HANDLERS[args.command](args)
    except (UsageError, ValueError, KeyError) + INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    out = render_json(record) if args.format == "json" else render_text(record)
    sys.stdout.write(out)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(render_json(record))
    print(f"elapsed {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
