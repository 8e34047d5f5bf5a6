"""Built-in algebras and the algebra file format."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .lcsa import LcsAlgebra, ParamSpec, Parity, check_parity_closure, make_algebra, sign, skew_residual, standard_ring
from .poly import as_rational
from .textformat import (FormatError, check_ident, format_combination, logical_lines, param_header,
                         parse_combination, read_text, split_assignment, write_text)

SYMBOLIC = "symbolic"

ALIASES = {
    "Δ": "Delta", "α": "alpha", "β": "beta", "γ": "gamma", "τ": "tau",
    "Δ₀": "Delta0", "Δ0": "Delta0", "Δ₁": "Delta1", "Δ1": "Delta1", "η": "eta",
}


class SchemaError(ValueError):
    pass


class UnknownKeyError(KeyError):
    pass


def parse_value(v):
    """Rational from int/Fraction/'p/q'; ``None`` or 'symbolic' stays symbolic."""
    if v is None or (isinstance(v, str) and v.strip().lower() == SYMBOLIC):
        return None
    try:
        return as_rational(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"not a rational value: {v!r}") from exc


def normalize_params(params: Mapping | None) -> dict:
    out = {}
    for k, v in (params or {}).items():
        out[ALIASES.get(k, k)] = v
    return out


@dataclass(frozen=True)
class Param:
    name: str
    nonzero: bool = False
    default: object = None  # rational default used unless symbolic is requested


@dataclass
class CatalogEntry:
    key: str
    params: tuple
    builder: Callable
    description: str = ""
    options: dict = field(default_factory=dict)

    def resolve(self, params: Mapping | None, symbolic: bool = False) -> tuple:
        """Split requested parameters into (numeric values, symbolic names, options)."""
        given = normalize_params(params)
        opts = dict(self.options)
        for k in list(given):
            if k in opts:
                opts[k] = given.pop(k)
        known = {p.name for p in self.params}
        unknown = sorted(set(given) - known)
        if unknown:
            raise SchemaError(f"{self.key}: unknown parameters {unknown}; expected {sorted(known)}")
        values, symbols = {}, []
        for p in self.params:
            if p.name in given:
                v = parse_value(given[p.name])
            elif symbolic or p.default is None:
                v = None
            else:
                v = p.default
            if v is None:
                symbols.append(p.name)
                continue
            if p.nonzero and v == 0:
                raise SchemaError(f"{self.key}: parameter {p.name} must be nonzero")
            values[p.name] = v
        return values, symbols, opts


_ALGEBRAS: dict = {}


def register(key: str, params=(), description: str = "", **options):
    def deco(fn):
        _ALGEBRAS[key] = CatalogEntry(key, tuple(params), fn, description, options)
        return fn
    return deco


def _instantiate(alg: LcsAlgebra, values: Mapping) -> LcsAlgebra:
    return alg.specialize(values)


# ---- the registry -----------------------------------------------------------

VIR_LL = {("L", "L"): {"L": "del + 2*lam"}}
HV = {("L", "L"): {"L": "del + 2*lam"}, ("L", "H"): {"H": "del + lam"}}


@register("Vir", description="Virasoro conformal algebra")
def _vir(name="Vir"):
    return make_algebra(name, ["L"], ["even"], VIR_LL)


@register("HV", description="Heisenberg-Virasoro conformal algebra")
def _hv(name="HV"):
    return make_algebra(name, ["L", "H"], ["even", "even"], HV)


@register("NS", description="Neveu-Schwarz conformal superalgebra")
def _ns(name="NS"):
    return make_algebra(name, ["L", "G"], ["even", "odd"], {
        ("L", "L"): {"L": "del + 2*lam"},
        ("L", "G"): {"G": "del + 3/2*lam"},
        ("G", "G"): {"L": "2"},
    })


def _hvs_alpha(name, odd="G"):
    return make_algebra(name, ["L", "H", odd], ["even", "even", "odd"], {
        **HV,
        ("L", odd): {odd: "del + lam"},
        (odd, odd): {"H": "alpha"},
    }, params=[ParamSpec("alpha", nonzero=True)])


def _hvs_three(name, odd="E"):
    return make_algebra(name, ["L", "H", odd], ["even", "even", "odd"], {
        **HV,
        ("L", odd): {odd: "del + beta*lam + gamma"},
        ("H", odd): {odd: "tau"},
    }, params=["beta", "gamma", "tau"])


@register("HVS", params=[Param("alpha", True, 2)], description="super extension with [G G] = alpha H (alpha=2 by default)")
def _hvs(name="HVS"):
    return _hvs_alpha(name)


@register("HVSab", params=[Param("alpha", True)], description="same family, alpha kept generic")
def _hvsab(name="HVSab"):
    return _hvs_alpha(name)


@register("HVS2", params=[Param("beta"), Param("gamma"), Param("tau")],
          description="super extension with [L E] = (del+beta*lam+gamma)E, [H E] = tau E")
def _hvs2(name="HVS2"):
    return _hvs_three(name)


def _generic(prefix: str, degree: int, var: str = "del") -> tuple:
    names = [f"{prefix}{i}" for i in range(degree + 1)]
    expr = " + ".join(f"{n}*{var}^{i}" if i else n for i, n in enumerate(names))
    return names, expr


@register("rank11-R1", description="[y y] = p(del) x with generic p", Dgen=3)
def _r1(name="rank11-R1", Dgen=3):
    names, p = _generic("p", int(Dgen))
    return make_algebra(name, ["x", "y"], ["even", "odd"], {("y", "y"): {"x": p}}, params=names)


@register("rank11-R2", description="[x y] = q(lam) y with generic q", Dgen=3)
def _r2(name="rank11-R2", Dgen=3):
    names, q = _generic("q", int(Dgen), "lam")
    return make_algebra(name, ["x", "y"], ["even", "odd"], {("x", "y"): {"y": q}}, params=names)


@register("rank11-R3", description="Virasoro plus an inert odd generator")
def _r3(name="rank11-R3"):
    return make_algebra(name, ["x", "y"], ["even", "odd"], {("x", "x"): {"x": "del + 2*lam"}})


@register("rank11-R4", params=[Param("beta"), Param("gamma")], description="[x y] = (del+beta*lam+gamma) y")
def _r4(name="rank11-R4"):
    return make_algebra(name, ["x", "y"], ["even", "odd"], {
        ("x", "x"): {"x": "del + 2*lam"},
        ("x", "y"): {"y": "del + beta*lam + gamma"},
    }, params=["beta", "gamma"])


@register("rank11-R5", params=[Param("alpha", True)], description="[x y] = (del+3/2*lam) y, [y y] = alpha x")
def _r5(name="rank11-R5"):
    return make_algebra(name, ["x", "y"], ["even", "odd"], {
        ("x", "x"): {"x": "del + 2*lam"},
        ("x", "y"): {"y": "del + 3/2*lam"},
        ("y", "y"): {"x": "alpha"},
    }, params=[ParamSpec("alpha", nonzero=True)])


@register("prop31-R1", description="HV plus an inert odd generator")
def _p1(name="prop31-R1"):
    return make_algebra(name, ["L", "H", "Y"], ["even", "even", "odd"], HV)


@register("prop31-R2", params=[Param("alpha", True)], description="HV plus odd Y with [Y Y] = alpha H")
def _p2(name="prop31-R2"):
    return _hvs_alpha(name, "Y")


@register("prop31-R3", params=[Param("beta"), Param("gamma"), Param("tau")],
          description="HV plus odd Y with [L Y] = (del+beta*lam+gamma) Y, [H Y] = tau Y")
def _p3(name="prop31-R3"):
    return _hvs_three(name, "Y")


KEY_ALIASES = {}
for _k in range(1, 6):
    KEY_ALIASES[f"R{_k}-rank11"] = f"rank11-R{_k}"
for _k in range(1, 4):
    KEY_ALIASES[f"Prop3.1-R{_k}"] = f"prop31-R{_k}"


def keys() -> list:
    return list(_ALGEBRAS)


def entry(key: str) -> CatalogEntry:
    key = KEY_ALIASES.get(key, key)
    try:
        return _ALGEBRAS[key]
    except KeyError:
        raise UnknownKeyError(f"unknown algebra key {key!r}; known: {', '.join(_ALGEBRAS)}") from None


def build(key: str, params: Mapping | None = None, symbolic: bool = False) -> LcsAlgebra:
    """Build a catalog algebra.

    Parameters not given take their default (if any) unless ``symbolic`` is set,
    otherwise they stay as indeterminates of the algebra's ring.
    """
    e = entry(key)
    values, _symbols, opts = e.resolve(params, symbolic)
    alg = e.builder(**opts)
    return _instantiate(alg, values)


# ---- file format ------------------------------------------------------------

def dumps(alg: LcsAlgebra) -> str:
    lines = [f"algebra {alg.name}"]
    specs = {p.name: p for p in alg.params}
    lines += param_header([specs.get(n, ParamSpec(n)) for n in alg.ring.params])
    for g, p in zip(alg.gens, alg.parities):
        lines.append(f"gen {g} {p.word}")
    n = alg.n
    completed = _complete(alg)
    for i in range(n):
        for j in range(n):
            vec = alg.table[i][j]
            if i > j and completed[i][j] == vec:
                continue
            if all(c.is_zero() for c in vec) and i <= j:
                continue
            lines.append(f"bracket {alg.gens[i]} {alg.gens[j]} = {format_combination(vec, alg.gens)}")
    return "\n".join(lines) + "\n"


def _complete(alg: LcsAlgebra) -> list:
    """Table with the strict lower triangle recomputed from the upper one."""
    ring = alg.ring
    d, lam = ring.gens("del", "lam")
    out = [list(row) for row in alg.table]
    for i in range(alg.n):
        for j in range(i):
            s = sign((alg.parities[i], alg.parities[j]))
            out[i][j] = tuple(-s * c.substitute({"lam": -d - lam}) for c in alg.table[j][i])
    return out


def loads(text: str) -> LcsAlgebra:
    name = None
    params: list = []
    gens: list = []
    parities: list = []
    raw_brackets: list = []
    for no, line in logical_lines(text):
        word = line.split(None, 1)[0]
        if word == "algebra":
            parts = line.split()
            if len(parts) != 2 or name is not None:
                raise FormatError("expected a single 'algebra <name>' line", no)
            name = parts[1]
        elif word == "params":
            parts = line.split()
            if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] != "nonzero"):
                raise FormatError("expected 'params <ident> [nonzero]'", no)
            params.append(ParamSpec(check_ident(parts[1], no), len(parts) == 3))
        elif word == "gen":
            parts = line.split()
            if len(parts) != 3:
                raise FormatError("expected 'gen <ident> even|odd'", no)
            try:
                parities.append(Parity.parse(parts[2]))
            except ValueError as exc:
                raise FormatError(str(exc), no) from exc
            gens.append(check_ident(parts[1], no))
        elif word == "bracket":
            head, rhs = split_assignment(line, no)
            if len(head) != 3:
                raise FormatError("expected 'bracket <g1> <g2> = ...'", no)
            raw_brackets.append((no, head[1], head[2], rhs))
        else:
            raise FormatError(f"unknown directive {word!r}", no)
    if name is None:
        raise FormatError("missing 'algebra <name>' header")
    if not gens:
        raise FormatError("no generators declared")
    if len(set(gens)) != len(gens):
        raise FormatError("duplicate generator names")
    ring = standard_ring([p.name for p in params])
    n = len(gens)
    idx = {g: k for k, g in enumerate(gens)}
    given: dict = {}
    for no, a, b, rhs in raw_brackets:
        if a not in idx or b not in idx:
            raise FormatError(f"unknown generator in bracket {a} {b}", no)
        if (idx[a], idx[b]) in given:
            raise FormatError(f"bracket {a} {b} given twice", no)
        combo = parse_combination(rhs, ring, gens, no, forbid=("mu", "nu"))
        vec = tuple(combo.get(g, ring.zero()) for g in gens)
        given[(idx[a], idx[b])] = (no, vec)
    zero = (ring.zero(),) * n
    table = [[given.get((i, j), (0, zero))[1] for j in range(n)] for i in range(n)]
    d, lam = ring.gens("del", "lam")
    for (i, j), (no, vec) in given.items():
        if (j, i) in given:
            continue
        s = sign((parities[i], parities[j]))
        table[j][i] = tuple(-s * c.substitute({"lam": -d - lam}) for c in vec)
    alg = LcsAlgebra(name, tuple(gens), tuple(parities),
                     tuple(tuple(row) for row in table), ring, tuple(params))
    for (i, j), (no, _vec) in given.items():
        if (j, i) in given and i < j:
            res = skew_residual(alg, i, j)
            if any(not r.is_zero() for r in res):
                raise FormatError(f"brackets {gens[i]} {gens[j]} and {gens[j]} {gens[i]} are not skew-consistent", no)
    closure = check_parity_closure(alg)
    if not closure.passed:
        r = closure.residuals[0]
        line = given.get((idx[r.location[0]], idx[r.location[1]]), (None,))[0]
        raise FormatError(f"parity closure violated: [{r.location[0]} {r.location[1]}] has a {r.component} component", line)
    return alg


def load(path) -> LcsAlgebra:
    return loads(read_text(path))


def save(alg: LcsAlgebra, path) -> None:
    write_text(path, dumps(alg))
