"""Free conformal modules of finite rank: checker, catalog, discovery, submodules."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

from . import catalog
from .catalog import Param, SchemaError, UnknownKeyError, normalize_params, parse_value
from .lcsa import LcsAlgebra, Parity, as_poly, sign
from .maps import ShapeError, _union
from .poly import Polynomial, Ring
from .report import Report, ordered_map
from .solver import LinearSystem, LinearTermRef, SolutionBasis, SymbolicParameterError, UnknownPoly, solve
from .textformat import (FormatError, check_ident, format_combination, logical_lines, param_header,
                         parse_combination, read_text, split_assignment, write_text)


@dataclass(frozen=True, eq=False)
class ConformalModule:
    """g_lam v_p = sum_q action[g][p][q](del, lam) v_q over a fixed algebra."""

    name: str
    algebra: LcsAlgebra
    basis: tuple
    parities: tuple
    action: tuple
    ring: Ring
    algebra_key: str | None = None
    algebra_params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "parities", tuple(Parity.parse(p) for p in self.parities))
        m = len(self.basis)
        if len(self.parities) != m:
            raise ShapeError("one parity per basis vector")
        if len(self.action) != self.algebra.n:
            raise ShapeError("one action matrix per algebra generator")
        act = tuple(tuple(tuple(as_poly(self.ring, c) for c in row) for row in mat) for mat in self.action)
        for mat in act:
            if len(mat) != m or any(len(r) != m for r in mat):
                raise ShapeError("action matrices must be rank x rank")
            for row in mat:
                for c in row:
                    if c.variables() & {"mu", "nu"}:
                        raise ValueError(f"action entry {c} may only use del and lam")
        object.__setattr__(self, "action", act)
        if self.algebra.ring != self.ring:
            object.__setattr__(self, "algebra", self.algebra.over(_union(self.algebra.ring, self.ring)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def entry(self, g, p, q) -> Polynomial:
        alg = self.algebra
        gi = alg.index(g) if isinstance(g, str) else g
        pi = self.basis.index(p) if isinstance(p, str) else p
        qi = self.basis.index(q) if isinstance(q, str) else q
        return self.action[gi][pi][qi]

    def over(self, ring: Ring) -> "ConformalModule":
        if ring == self.ring:
            return self
        act = tuple(tuple(tuple(c.to_ring(ring) for c in r) for r in mat) for mat in self.action)
        return ConformalModule(self.name, self.algebra.over(ring), self.basis, self.parities, act, ring,
                               self.algebra_key, self.algebra_params)

    def flipped(self) -> "ConformalModule":
        """The same action with every basis parity reversed."""
        pars = tuple(p + Parity.ODD for p in self.parities)
        return ConformalModule(self.name + "^flip", self.algebra, self.basis, pars, self.action, self.ring,
                               self.algebra_key, self.algebra_params)

    def specialize(self, values: Mapping) -> "ConformalModule":
        values = {k: v for k, v in values.items() if k in self.ring.params}
        if not values:
            return self
        ring = self.ring.without_params(*values)
        binds = {k: self.ring.const(v) for k, v in values.items()}
        act = tuple(tuple(tuple(c.substitute(binds).to_ring(ring) for c in r) for r in mat) for mat in self.action)
        alg = self.algebra.specialize(values)
        return ConformalModule(self.name, alg.over(ring) if alg.ring != ring else alg, self.basis, self.parities,
                               act, ring, self.algebra_key, self.algebra_params)

    def parity_violations(self) -> list:
        out = []
        alg = self.algebra
        for g, p, q in product(range(alg.n), range(self.rank), range(self.rank)):
            c = self.action[g][p][q]
            if not c.is_zero() and self.parities[q] != alg.parities[g] + self.parities[p]:
                out.append((alg.gens[g], self.basis[p], self.basis[q]))
        return out

    def show(self) -> str:
        lines = []
        for g, mat in zip(self.algebra.gens, self.action):
            for p, row in zip(self.basis, mat):
                lines.append(f"{g}_lam {p} = {format_combination(row, self.basis)}")
        return "\n".join(lines)


def module_residual(M: ConformalModule, i: int, j: int, p: int) -> tuple:
    """[e_i lam e_j]_{lam+mu} v_p - e_i lam (e_j mu v_p) + s e_j mu (e_i lam v_p), componentwise."""
    alg = M.algebra
    ring = M.ring
    d, lam, mu = ring.gens("del", "lam", "mu")
    A = M.action
    m = M.rank
    out = [ring.zero()] * m
    for k in range(alg.n):
        b = alg.table[i][j][k]
        if b.is_zero():
            continue
        bb = b.substitute({"del": -lam - mu, "lam": lam})
        for r in range(m):
            a = A[k][p][r]
            if not a.is_zero():
                out[r] = out[r] + bb * a.substitute({"lam": lam + mu})
    s = sign((alg.parities[i], alg.parities[j]))
    for q in range(m):
        aj = A[j][p][q]
        if not aj.is_zero():
            ajs = aj.substitute({"del": d + lam, "lam": mu})
            for r in range(m):
                ai = A[i][q][r]
                if not ai.is_zero():
                    out[r] = out[r] - ajs * ai
        ai = A[i][p][q]
        if not ai.is_zero():
            ais = ai.substitute({"del": d + mu})
            for r in range(m):
                aj2 = A[j][q][r]
                if not aj2.is_zero():
                    out[r] = out[r] + s * ais * aj2.substitute({"lam": mu})
    return tuple(out)


def is_module(M: ConformalModule) -> Report:
    alg = M.algebra
    rep = Report("module", f"{M.name} over {alg.name}")
    for loc in M.parity_violations():
        rep.add(loc, "parity", "entry breaks parity")
    items = list(product(range(alg.n), range(alg.n), range(M.rank)))

    def one(t):
        i, j, p = t
        res = module_residual(M, i, j, p)
        loc = (alg.gens[i], alg.gens[j], M.basis[p])
        return 1, [(loc, M.basis[r], x) for r, x in enumerate(res) if not x.is_zero()]

    for checked, bad in ordered_map(one, items):
        rep.checked += checked
        for loc, comp, r in bad:
            rep.add(loc, comp, r)
    return rep


def make_module(alg: LcsAlgebra, name: str, basis: Sequence[str], parities: Sequence, actions: Mapping,
                ring: Ring | None = None, algebra_key: str | None = None, algebra_params: Mapping | None = None
                ) -> ConformalModule:
    """Build from ``{(gen, basis_p): {basis_q: poly}}``; unspecified actions are zero."""
    ring = ring or alg.ring
    ring = _union(ring, alg.ring)
    m = len(basis)
    idx = {b: k for k, b in enumerate(basis)}
    mats = [[[ring.zero()] * m for _ in range(m)] for _ in range(alg.n)]
    for (g, p), combo in actions.items():
        for q, poly in combo.items():
            mats[alg.index(g)][idx[p]][idx[q]] = as_poly(ring, poly)
    return ConformalModule(name, alg.over(ring), tuple(basis), tuple(parities), mats, ring, algebra_key,
                           tuple(sorted((algebra_params or {}).items())))


# ---- catalog ---------------------------------------------------------------------

@dataclass
class ModuleFamily:
    key: str
    params: tuple
    algebra_key: str
    builder: Callable
    description: str = ""
    numeric: tuple = ()  # parameters that must be given as rationals
    excluded: dict = field(default_factory=dict)  # parameter -> forbidden values

    def resolve(self, params: Mapping | None, symbolic: bool) -> tuple:
        given = normalize_params(params)
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
                if p.name in self.numeric:
                    raise SchemaError(f"{self.key}: parameter {p.name} must be a rational value")
                symbols.append(p.name)
                continue
            if p.nonzero and v == 0:
                raise SchemaError(f"{self.key}: parameter {p.name} must be nonzero")
            if v in self.excluded.get(p.name, ()):
                raise SchemaError(f"{self.key}: parameter {p.name} may not be {v}")
            values[p.name] = v
        return values, symbols


_MODULES: dict = {}


def _family(key, params=(), algebra="HVS", description="", numeric=(), excluded=None):
    def deco(fn):
        _MODULES[key] = ModuleFamily(key, tuple(params), algebra, fn, description, tuple(numeric), excluded or {})
        return fn
    return deco


class _Ctx:
    """Builder context: parameter values as polynomials of the module ring."""

    def __init__(self, ring: Ring, values: Mapping, symbols: Sequence[str]):
        self.ring = ring
        self.values = values
        self.symbols = symbols

    def __getitem__(self, name) -> Polynomial:
        if name in self.values:
            return self.ring.const(self.values[name])
        return self.ring.var(name)

    def num(self, name) -> Fraction:
        return Fraction(self.values[name])

    def gens(self):
        return self.ring.gens("del", "lam")


def _rank11(c: _Ctx, odd: str, f0, f1, g0, g1, h0, h1=0) -> dict:
    return {
        ("L", "v0"): {"v0": f0}, ("L", "v1"): {"v1": f1},
        ("H", "v0"): {"v0": g0}, ("H", "v1"): {"v1": g1},
        (odd, "v0"): {"v1": h0}, (odd, "v1"): {"v0": h1},
    }


@_family("Vir-M", [Param("Delta"), Param("a")], "Vir", "L v = (del + a + Delta lam) v")
def _vir_m(c: _Ctx):
    d, lam = c.gens()
    return ["v"], ["even"], {("L", "v"): {"v": d + c["a"] + c["Delta"] * lam}}


@_family("HV-M", [Param("Delta"), Param("a"), Param("b")], "HV", "rank one HV module")
def _hv_m(c: _Ctx):
    d, lam = c.gens()
    return ["v"], ["even"], {("L", "v"): {"v": d + c["Delta"] * lam + c["a"]}, ("H", "v"): {"v": c["b"]}}


def _hvs_bc(c: _Ctx):
    d, lam = c.gens()
    f = d + c["Delta"] * lam + c["a"]
    bc = c["b"] * c["c"]
    return ["v0", "v1"], ["even", "odd"], _rank11(c, "G", f, f, bc, bc, c["b"], c["c"])


_family("T7.3-Mabc", [Param("Delta"), Param("a"), Param("b", True), Param("c", True)], "HVS",
        "G v0 = b v1, G v1 = c v0, H = bc")(_hvs_bc)
_family("T7.3-M1", [Param("Delta"), Param("a"), Param("b", False, Fraction(1)), Param("c", False, Fraction(0))],
        "HVS", "equal weights; G v0 = b v1, G v1 = c v0 (c=0 by default)")(_hvs_bc)


def _hvs_h(delta0, delta1, h):
    def build(c: _Ctx):
        d, lam = c.gens()
        a = c["a"]
        D0, D1 = delta0(c), delta1(c)
        z = c.ring.zero()
        return ["v0", "v1"], ["even", "odd"], _rank11(c, "G", d + D0 * lam + a, d + D1 * lam + a, z, z, h(c, d, lam, a, D1))
    return build


_family("T7.3-M2", [Param("Delta0"), Param("a")], "HVS", "h = lam")(
    _hvs_h(lambda c: c["Delta0"], lambda c: c["Delta0"] - 1, lambda c, d, l, a, D1: l))
_family("T7.3-M3", [Param("Delta0"), Param("a")], "HVS", "h = lam (del - Delta1 lam + a)")(
    _hvs_h(lambda c: c["Delta0"], lambda c: c["Delta0"] - 2, lambda c, d, l, a, D1: l * (d - D1 * l + a)))
_family("T7.3-M4", [Param("a"), Param("k")], "HVS", "h = del + k lam + a")(
    _hvs_h(lambda c: c.ring.one(), lambda c: c.ring.zero(), lambda c, d, l, a, D1: d + c["k"] * l + a))
_family("T7.3-M5", [Param("a")], "HVS", "h = lam (del + lam + a)(del + 2 lam + a)")(
    _hvs_h(lambda c: c.ring.one(), lambda c: c.ring.const(-2),
           lambda c, d, l, a, D1: l * (d + l + a) * (d + l * 2 + a)))
_family("T7.3-M6", [Param("a")], "HVS", "h = lam (del + a)(del - lam + a)")(
    _hvs_h(lambda c: c.ring.const(3), lambda c: c.ring.zero(),
           lambda c, d, l, a, D1: l * (d + a) * (d - l + a)))


def _hvs2_h(beta, delta0, delta1, h, with_b=False):
    """Actions over the tau=0 family; h is given in shifted variables db = del + a, lb = lam - gamma."""
    def build(c: _Ctx):
        d, lam = c.gens()
        a, gamma = c["a"], c["gamma"]
        db, lb = d + a, lam - gamma
        B = beta(c)
        D0, D1 = delta0(c, B), delta1(c, B)
        b = c["b"] if with_b else c.ring.zero()
        return (["v0", "v1"], ["even", "odd"],
                _rank11(c, "E", d + D0 * lam + a - gamma, d + D1 * lam + a, b, b, h(c, db, lb, B, D1)))
    return build


def _fixed(v):
    return lambda c: Fraction(v)


def _beta_param(c):
    return c["beta"]


T74_ALGEBRA_PARAMS = {"tau": 0}
_B = [Param("beta")]
_G = [Param("gamma"), Param("a")]

_family("T7.4-M1", _B + [Param("Delta0")] + _G, "HVS2", "h = 1")(
    _hvs2_h(_beta_param, lambda c, B: c["Delta0"], lambda c, B: c["Delta0"] + B - 1, lambda c, x, y, B, D1: c.ring.one()))
_family("T7.4-M2", [Param("Delta0")] + _G, "HVS2", "beta = 1, h = lam - gamma")(
    _hvs2_h(_fixed(1), lambda c, B: c["Delta0"], lambda c, B: c["Delta0"] - 1, lambda c, x, y, B, D1: y))
_family("T7.4-M3", [Param("Delta0")] + _G, "HVS2", "beta = 1, h = lb (db - Delta1 lb)")(
    _hvs2_h(_fixed(1), lambda c, B: c["Delta0"], lambda c, B: c["Delta0"] - 2, lambda c, x, y, B, D1: y * (x - D1 * y)))
_family("T7.4-M4", _B + [Param("k")] + _G, "HVS2", "h = db + k lb")(
    _hvs2_h(_beta_param, lambda c, B: c["k"] * (B - 1) - B + 2, lambda c, B: c["k"] * (B - 1),
            lambda c, x, y, B, D1: x + c["k"] * y))
_family("T7.4-M5", _B + _G, "HVS2", "beta not 1, 2; h = (db + lb)(db + (beta-2)/(beta-1) lb)",
        numeric=("beta",), excluded={"beta": (1, 2)})(
    _hvs2_h(_beta_param, lambda c, B: c.ring.one(), lambda c, B: B - 2,
            lambda c, x, y, B, D1: (x + y) * (x + y * ((c.num("beta") - 2) / (c.num("beta") - 1)))))
_family("T7.4-M6", _B + _G, "HVS2", "beta not 1; h = db (db + lb/(beta-1))",
        numeric=("beta",), excluded={"beta": (1,)})(
    _hvs2_h(_beta_param, lambda c, B: 3 - B, lambda c, B: c.ring.zero(),
            lambda c, x, y, B, D1: x * (x + y * (1 / (c.num("beta") - 1)))))
# weights (5/3, -2/3): the only ones for which this cubic h solves the L-E identity
_family("T7.4-M7", _G, "HVS2", "beta = 5/3; h = (db - lb)(db + lb/2)(db + 2 lb)")(
    _hvs2_h(_fixed(Fraction(5, 3)), lambda c, B: c.ring.const(Fraction(5, 3)), lambda c, B: c.ring.const(Fraction(-2, 3)),
            lambda c, x, y, B, D1: (x - y) * (x + y * Fraction(1, 2)) * (x + y * 2)))
_family("T7.4-M8", _G, "HVS2", "beta = 3; h = db (db + lb/2)(db + lb)")(
    _hvs2_h(_fixed(3), lambda c, B: c.ring.one(), lambda c, B: c.ring.zero(),
            lambda c, x, y, B, D1: x * (x + y * Fraction(1, 2)) * (x + y)))
_family("T7.4-M9", _G, "HVS2", "beta = 1; h = lb (db + lb)(db + 2 lb)")(
    _hvs2_h(_fixed(1), lambda c, B: c.ring.one(), lambda c, B: c.ring.const(-2),
            lambda c, x, y, B, D1: y * (x + y) * (x + y * 2)))
_family("T7.4-M10", _G, "HVS2", "beta = 1; h = lb db (db - lb)")(
    _hvs2_h(_fixed(1), lambda c, B: c.ring.const(3), lambda c, B: c.ring.zero(),
            lambda c, x, y, B, D1: y * x * (x - y)))
_family("T7.4-Mb1", _B + [Param("Delta0")] + _G + [Param("b", True)], "HVS2", "H = b, h = 1")(
    _hvs2_h(_beta_param, lambda c, B: c["Delta0"], lambda c, B: c["Delta0"] + B - 1,
            lambda c, x, y, B, D1: c.ring.one(), with_b=True))
_family("T7.4-Mb2", [Param("Delta0")] + _G + [Param("b", True)], "HVS2", "beta = 1, H = b, h = lam - gamma")(
    _hvs2_h(_fixed(1), lambda c, B: c["Delta0"], lambda c, B: c["Delta0"] - 1, lambda c, x, y, B, D1: y, with_b=True))

_FIXED_BETA = {"T7.4-M2": 1, "T7.4-M3": 1, "T7.4-M7": Fraction(5, 3), "T7.4-M8": 3, "T7.4-M9": 1,
               "T7.4-M10": 1, "T7.4-Mb2": 1}

TABLE_FAMILIES = [k for k in _MODULES if k.startswith("T7.")]


def module_keys() -> list:
    return list(_MODULES)


def module_family(key: str) -> ModuleFamily:
    try:
        return _MODULES[key]
    except KeyError:
        raise UnknownKeyError(f"unknown module key {key!r}; known: {', '.join(_MODULES)}") from None


def build_module(key: str, params: Mapping | None = None, symbolic: bool = False) -> ConformalModule:
    """Instantiate a catalog module; parameters not given stay symbolic unless they have defaults."""
    fam = module_family(key)
    values, symbols = fam.resolve(params, symbolic)
    # record defaults so a dumped module reloads over the same algebra
    alg_params: dict = dict(catalog.entry(fam.algebra_key).resolve({}, False)[0])
    if fam.algebra_key == "HVS2":
        alg_params = dict(T74_ALGEBRA_PARAMS)
        if key in _FIXED_BETA:
            alg_params["beta"] = _FIXED_BETA[key]
        for p in ("beta", "gamma"):
            if p in values:
                alg_params[p] = values[p]
    alg = catalog.build(fam.algebra_key, alg_params, symbolic=fam.algebra_key == "HVS2")
    ring = alg.ring.with_params(*[s for s in symbols if s not in alg.ring.params])
    ctx = _Ctx(ring, values, symbols)
    basis, parities, actions = fam.builder(ctx)
    name = key if not values else key + "(" + ",".join(f"{k}={v}" for k, v in values.items()) + ")"
    return make_module(alg.over(ring), name, basis, parities, actions, ring, fam.algebra_key, alg_params)


def coupling_residual(M: ConformalModule, odd: str = "G") -> Polynomial:
    """h0(del+lam, lam) h1(del, lam) - g0(del, 2 lam) for a rank (1+1) module."""
    d, lam = M.ring.gens("del", "lam")
    h0 = M.entry(odd, 0, 1)
    h1 = M.entry(odd, 1, 0)
    g0 = M.entry("H", 0, 0)
    return h0.substitute({"del": d + lam}) * h1 - g0.substitute({"lam": lam * 2})


# ---- discovery of rank (1+1) modules with h1 = 0 -----------------------------------

@dataclass
class DiscoveryResult:
    basis: SolutionBasis | None
    modules: list
    notes: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return 0 if self.basis is None else self.basis.dimension

    def h0(self) -> list:
        return [] if self.basis is None else [v["h0"] for v in self.basis.vectors]


def _odd_generator(alg: LcsAlgebra) -> str:
    if (list(alg.gens[:2]) != ["L", "H"] or alg.n != 3
            or [int(p) for p in alg.parities] != [0, 0, 1]):
        raise ValueError("discovery needs a rank (2+1) algebra with even L, H and one odd generator")
    return alg.gens[2]


def rank11_module(alg: LcsAlgebra, delta0, delta1, a, b, h0, name: str = "discovered") -> ConformalModule:
    """The (1+1) action with fixed even part and E v0 = h0 v1, E v1 = 0."""
    odd = _odd_generator(alg)
    ring = alg.ring
    d, lam = ring.gens("del", "lam")
    delta0, delta1, a, b = (Fraction(x) for x in (delta0, delta1, a, b))
    tau = gamma = Fraction(0)
    if odd != "G":
        gamma = _coefficient_const(alg.table[0][2][2], ring)
        tau = _coefficient_const(alg.table[1][2][2], ring)
    acts = {
        ("L", "v0"): {"v0": d + lam * delta0 + a - gamma}, ("L", "v1"): {"v1": d + lam * delta1 + a},
        ("H", "v0"): {"v0": ring.const(b - tau)}, ("H", "v1"): {"v1": ring.const(b)},
        (odd, "v0"): {"v1": h0},
    }
    return make_module(alg, name, ["v0", "v1"], ["even", "odd"], acts)


def _coefficient_const(p: Polynomial, ring: Ring) -> Fraction:
    return Fraction(p.constant_term())


def discover_rank11(alg: LcsAlgebra, delta0, delta1, a, b=0, bound: int = 3) -> DiscoveryResult:
    """All h0(del, lam) of degree <= bound in each variable making the h1 = 0 action a module.

    The even part of the action is fixed by (delta0, delta1, a, b); with
    h1 = 0 every module identity is linear in h0.
    """
    if alg.is_symbolic():
        raise SymbolicParameterError(f"{alg.name} has free parameters {list(alg.ring.params)}")
    odd = _odd_generator(alg)
    ring = alg.ring
    base = rank11_module(alg, delta0, delta1, a, b, ring.zero(), "even-part")
    pre = is_module(base)
    if not pre.passed:
        return DiscoveryResult(None, [], [f"fixed even action is not a module: {len(pre.residuals)} residuals"])
    d, lam, mu = ring.gens("del", "lam", "mu")
    A = base.action
    o = alg.index(odd)
    system = LinearSystem(ring)
    system.unknown(UnknownPoly("h0", ("del", "lam"), (bound, bound)))

    def entry(g, p, q, dd, ll):
        """(polynomial part, unknown coefficient or None) of A[g][p][q](dd, ll)."""
        if g == o and p == 0 and q == 1:
            return None, (dd, ll)
        return A[g][p][q].substitute({"del": dd, "lam": ll}), None

    def product_terms(x, y, terms):
        (px, ux), (py, uy) = x, y
        if ux is not None and uy is not None:
            raise AssertionError("h0 enters quadratically")
        if ux is not None and not py.is_zero():
            terms.append((py, ux))
        elif uy is not None and not px.is_zero():
            terms.append((px, uy))

    for i, j, p in product(range(3), range(3), range(2)):
        s = sign((alg.parities[i], alg.parities[j]))
        for r in range(2):
            terms: list = []
            for k in range(3):
                bk = alg.table[i][j][k]
                if bk.is_zero():
                    continue
                coef = bk.substitute({"del": -lam - mu, "lam": lam})
                product_terms((coef, None), entry(k, p, r, d, lam + mu), terms)
            for q in range(2):
                left = entry(j, p, q, d + lam, mu)
                right = entry(i, q, r, d, lam)
                neg = []
                product_terms(left, right, neg)
                terms += [(-c, u) for c, u in neg]
                left = entry(i, p, q, d + mu, lam)
                right = entry(j, q, r, d, mu)
                pos = []
                product_terms(left, right, pos)
                terms += [(c * s, u) for c, u in pos]
            system.add([LinearTermRef.make("h0", c, **{"del": dd, "lam": ll}) for c, (dd, ll) in terms],
                       (alg.gens[i], alg.gens[j], p, r))
    basis = solve(system)
    mods = []
    for k, vec in enumerate(basis.vectors):
        M = rank11_module(alg, delta0, delta1, a, b, vec["h0"], f"discovered-{k}")
        rep = is_module(M)
        if not rep.passed:
            raise AssertionError(f"discovered action fails the module check: {rep.residuals[0]}")
        mods.append(M)
    return DiscoveryResult(basis, mods)


# ---- submodules ---------------------------------------------------------------------

def divide_by_del_poly(num: Polynomial, den: Polynomial) -> tuple:
    """Long division in del; ``den`` must depend on del only with a rational leading coefficient."""
    ring = num.ring
    if den.variables() - {"del"}:
        raise ValueError("divisor must be a polynomial in del alone")
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    n = den.degree("del")
    lead = den.coefficient({"del": n})
    d = ring.var("del")
    q = ring.zero()
    rem = num
    while not rem.is_zero() and rem.degree("del") >= n:
        t = rem.degree("del")
        coeff = rem.coefficients_in(("del",)).get((t,), ring.zero())
        term = coeff * (1 / Fraction(lead)) * d ** (t - n)
        q = q + term
        rem = rem - term * den
    return q, rem


def submodule_check(M: ConformalModule, element) -> Report:
    """Is C[del] * element an action-closed subspace of a rank-one module?

    ``element`` is a polynomial in del (or its text) multiplying the single
    basis vector.  Notes record the induced action g_lam -> q(del, lam).
    """
    if M.rank != 1:
        raise ValueError("submodule check needs a rank one module")
    ring = M.ring
    e = element if isinstance(element, Polynomial) else ring.parse(str(element))
    e = e.to_ring(ring)
    rep = Report("submodule", f"C[del]({e}) in {M.name}")
    d, lam = ring.gens("del", "lam")
    shifted = e.substitute({"del": d + lam})
    for g, mat in zip(M.algebra.gens, M.action):
        rep.checked += 1
        image = shifted * mat[0][0]
        q, r = divide_by_del_poly(image, e)
        if r.is_zero():
            rep.notes.append(f"{g}_lam -> {q}")
        else:
            rep.add((g,), M.basis[0], r)
    return rep


# ---- file format -----------------------------------------------------------------

def dumps_module(M: ConformalModule) -> str:
    head = f"module {M.name.split('(')[0]} over {M.algebra_key or M.algebra.name}"
    if M.algebra_params:
        head += " " + " ".join(f"{k}={v}" for k, v in M.algebra_params)
    lines = [head]
    base = catalog.build(M.algebra_key, dict(M.algebra_params), symbolic=True).ring.params if M.algebra_key else ()
    lines += param_header([Param(p) for p in M.ring.params if p not in base])
    for b, p in zip(M.basis, M.parities):
        lines.append(f"basis {b} {p.word}")
    for g, mat in zip(M.algebra.gens, M.action):
        for b, row in zip(M.basis, mat):
            if any(not c.is_zero() for c in row):
                lines.append(f"action {g} {b} = {format_combination(row, M.basis)}")
    return "\n".join(lines) + "\n"


def loads_module(text: str) -> ConformalModule:
    name = key = None
    alg_params: dict = {}
    params: list = []
    basis: list = []
    parities: list = []
    actions: dict = {}
    for no, line in logical_lines(text):
        word = line.split(None, 1)[0]
        if word == "module":
            parts = line.split()
            if name is not None or len(parts) < 4 or parts[2] != "over":
                raise FormatError("expected 'module <name> over <algebra-key> [param=value ...]'", no)
            name, key = parts[1], parts[3]
            for kv in parts[4:]:
                if "=" not in kv:
                    raise FormatError(f"expected param=value, got {kv!r}", no)
                k, v = kv.split("=", 1)
                try:
                    alg_params[k] = parse_value(v)
                except SchemaError as exc:
                    raise FormatError(str(exc), no) from exc
        elif word == "params":
            parts = line.split()
            if len(parts) not in (2, 3):
                raise FormatError("expected 'params <ident> [nonzero]'", no)
            params.append(check_ident(parts[1], no))
        elif word == "basis":
            parts = line.split()
            if len(parts) != 3:
                raise FormatError("expected 'basis <ident> even|odd'", no)
            try:
                parities.append(Parity.parse(parts[2]))
            except ValueError as exc:
                raise FormatError(str(exc), no) from exc
            basis.append(check_ident(parts[1], no))
        elif word == "action":
            head, rhs = split_assignment(line, no)
            if len(head) != 3:
                raise FormatError("expected 'action <gen> <basis> = ...'", no)
            if (head[1], head[2]) in actions:
                raise FormatError(f"action {head[1]} {head[2]} given twice", no)
            actions[(head[1], head[2])] = (no, rhs)
        else:
            raise FormatError(f"unknown directive {word!r}", no)
    if name is None:
        raise FormatError("missing 'module <name> over <algebra>' header")
    if not basis or len(set(basis)) != len(basis):
        raise FormatError("need distinct basis vectors")
    try:
        alg = catalog.build(key, {k: v for k, v in alg_params.items()}, symbolic=True)
    except (UnknownKeyError, SchemaError) as exc:
        raise FormatError(str(exc)) from exc
    ring = alg.ring.with_params(*params)
    combos = {}
    for (g, b), (no, rhs) in actions.items():
        if g not in alg.gens or b not in basis:
            raise FormatError(f"unknown generator or basis vector in action {g} {b}", no)
        combos[(g, b)] = parse_combination(rhs, ring, basis, no, forbid=("mu", "nu"))
    return make_module(alg.over(ring), name, basis, parities, combos, ring, key, alg_params)


def load_module(path) -> ConformalModule:
    return loads_module(read_text(path))


def save_module(M: ConformalModule, path) -> None:
    write_text(path, dumps_module(M))
