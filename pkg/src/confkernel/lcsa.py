"""Lie conformal superalgebras given by structure polynomials.

An algebra on generators e_1..e_n is stored as a table ``B`` with
``[e_i lam e_j] = sum_k B[i][j][k](del, lam) e_k``.  Elements are tuples of
polynomials, one coefficient per generator; a coefficient may also mention
lambda variables, in which case it is treated as a scalar for the bracket.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Mapping, Sequence

from .poly import Polynomial, Ring, Role
from .report import Report, ordered_map

LAMBDAS = ("lam", "mu", "nu")


class Parity(enum.IntEnum):
    EVEN = 0
    ODD = 1

    def __add__(self, other):
        return Parity((int(self) + int(other)) % 2)

    __radd__ = __add__

    @classmethod
    def parse(cls, word) -> "Parity":
        if isinstance(word, (int, Parity)):
            return cls(int(word) % 2)
        w = str(word).strip().lower()
        if w in ("even", "0"):
            return cls.EVEN
        if w in ("odd", "1"):
            return cls.ODD
        raise ValueError(f"not a parity: {word!r}")

    @property
    def word(self) -> str:
        return "odd" if self else "even"


def sign(*parity_pairs) -> int:
    """(-1)^(sum of products) for pairs of parities."""
    total = sum(int(a) * int(b) for a, b in parity_pairs)
    return -1 if total % 2 else 1


@dataclass(frozen=True)
class ParamSpec:
    name: str
    nonzero: bool = False


def standard_ring(params: Sequence[str] = ()) -> Ring:
    return Ring("del", LAMBDAS, tuple(params))


def as_poly(ring: Ring, value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value.to_ring(ring) if value.ring != ring else value
    if isinstance(value, str):
        return ring.parse(value)
    return ring.const(value)


def lambda_poly(ring: Ring, lv) -> Polynomial:
    if isinstance(lv, Polynomial):
        return as_poly(ring, lv)
    if ring.role(lv) is not Role.LAMBDA:
        raise ValueError(f"{lv!r} is not a lambda variable")
    return ring.var(lv)


@dataclass(frozen=True, eq=False)
class LcsAlgebra:
    name: str
    gens: tuple
    parities: tuple
    table: tuple
    ring: Ring
    params: tuple = ()

    def __post_init__(self):
        n = len(self.gens)
        if len(set(self.gens)) != n:
            raise ValueError("generator names must be distinct")
        if len(self.parities) != n:
            raise ValueError("one parity per generator required")
        object.__setattr__(self, "parities", tuple(Parity.parse(p) for p in self.parities))
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise ValueError("bracket table must be n x n")
        rows = []
        for row in self.table:
            cells = []
            for vec in row:
                if len(vec) != n:
                    raise ValueError("each bracket entry must have one coefficient per generator")
                cells.append(tuple(as_poly(self.ring, c) for c in vec))
            rows.append(tuple(cells))
        object.__setattr__(self, "table", tuple(rows))
        for row in self.table:
            for vec in row:
                for c in vec:
                    bad = c.variables() - {"del", "lam"} - set(self.ring.params)
                    if bad:
                        raise ValueError(f"table entry {c} uses {sorted(bad)}")

    # ---- structure -----------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.gens)

    def index(self, gen) -> int:
        if isinstance(gen, int):
            return gen
        try:
            return self.gens.index(gen)
        except ValueError:
            raise KeyError(f"{gen!r} is not a generator of {self.name}") from None

    def parity(self, gen) -> Parity:
        return self.parities[self.index(gen)]

    def entry(self, a, b) -> tuple:
        return self.table[self.index(a)][self.index(b)]

    @property
    def symbolic_params(self) -> tuple:
        return self.ring.params

    def is_symbolic(self) -> bool:
        return bool(self.ring.params)

    def over(self, ring: Ring) -> "LcsAlgebra":
        """Same algebra with entries re-expressed in a larger ring."""
        if ring == self.ring:
            return self
        table = tuple(tuple(tuple(c.to_ring(ring) for c in vec) for vec in row) for row in self.table)
        return LcsAlgebra(self.name, self.gens, self.parities, table, ring, self.params)

    def specialize(self, values: Mapping) -> "LcsAlgebra":
        """Substitute rational values for some parameters and drop them from the ring."""
        values = {k: v for k, v in values.items() if k in self.ring.params}
        if not values:
            return self
        ring = self.ring.without_params(*values)
        binds = {k: self.ring.const(v) for k, v in values.items()}
        table = tuple(tuple(tuple(c.substitute(binds).to_ring(ring) for c in vec) for vec in row)
                      for row in self.table)
        return LcsAlgebra(self.name, self.gens, self.parities, table, ring, self.params)

    def same_table(self, other: "LcsAlgebra") -> bool:
        return (self.gens == other.gens and self.parities == other.parities
                and self.ring == other.ring and self.table == other.table)

    def __eq__(self, other):
        return isinstance(other, LcsAlgebra) and self.same_table(other)

    def __hash__(self):
        return hash((self.gens, self.parities, self.ring, self.table))

    # ---- elements ------------------------------------------------------
    def zero(self) -> tuple:
        z = self.ring.zero()
        return (z,) * self.n

    def gen(self, g) -> tuple:
        k = self.index(g)
        return tuple(self.ring.one() if i == k else self.ring.zero() for i in range(self.n))

    def element(self, coeffs: Mapping) -> tuple:
        """Element from ``{generator: coefficient}``; coefficients may be strings."""
        out = list(self.zero())
        for g, c in coeffs.items():
            out[self.index(g)] = as_poly(self.ring, c)
        return tuple(out)

    def element_parity(self, x: Sequence) -> Parity | None:
        """Parity of a homogeneous element, ``None`` for zero; raises if mixed."""
        found = {self.parities[i] for i, c in enumerate(x) if not c.is_zero()}
        if len(found) > 1:
            raise ValueError("element is not homogeneous")
        return next(iter(found), None)

    def show(self, vec: Sequence) -> str:
        parts = [f"({c})*{g}" for c, g in zip(vec, self.gens) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"


# ---- bracket calculus ------------------------------------------------------

@lru_cache(maxsize=200_000)
def _entry_at(poly: Polynomial, d: Polynomial, x: Polynomial) -> Polynomial:
    return poly.substitute({"del": d, "lam": x})


def table_at(alg: LcsAlgebra, i: int, j: int, d: Polynomial, x: Polynomial) -> tuple:
    """B[i][j](d, x) as a coefficient vector."""
    return tuple(_entry_at(c, d, x) for c in alg.table[i][j])


def shift(p: Polynomial, x: Polynomial) -> Polynomial:
    """p(del) -> p(del + x)."""
    return p.substitute({"del": p.ring.var("del") + x})


def at(p: Polynomial, x: Polynomial) -> Polynomial:
    """p(del) -> p(x)."""
    return p.substitute({"del": x})


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def sesquilinear(table_fn, ring: Ring, n_out: int, x: Sequence, lv: Polynomial, y: Sequence) -> tuple:
    """Generic sesquilinear extension of a bilinear rule given on generators.

    ``table_fn(i, j, d, lv)`` returns the vector for the pair (i, j) evaluated at
    del = d and lambda = lv.  Coefficients transform as p(del) -> p(-lv) on the
    left and q(del) -> q(del + lv) on the right.
    """
    dvar = ring.var("del")
    acc = [ring.zero()] * n_out
    for i, p in enumerate(x):
        if p.is_zero():
            continue
        pl = at(p, -lv)
        if pl.is_zero():
            continue
        for j, q in enumerate(y):
            if q.is_zero():
                continue
            qr = shift(q, lv)
            coeff = pl * qr
            vec = table_fn(i, j, dvar, lv)
            for k, b in enumerate(vec):
                if not b.is_zero():
                    acc[k] = acc[k] + coeff * b
    return tuple(acc)


def bracket(alg: LcsAlgebra, x: Sequence, lv, y: Sequence) -> tuple:
    """[x_lv y] for elements x, y; ``lv`` is a lambda name or a polynomial."""
    if len(x) != alg.n or len(y) != alg.n:
        raise ValueError(f"{alg.name} has {alg.n} generators")
    ring = alg.ring
    lvp = lambda_poly(ring, lv)
    return sesquilinear(lambda i, j, d, l: table_at(alg, i, j, d, l), ring, alg.n, x, lvp, y)


def skew_residual(alg: LcsAlgebra, i: int, j: int) -> tuple:
    ring = alg.ring
    d, lam = ring.gens("del", "lam")
    s = sign((alg.parities[i], alg.parities[j]))
    fwd = alg.table[i][j]
    back = table_at(alg, j, i, d, -d - lam)
    return tuple(a + s * b for a, b in zip(fwd, back))


def check_skew_symmetry(alg: LcsAlgebra) -> Report:
    rep = Report("skew-symmetry", alg.name)
    pairs = list(product(range(alg.n), repeat=2))

    def one(pair):
        i, j = pair
        res = skew_residual(alg, i, j)
        bad = [((alg.gens[i], alg.gens[j]), alg.gens[k], r) for k, r in enumerate(res) if not r.is_zero()]
        return 1, bad

    for checked, bad in ordered_map(one, pairs):
        rep.checked += checked
        for loc, comp, r in bad:
            rep.add(loc, comp, r)
    return rep


def jacobi_residual(alg: LcsAlgebra, i: int, j: int, k: int) -> tuple:
    ring = alg.ring
    lam, mu = ring.gens("lam", "mu")
    ei, ej, ek = alg.gen(i), alg.gen(j), alg.gen(k)
    lhs = bracket(alg, ei, lam, bracket(alg, ej, mu, ek))
    r1 = bracket(alg, bracket(alg, ei, lam, ej), lam + mu, ek)
    r2 = bracket(alg, ej, mu, bracket(alg, ei, lam, ek))
    s = sign((alg.parities[i], alg.parities[j]))
    return tuple(a - b - s * c for a, b, c in zip(lhs, r1, r2))


def check_jacobi(alg: LcsAlgebra) -> Report:
    rep = Report("jacobi", alg.name)
    triples = list(product(range(alg.n), repeat=3))

    def one(t):
        res = jacobi_residual(alg, *t)
        loc = tuple(alg.gens[x] for x in t)
        return 1, [(loc, alg.gens[m], r) for m, r in enumerate(res) if not r.is_zero()]

    for checked, bad in ordered_map(one, triples):
        rep.checked += checked
        for loc, comp, r in bad:
            rep.add(loc, comp, r)
    return rep


def check_parity_closure(alg: LcsAlgebra) -> Report:
    rep = Report("parity-closure", alg.name)
    for i, j in product(range(alg.n), repeat=2):
        rep.checked += 1
        target = alg.parities[i] + alg.parities[j]
        for k, c in enumerate(alg.table[i][j]):
            if not c.is_zero() and alg.parities[k] != target:
                rep.add((alg.gens[i], alg.gens[j]), alg.gens[k], c)
    return rep


def check_axioms(alg: LcsAlgebra) -> list:
    return [check_parity_closure(alg), check_skew_symmetry(alg), check_jacobi(alg)]


def make_algebra(name: str, gens: Sequence[str], parities: Sequence, brackets: Mapping,
                 params: Sequence = (), complete: bool = True) -> LcsAlgebra:
    """Build an algebra from ``{(a, b): {c: poly}}``.

    With ``complete`` the transpose of every listed pair that is not itself
    listed is filled in by skew-symmetry.
    """
    specs = tuple(p if isinstance(p, ParamSpec) else ParamSpec(p) for p in params)
    ring = standard_ring([p.name for p in specs])
    gens = tuple(gens)
    n = len(gens)
    pars = tuple(Parity.parse(p) for p in parities)
    idx = {g: k for k, g in enumerate(gens)}
    table = [[[ring.zero()] * n for _ in range(n)] for _ in range(n)]
    given = set()
    for (a, b), vec in brackets.items():
        i, j = idx[a], idx[b]
        given.add((i, j))
        for c, poly in vec.items():
            table[i][j][idx[c]] = as_poly(ring, poly)
    if complete:
        d, lam = ring.gens("del", "lam")
        for (i, j) in list(given):
            if (j, i) in given:
                continue
            s = sign((pars[i], pars[j]))
            table[j][i] = [-s * c.substitute({"lam": -d - lam}) for c in table[i][j]]
    frozen = tuple(tuple(tuple(v) for v in row) for row in table)
    return LcsAlgebra(name, gens, pars, frozen, ring, specs)
