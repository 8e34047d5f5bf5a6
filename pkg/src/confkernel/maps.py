"""Conformal linear maps, derivations, and del-commuting homomorphisms."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .lcsa import (LcsAlgebra, ParamSpec, Parity, as_poly, bracket, lambda_poly, shift, sign)
from .poly import Polynomial, Ring
from .report import Report, ordered_map
from .textformat import (FormatError, check_ident, format_combination, logical_lines, param_header,
                         parse_combination, read_text, split_assignment, write_text)


class ShapeError(ValueError):
    pass


class ParityMismatchError(ValueError):
    pass


def _matrix(ring: Ring, rows) -> tuple:
    return tuple(tuple(as_poly(ring, c) for c in row) for row in rows)


def _union(*rings: Ring) -> Ring:
    out = rings[0]
    for r in rings[1:]:
        out = out.union(r)
    return out


@dataclass(frozen=True, eq=False)
class ConformalEnd:
    """phi_lam e_i = sum_j matrix[i][j](del, lam) e_j, shifting parity by ``parity``."""

    parity: Parity
    matrix: tuple
    ring: Ring
    name: str = "phi"

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity.parse(self.parity))
        object.__setattr__(self, "matrix", _matrix(self.ring, self.matrix))
        n = len(self.matrix)
        if any(len(r) != n for r in self.matrix):
            raise ShapeError("map matrix must be square")

    @property
    def n(self) -> int:
        return len(self.matrix)

    def over(self, ring: Ring) -> "ConformalEnd":
        if ring == self.ring:
            return self
        return ConformalEnd(self.parity, tuple(tuple(c.to_ring(ring) for c in r) for r in self.matrix), ring, self.name)

    def parity_violations(self, alg: LcsAlgebra) -> list:
        out = []
        for i, j in product(range(self.n), repeat=2):
            if not self.matrix[i][j].is_zero() and alg.parities[j] != alg.parities[i] + self.parity:
                out.append((alg.gens[i], alg.gens[j]))
        return out

    def __eq__(self, other):
        return (isinstance(other, ConformalEnd) and self.parity == other.parity
                and self.ring == other.ring and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.parity, self.matrix))

    def is_zero(self) -> bool:
        return all(c.is_zero() for r in self.matrix for c in r)


@dataclass(frozen=True, eq=False)
class PartialEndo:
    """Degree-zero map commuting with del: sigma(e_i) = sum_j matrix[i][j](del) e_j."""

    matrix: tuple
    ring: Ring
    name: str = "sigma"

    def __post_init__(self):
        object.__setattr__(self, "matrix", _matrix(self.ring, self.matrix))
        n = len(self.matrix)
        if any(len(r) != n for r in self.matrix):
            raise ShapeError("map matrix must be square")
        for r in self.matrix:
            for c in r:
                if c.variables() & set(self.ring.lambdas):
                    raise ValueError(f"entry {c} of a del-linear map may not use lambda variables")

    @property
    def n(self) -> int:
        return len(self.matrix)

    def over(self, ring: Ring) -> "PartialEndo":
        if ring == self.ring:
            return self
        return PartialEndo(tuple(tuple(c.to_ring(ring) for c in r) for r in self.matrix), ring, self.name)

    def __eq__(self, other):
        return isinstance(other, PartialEndo) and self.ring == other.ring and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def image(self, x: Sequence) -> tuple:
        """sigma(sum_k c_k e_k) with coefficients treated as scalars in del."""
        ring = self.ring
        out = [ring.zero()] * self.n
        for k, c in enumerate(x):
            if c.is_zero():
                continue
            for m, s in enumerate(self.matrix[k]):
                if not s.is_zero():
                    out[m] = out[m] + c * s
        return tuple(out)


def end_from_images(alg: LcsAlgebra, images: Mapping, parity=0, params: Sequence[str] = (),
                    name: str = "phi") -> ConformalEnd:
    """Build a map from ``{gen: {gen: poly}}``; unspecified generators map to 0."""
    ring = alg.ring.with_params(*params)
    rows = []
    for g in alg.gens:
        img = images.get(g, {})
        rows.append([as_poly(ring, img.get(h, 0)) for h in alg.gens])
    return ConformalEnd(Parity.parse(parity), tuple(map(tuple, rows)), ring, name)


def endo_from_images(alg: LcsAlgebra, images: Mapping, params: Sequence[str] = (),
                     name: str = "sigma") -> PartialEndo:
    """Generators not mentioned are fixed."""
    ring = alg.ring.with_params(*params)
    rows = []
    for g in alg.gens:
        img = images.get(g, {g: 1})
        rows.append([as_poly(ring, img.get(h, 0)) for h in alg.gens])
    return PartialEndo(tuple(map(tuple, rows)), ring, name)


def identity(alg: LcsAlgebra) -> PartialEndo:
    return endo_from_images(alg, {}, name="id")


# ---- application ------------------------------------------------------------

def apply(phi: ConformalEnd, lv, x: Sequence) -> tuple:
    """phi_lv(x) with phi_lv(p(del) v) = p(del + lv) phi_lv(v)."""
    ring = phi.ring
    lvp = lambda_poly(ring, lv)
    x = [as_poly(ring, c) for c in x]
    d = ring.var("del")
    out = [ring.zero()] * phi.n
    for p, c in enumerate(x):
        if c.is_zero():
            continue
        cs = shift(c, lvp)
        for m, e in enumerate(phi.matrix[p]):
            if not e.is_zero():
                out[m] = out[m] + cs * e.substitute({"del": d, "lam": lvp})
    return tuple(out)


def ad(alg: LcsAlgebra, x: Sequence) -> ConformalEnd:
    """The inner map b -> [x_lam b]."""
    par = alg.element_parity(x)
    if any(c.variables() & set(alg.ring.lambdas) for c in x):
        raise ValueError("ad needs an element with coefficients in del only")
    rows = tuple(bracket(alg, x, "lam", alg.gen(j)) for j in range(alg.n))
    return ConformalEnd(par if par is not None else Parity.EVEN, rows, alg.ring, "ad")


def derivation_residual(alg: LcsAlgebra, d: ConformalEnd, i: int, j: int) -> tuple:
    ring = alg.ring
    lam, mu = ring.gens("lam", "mu")
    ei, ej = alg.gen(i), alg.gen(j)
    lhs = apply(d, lam, bracket(alg, ei, mu, ej))
    r1 = bracket(alg, apply(d, lam, ei), lam + mu, ej)
    r2 = bracket(alg, ei, mu, apply(d, lam, ej))
    s = sign((alg.parities[i], d.parity))
    return tuple(a - b - s * c for a, b, c in zip(lhs, r1, r2))


def is_derivation(alg: LcsAlgebra, d: ConformalEnd) -> Report:
    if d.n != alg.n:
        raise ShapeError("map and algebra sizes differ")
    ring = _union(alg.ring, d.ring)
    alg, d = alg.over(ring), d.over(ring)
    rep = Report("derivation", f"{d.name} on {alg.name}")
    for loc in d.parity_violations(alg):
        rep.add(loc, "parity", "entry breaks the declared parity")

    def one(pair):
        i, j = pair
        res = derivation_residual(alg, d, i, j)
        return 1, [((alg.gens[i], alg.gens[j]), alg.gens[k], r) for k, r in enumerate(res) if not r.is_zero()]

    for checked, bad in ordered_map(one, list(product(range(alg.n), repeat=2))):
        rep.checked += checked
        for loc, comp, r in bad:
            rep.add(loc, comp, r)
    return rep


# ---- homomorphisms ------------------------------------------------------------

def _check_graded(sigma: PartialEndo, src: LcsAlgebra, dst: LcsAlgebra) -> None:
    if sigma.n != src.n or src.n != dst.n:
        raise ShapeError("map and algebra sizes differ")
    if src.parities != dst.parities:
        raise ParityMismatchError("algebras have different generator parities")
    for i, j in product(range(sigma.n), repeat=2):
        if not sigma.matrix[i][j].is_zero() and src.parities[i] != dst.parities[j]:
            raise ParityMismatchError(f"{sigma.name} sends {src.gens[i]} into {dst.gens[j]} of another parity")


def is_homomorphism(sigma: PartialEndo, src: LcsAlgebra, dst: LcsAlgebra | None = None) -> Report:
    dst = dst or src
    _check_graded(sigma, src, dst)
    ring = _union(src.ring, dst.ring, sigma.ring)
    src, dst, sigma = src.over(ring), dst.over(ring), sigma.over(ring)
    rep = Report("homomorphism", f"{sigma.name}: {src.name} -> {dst.name}")
    lam = ring.var("lam")
    images = [sigma.image(src.gen(i)) for i in range(src.n)]

    def one(pair):
        i, j = pair
        lhs = sigma.image(src.table[i][j])
        rhs = bracket(dst, images[i], lam, images[j])
        res = [a - b for a, b in zip(lhs, rhs)]
        return 1, [((src.gens[i], src.gens[j]), dst.gens[k], r) for k, r in enumerate(res) if not r.is_zero()]

    for checked, bad in ordered_map(one, list(product(range(src.n), repeat=2))):
        rep.checked += checked
        for loc, comp, r in bad:
            rep.add(loc, comp, r)
    return rep


def determinant(rows: Sequence[Sequence[Polynomial]], ring: Ring) -> Polynomial:
    """Cofactor expansion; blocks here are tiny."""
    n = len(rows)
    if n == 0:
        return ring.one()
    if n == 1:
        return rows[0][0]
    total = ring.zero()
    for j, c in enumerate(rows[0]):
        if c.is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = c * determinant(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def block_determinants(sigma: PartialEndo, alg: LcsAlgebra) -> dict:
    out = {}
    for par in (Parity.EVEN, Parity.ODD):
        idx = [k for k, p in enumerate(alg.parities) if p == par]
        block = [[sigma.matrix[i][j] for j in idx] for i in idx]
        out[par] = determinant(block, sigma.ring)
    return out


def is_automorphism(sigma: PartialEndo, alg: LcsAlgebra) -> Report:
    rep = is_homomorphism(sigma, alg, alg)
    rep.check = "automorphism"
    for par, det in block_determinants(sigma, alg).items():
        rep.checked += 1
        if not det.is_constant() or det.is_zero():
            rep.add((par.word,), "determinant", det)
        else:
            rep.notes.append(f"{par.word} block determinant {det}")
    return rep


def compose(s1: PartialEndo, s2: PartialEndo) -> PartialEndo:
    """Matrix of s1 o s2 (apply s2 first)."""
    if s1.n != s2.n:
        raise ShapeError("composition of maps of different sizes")
    ring = _union(s1.ring, s2.ring)
    a, b = s1.over(ring), s2.over(ring)
    n = a.n
    rows = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = ring.zero()
            for j in range(n):
                acc = acc + b.matrix[i][j] * a.matrix[j][k]
            row.append(acc)
        rows.append(tuple(row))
    return PartialEndo(tuple(rows), ring, f"{s1.name}*{s2.name}")


def compose_end(phi: ConformalEnd, psi: ConformalEnd, outer: str = "lam", inner: str = "mu") -> ConformalEnd:
    """Matrix of v -> phi_outer(psi_inner v); entries live in (del, outer, inner)."""
    if phi.n != psi.n:
        raise ShapeError("composition of maps of different sizes")
    ring = _union(phi.ring, psi.ring)
    phi, psi = phi.over(ring), psi.over(ring)
    lo, li = ring.var(outer), ring.var(inner)
    d = ring.var("del")
    psi_rows = [[c.substitute({"lam": li}) for c in row] for row in psi.matrix]
    rows = []
    for i in range(phi.n):
        vec = [ring.zero()] * phi.n
        for j, c in enumerate(psi_rows[i]):
            if c.is_zero():
                continue
            cs = shift(c, lo)
            for k, e in enumerate(phi.matrix[j]):
                if not e.is_zero():
                    vec[k] = vec[k] + cs * e.substitute({"del": d, "lam": lo})
        rows.append(tuple(vec))
    return ConformalEnd(phi.parity + psi.parity, tuple(rows), ring, f"{phi.name}*{psi.name}")


# ---- named automorphism families ---------------------------------------------

def _fmt(v) -> str:
    return f"({v})"


def _symbols(*values) -> list:
    """Arguments given as identifiers become symbolic parameters."""
    return [v for v in values if isinstance(v, str) and v.isidentifier()]


def hvs_auto(alg: LcsAlgebra, c, g0, g1) -> PartialEndo:
    """L -> L + (g0 + g1 del) H, H -> c^2 H, odd generator -> c times itself."""
    odd = alg.gens[2]
    return endo_from_images(alg, {
        "L": {"L": 1, "H": f"{_fmt(g0)} + {_fmt(g1)}*del"},
        "H": {"H": f"{_fmt(c)}^2"},
        odd: {odd: _fmt(c)},
    }, params=_symbols(c, g0, g1), name=f"hvs_auto({c},{g0},{g1})")


def rescale(alg: LcsAlgebra, c) -> PartialEndo:
    return hvs_auto(alg, c, 0, 0)


def translate_const(alg: LcsAlgebra, eta) -> PartialEndo:
    return hvs_auto(alg, 1, eta, 0)


def translate_deriv(alg: LcsAlgebra, eta) -> PartialEndo:
    return hvs_auto(alg, 1, 0, eta)


def hvs2_auto(alg: LcsAlgebra, c, g0, g1, h) -> PartialEndo:
    """L -> L + (g0 + g1 del) H, H -> c^2 H, E -> h E."""
    return endo_from_images(alg, {
        "L": {"L": 1, "H": f"{_fmt(g0)} + {_fmt(g1)}*del"},
        "H": {"H": f"{_fmt(c)}^2"},
        "E": {"E": _fmt(h)},
    }, params=_symbols(c, g0, g1, h), name=f"hvs2_auto({c},{g0},{g1},{h})")


def scale_odd(alg: LcsAlgebra, h) -> PartialEndo:
    """Fix L, H and scale the odd generator."""
    return hvs2_auto(alg, 1, 0, 0, h)


def scale_heisenberg(alg: LcsAlgebra, c) -> PartialEndo:
    """H -> c^2 H with L and E fixed."""
    return hvs2_auto(alg, c, 0, 0, 1)


def inverse_hvs_auto(alg: LcsAlgebra, c, g0, g1) -> PartialEndo:
    from fractions import Fraction

    c, g0, g1 = Fraction(c), Fraction(g0), Fraction(g1)
    return hvs_auto(alg, 1 / c, -g0 / c ** 2, -g1 / c ** 2)


# ---- file format ---------------------------------------------------------------

def dumps_map(m, alg: LcsAlgebra) -> str:
    par = m.parity.word if isinstance(m, ConformalEnd) else "even"
    lines = [f"map {m.name} parity {par}"]
    lines += param_header([ParamSpec(p) for p in m.ring.params if p not in alg.ring.params])
    for g, row in zip(alg.gens, m.matrix):
        lines.append(f"image {g} = {format_combination(row, alg.gens)}")
    return "\n".join(lines) + "\n"


def _loads_generic(text: str, alg: LcsAlgebra, forbid_lambda: bool):
    name, parity, params, images = None, None, [], {}
    for no, line in logical_lines(text):
        word = line.split(None, 1)[0]
        if word == "map":
            parts = line.split()
            if len(parts) != 4 or parts[2] != "parity" or name is not None:
                raise FormatError("expected 'map <name> parity even|odd'", no)
            name = parts[1]
            try:
                parity = Parity.parse(parts[3])
            except ValueError as exc:
                raise FormatError(str(exc), no) from exc
        elif word == "params":
            parts = line.split()
            if len(parts) != 2:
                raise FormatError("expected 'params <ident>'", no)
            params.append(check_ident(parts[1], no))
        elif word == "image":
            head, rhs = split_assignment(line, no)
            if len(head) != 2 or head[1] not in alg.gens:
                raise FormatError("expected 'image <gen> = ...' with a generator of the algebra", no)
            if head[1] in images:
                raise FormatError(f"image of {head[1]} given twice", no)
            images[head[1]] = (no, rhs)
        else:
            raise FormatError(f"unknown directive {word!r}", no)
    if name is None:
        raise FormatError("missing 'map <name> parity ...' header")
    ring = alg.ring.with_params(*params)
    forbid = ring.lambdas if forbid_lambda else ("mu", "nu")
    rows = []
    for g in alg.gens:
        if g in images:
            no, rhs = images[g]
            combo = parse_combination(rhs, ring, alg.gens, no, forbid=forbid)
        else:
            combo = {}
        rows.append(tuple(combo.get(h, ring.zero()) for h in alg.gens))
    return name, parity, tuple(rows), ring


def loads_map(text: str, alg: LcsAlgebra) -> ConformalEnd:
    name, parity, rows, ring = _loads_generic(text, alg, False)
    return ConformalEnd(parity, rows, ring, name)


def loads_endo(text: str, alg: LcsAlgebra) -> PartialEndo:
    name, parity, rows, ring = _loads_generic(text, alg, True)
    if parity != Parity.EVEN:
        raise FormatError("a del-linear map must have parity even")
    return PartialEndo(rows, ring, name)


def load_map(path, alg: LcsAlgebra) -> ConformalEnd:
    return loads_map(read_text(path), alg)


def load_endo(path, alg: LcsAlgebra) -> PartialEndo:
    return loads_endo(read_text(path), alg)


def save_map(m, alg: LcsAlgebra, path) -> None:
    write_text(path, dumps_map(m, alg))
