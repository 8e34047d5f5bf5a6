"""Conformal bilinear maps and biderivations."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .lcsa import (LcsAlgebra, ParamSpec, Parity, as_poly, bracket, lambda_poly, sesquilinear, sign)
from .maps import ShapeError, _union
from .poly import Ring
from .report import Report, ordered_map
from .textformat import (FormatError, check_ident, format_combination, logical_lines, param_header,
                         parse_combination, read_text, split_assignment, write_text)


@dataclass(frozen=True, eq=False)
class ConformalBiMap:
    """phi_lam(e_i, e_j) = sum_k F[i][j][k](del, lam) e_k, of parity ``parity``.

    Extended to elements like the bracket: phi_lam(p(del) a, q(del) b) =
    p(-lam) q(del + lam) phi_lam(a, b).
    """

    parity: Parity
    F: tuple
    ring: Ring
    name: str = "phi"

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity.parse(self.parity))
        F = tuple(tuple(tuple(as_poly(self.ring, c) for c in vec) for vec in row) for row in self.F)
        n = len(F)
        if any(len(row) != n or any(len(v) != n for v in row) for row in F):
            raise ShapeError("bilinear map needs an n x n table of length-n vectors")
        for row in F:
            for vec in row:
                for c in vec:
                    if c.variables() & {"mu", "nu"}:
                        raise ValueError(f"entry {c} may only use del and lam")
        object.__setattr__(self, "F", F)

    @property
    def n(self) -> int:
        return len(self.F)

    def over(self, ring: Ring) -> "ConformalBiMap":
        if ring == self.ring:
            return self
        F = tuple(tuple(tuple(c.to_ring(ring) for c in v) for v in row) for row in self.F)
        return ConformalBiMap(self.parity, F, ring, self.name)

    def __eq__(self, other):
        return (isinstance(other, ConformalBiMap) and self.parity == other.parity
                and self.ring == other.ring and self.F == other.F)

    def __hash__(self):
        return hash((self.parity, self.F))

    def is_zero(self) -> bool:
        return all(c.is_zero() for row in self.F for v in row for c in v)

    def parity_violations(self, alg: LcsAlgebra) -> list:
        out = []
        P = alg.parities
        for i, j, k in product(range(self.n), repeat=3):
            if not self.F[i][j][k].is_zero() and P[k] != P[i] + P[j] + self.parity:
                out.append(((alg.gens[i], alg.gens[j]), alg.gens[k]))
        return out

    def scaled(self, c) -> "ConformalBiMap":
        F = tuple(tuple(tuple(x * c for x in v) for v in row) for row in self.F)
        return ConformalBiMap(self.parity, F, self.ring, self.name)

    @staticmethod
    def from_assignment(alg: LcsAlgebra, parity, names: Mapping, assignment: Mapping,
                        name: str = "phi") -> "ConformalBiMap":
        z = alg.ring.zero()
        n = alg.n
        F = tuple(tuple(tuple(assignment.get(names[(a, b, c)], z) if (a, b, c) in names else z
                              for c in range(n)) for b in range(n)) for a in range(n))
        return ConformalBiMap(parity, F, alg.ring, name)

    @staticmethod
    def from_values(alg: LcsAlgebra, values: Mapping, parity=0, params: Sequence[str] = (),
                    name: str = "phi") -> "ConformalBiMap":
        """Build from ``{(gen_a, gen_b): {gen_c: poly}}``; unspecified pairs are zero."""
        ring = alg.ring.with_params(*params) if params else alg.ring
        n = alg.n
        F = [[[ring.zero()] * n for _ in range(n)] for _ in range(n)]
        for (a, b), combo in values.items():
            for c, p in combo.items():
                F[alg.index(a)][alg.index(b)][alg.index(c)] = as_poly(ring, p)
        return ConformalBiMap(parity, F, ring, name)


def evaluate(phi: ConformalBiMap, x: Sequence, lv, y: Sequence) -> tuple:
    """phi_lv(x, y) for elements x, y."""
    ring = phi.ring
    lvp = lambda_poly(ring, lv)

    def table_fn(i, j, d, l):
        return tuple(c.substitute({"del": d, "lam": l}) for c in phi.F[i][j])

    x = [as_poly(ring, c) for c in x]
    y = [as_poly(ring, c) for c in y]
    return sesquilinear(table_fn, ring, phi.n, x, lvp, y)


def inner_bider(alg: LcsAlgebra, eps=1) -> ConformalBiMap:
    """phi_lam(a, b) = eps [a_lam b]; ``eps`` may be a rational or a parameter name."""
    ring = alg.ring
    if isinstance(eps, str) and eps.isidentifier():
        ring = ring.with_params(eps)
        scale = ring.var(eps)
    else:
        scale = as_poly(ring, eps)
    F = tuple(tuple(tuple(c.to_ring(ring) * scale for c in v) for v in row) for row in alg.table)
    return ConformalBiMap(Parity.EVEN, F, ring, "inner")


def _prepare(alg: LcsAlgebra, phi: ConformalBiMap) -> tuple:
    if phi.n != alg.n:
        raise ShapeError("map and algebra sizes differ")
    ring = _union(alg.ring, phi.ring)
    return alg.over(ring), phi.over(ring)


def skew_residual(alg: LcsAlgebra, phi: ConformalBiMap, a: int, b: int) -> tuple:
    ring = phi.ring
    d, lam = ring.gens("del", "lam")
    s = sign((alg.parities[a], alg.parities[b]))
    back = tuple(c.substitute({"lam": -d - lam}) for c in phi.F[b][a])
    return tuple(x + s * y for x, y in zip(phi.F[a][b], back))


def leibniz_residual(alg: LcsAlgebra, phi: ConformalBiMap, a: int, b: int, c: int) -> tuple:
    """phi_lam(a, [b_mu c]) - [phi_lam(a, b)_{lam+mu} c] - s [b_mu phi_lam(a, c)].

    ``s = (-1)^((|a| + parity)|b|)``: the map phi_lam(a, -) has parity
    |a| + parity and is moved past b.
    """
    ring = phi.ring
    lam, mu = ring.gens("lam", "mu")
    ea, eb, ec = alg.gen(a), alg.gen(b), alg.gen(c)
    lhs = evaluate(phi, ea, lam, bracket(alg, eb, mu, ec))
    r1 = bracket(alg, evaluate(phi, ea, lam, eb), lam + mu, ec)
    r2 = bracket(alg, eb, mu, evaluate(phi, ea, lam, ec))
    s = sign((alg.parities[a] + phi.parity, alg.parities[b]))
    return tuple(x - y - s * z for x, y, z in zip(lhs, r1, r2))


def is_biderivation(alg: LcsAlgebra, phi: ConformalBiMap) -> Report:
    """Skew-symmetry on generator pairs and the Leibniz rule on generator triples."""
    alg, phi = _prepare(alg, phi)
    rep = Report("biderivation", f"{phi.name} on {alg.name}")
    for loc, comp in phi.parity_violations(alg):
        rep.add(loc, comp, "entry breaks the declared parity")
    g = alg.gens
    for a, b in product(range(alg.n), repeat=2):
        rep.checked += 1
        for k, r in enumerate(skew_residual(alg, phi, a, b)):
            if not r.is_zero():
                rep.add(("skew", g[a], g[b]), g[k], r)

    def one(t):
        res = leibniz_residual(alg, phi, *t)
        loc = ("leibniz",) + tuple(g[x] for x in t)
        return 1, [(loc, g[k], r) for k, r in enumerate(res) if not r.is_zero()]

    for checked, bad in ordered_map(one, list(product(range(alg.n), repeat=3))):
        rep.checked += checked
        for loc, comp, r in bad:
            rep.add(loc, comp, r)
    return rep


def lemma51_residual(alg: LcsAlgebra, phi: ConformalBiMap, a: int, b: int, c: int, d: int) -> tuple:
    """[phi_lam(a, b)_{lam+nu} [c_mu d]] - [[a_lam b]_{lam+nu} phi_mu(c, d)]."""
    ring = phi.ring
    lam, mu, nu = ring.gens("lam", "mu", "nu")
    ea, eb, ec, ed = (alg.gen(x) for x in (a, b, c, d))
    lhs = bracket(alg, evaluate(phi, ea, lam, eb), lam + nu, bracket(alg, ec, mu, ed))
    rhs = bracket(alg, bracket(alg, ea, lam, eb), lam + nu, evaluate(phi, ec, mu, ed))
    return tuple(x - y for x, y in zip(lhs, rhs))


def check_lemma51(alg: LcsAlgebra, phi: ConformalBiMap) -> Report:
    """Consequence of the biderivation axioms relating phi to the bracket on 4-tuples.

    If phi is not a biderivation the violation is recorded as a failure at
    location ("precondition",) in addition to the identity's own residuals.
    """
    alg, phi = _prepare(alg, phi)
    rep = Report("bider-consequence", f"{phi.name} on {alg.name}")
    pre = is_biderivation(alg, phi)
    if not pre.passed:
        rep.add(("precondition",), "biderivation", f"map is not a biderivation ({len(pre.residuals)} residuals)")
        rep.notes.append("precondition violated: map is not a biderivation")
    g = alg.gens

    def one(t):
        res = lemma51_residual(alg, phi, *t)
        loc = tuple(g[x] for x in t)
        return 1, [(loc, g[k], r) for k, r in enumerate(res) if not r.is_zero()]

    for checked, bad in ordered_map(one, list(product(range(alg.n), repeat=4))):
        rep.checked += checked
        for loc, comp, r in bad:
            rep.add(loc, comp, r)
    return rep


# ---- file format ---------------------------------------------------------------

def dumps_bimap(phi: ConformalBiMap, alg: LcsAlgebra) -> str:
    lines = [f"bimap {phi.name} parity {phi.parity.word}"]
    lines += param_header([ParamSpec(p) for p in phi.ring.params if p not in alg.ring.params])
    for a, b in product(range(alg.n), repeat=2):
        vec = phi.F[a][b]
        if any(not c.is_zero() for c in vec):
            lines.append(f"value {alg.gens[a]} {alg.gens[b]} = {format_combination(vec, alg.gens)}")
    return "\n".join(lines) + "\n"


def loads_bimap(text: str, alg: LcsAlgebra) -> ConformalBiMap:
    """Read a bilinear map; pairs not listed are zero (no skew completion)."""
    name, parity, params, values = None, None, [], {}
    for no, line in logical_lines(text):
        word = line.split(None, 1)[0]
        if word == "bimap":
            parts = line.split()
            if name is not None or len(parts) not in (2, 4) or (len(parts) == 4 and parts[2] != "parity"):
                raise FormatError("expected 'bimap <name> [parity even|odd]'", no)
            name = parts[1]
            if len(parts) == 4:
                try:
                    parity = Parity.parse(parts[3])
                except ValueError as exc:
                    raise FormatError(str(exc), no) from exc
        elif word == "params":
            parts = line.split()
            if len(parts) != 2:
                raise FormatError("expected 'params <ident>'", no)
            params.append(check_ident(parts[1], no))
        elif word == "value":
            head, rhs = split_assignment(line, no)
            if len(head) != 3 or head[1] not in alg.gens or head[2] not in alg.gens:
                raise FormatError("expected 'value <gen> <gen> = ...'", no)
            key = (head[1], head[2])
            if key in values:
                raise FormatError(f"value of {key} given twice", no)
            values[key] = (no, rhs)
        else:
            raise FormatError(f"unknown directive {word!r}", no)
    if name is None:
        raise FormatError("missing 'bimap <name>' header")
    ring = alg.ring.with_params(*params)
    combos = {}
    for key, (no, rhs) in values.items():
        combos[key] = parse_combination(rhs, ring, alg.gens, no, forbid=("mu", "nu"))
    if parity is None:
        parity = Parity.EVEN
        for (a, b), combo in combos.items():
            nz = [c for c, p in combo.items() if not p.is_zero()]
            if nz:
                parity = alg.parity(nz[0]) + alg.parity(a) + alg.parity(b)
                break
    return ConformalBiMap.from_values(alg.over(ring), combos, parity, name=name)


def load_bimap(path, alg: LcsAlgebra) -> ConformalBiMap:
    return loads_bimap(read_text(path), alg)


def save_bimap(phi: ConformalBiMap, alg: LcsAlgebra, path) -> None:
    write_text(path, dumps_bimap(phi, alg))
