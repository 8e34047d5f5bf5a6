"""Bounded-degree ansatz solving for linear functional equations.

Unknown polynomials are expanded over a finite monomial basis; every equation
is a sum of terms ``coeff * U(s_1, ..., s_k)`` with ``U`` an unknown and the
``s_i`` polynomial substitutions for its variables.  Expanding and comparing
coefficients of ambient monomials gives a rational matrix whose nullspace is
the solution space.  Every returned basis element is re-checked by direct
substitution into the original equations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from . import linalg
from .lcsa import LcsAlgebra, Parity, sign
from .poly import Polynomial, Ring, Role


class SymbolicParameterError(ValueError):
    """A solver was handed an expression that still contains a free parameter."""


class SolverError(ValueError):
    pass


class VerificationError(AssertionError):
    """A computed basis element failed the independent substitution check."""


@dataclass(frozen=True)
class UnknownPoly:
    name: str
    variables: tuple
    bounds: tuple
    total: int | None = None

    def __post_init__(self):
        if len(self.variables) != len(self.bounds):
            raise ValueError("one degree bound per variable")
        if any(b < 0 for b in self.bounds):
            raise ValueError("degree bounds must be non-negative")

    def monomials(self) -> list:
        """Exponent tuples within bounds, graded-lex descending."""
        out = [e for e in product(*(range(b + 1) for b in self.bounds))
               if self.total is None or sum(e) <= self.total]
        out.sort(key=lambda e: (sum(e), e), reverse=True)
        return out


@dataclass(frozen=True)
class LinearTermRef:
    """``coeff * unknown(subst[v] for v in the unknown's variables)``.

    ``subst`` maps variable names to ambient polynomials; a missing variable
    is substituted by the ambient indeterminate of the same name.
    """

    unknown: str
    subst: tuple
    coeff: Polynomial

    @staticmethod
    def make(unknown: str, coeff: Polynomial, **subst) -> "LinearTermRef":
        return LinearTermRef(unknown, tuple(sorted(subst.items())), coeff)


@dataclass
class LinearSystem:
    ring: Ring
    unknowns: list = field(default_factory=list)
    equations: list = field(default_factory=list)
    labels: list = field(default_factory=list)

    def unknown(self, u: UnknownPoly) -> UnknownPoly:
        self.unknowns.append(u)
        return u

    def add(self, terms: Iterable[LinearTermRef], label=None) -> None:
        terms = [t for t in terms if not t.coeff.is_zero()]
        if terms:
            self.equations.append(terms)
            self.labels.append(label)

    def reordered(self, eq_order: Sequence[int] | None = None, unknown_order: Sequence[int] | None = None) -> "LinearSystem":
        eqs = list(range(len(self.equations))) if eq_order is None else list(eq_order)
        uks = list(range(len(self.unknowns))) if unknown_order is None else list(unknown_order)
        return LinearSystem(self.ring, [self.unknowns[i] for i in uks],
                            [self.equations[i] for i in eqs], [self.labels[i] for i in eqs])


@dataclass
class SolutionBasis:
    ring: Ring
    unknowns: tuple
    vectors: list
    stats: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def as_strings(self) -> list:
        return [{u: str(v[u]) for u in self.unknowns if not v[u].is_zero()} for v in self.vectors]

    def span_key(self, order: Sequence[str] | None = None) -> tuple:
        """Canonical description of the span, independent of how it was computed."""
        order = list(order or sorted(self.unknowns))
        return span_canonical(self.vectors, order, self.ring)


def span_canonical(vectors: Sequence[Mapping], order: Sequence[str], ring: Ring) -> tuple:
    cols: dict = {}
    rows = []
    for vec in vectors:
        row = {}
        for u in order:
            p = vec.get(u)
            if p is None:
                continue
            for exps, c in p.items():
                key = (u, exps)
                if key not in cols:
                    cols[key] = None
                row[key] = c
        rows.append(row)
    keys = sorted({k for r in rows for k in r}, key=lambda k: (order.index(k[0]), [-x for x in (sum(k[1]),) + k[1]]))
    index = {k: i for i, k in enumerate(keys)}
    basis = linalg.canonical_basis([{index[k]: v for k, v in r.items()} for r in rows], len(keys))
    return tuple(tuple((keys[c], v) for c, v in sorted(b.items())) for b in basis)


# ---- assembly ---------------------------------------------------------------------

def _ensure_numeric(ring: Ring, polys: Iterable[Polynomial]) -> None:
    for p in polys:
        if p.uses_role(Role.PARAMETER):
            raise SymbolicParameterError(f"expression {p} contains a free parameter; instantiate it first")


class _Assembler:
    def __init__(self, system: LinearSystem):
        self.system = system
        self.ring = system.ring
        self.unknowns = {u.name: u for u in system.unknowns}
        self.columns: list = []
        self.colindex: dict = {}
        for u in system.unknowns:
            for m in u.monomials():
                self.colindex[(u.name, m)] = len(self.columns)
                self.columns.append((u.name, m))
        self._powers: dict = {}

    def power(self, p: Polynomial, e: int) -> Polynomial:
        if e == 0:
            return self.ring.one()
        if e == 1:
            return p
        key = (p, e)
        hit = self._powers.get(key)
        if hit is None:
            hit = self.power(p, e - 1) * p
            self._powers[key] = hit
        return hit

    def term_subst(self, t: LinearTermRef) -> list:
        u = self.unknowns[t.unknown]
        given = dict(t.subst)
        return [given[v] if v in given else self.ring.var(v) for v in u.variables]

    def rows(self) -> list:
        out = []
        for terms in self.system.equations:
            acc: dict = {}
            for t in terms:
                if t.unknown not in self.unknowns:
                    raise SolverError(f"undeclared unknown {t.unknown!r}")
                u = self.unknowns[t.unknown]
                subs = self.term_subst(t)
                for m in u.monomials():
                    poly = t.coeff
                    for s, e in zip(subs, m):
                        if e:
                            poly = poly * self.power(s, e)
                    col = self.colindex[(u.name, m)]
                    for exps, c in poly._terms.items():
                        row = acc.get(exps)
                        if row is None:
                            row = acc[exps] = {}
                        v = row.get(col, 0) + c
                        if v:
                            row[col] = v
                        else:
                            del row[col]
            out.extend(r for r in acc.values() if r)
        return out

    def to_assignment(self, vec: Mapping) -> dict:
        ring = self.ring
        terms: dict = {u.name: {} for u in self.system.unknowns}
        for col, v in vec.items():
            name, m = self.columns[col]
            u = self.unknowns[name]
            e = [0] * ring.arity
            for var, k in zip(u.variables, m):
                e[ring.index(var)] = k
            terms[name][tuple(e)] = v
        return {name: Polynomial(ring, t) for name, t in terms.items()}


def evaluate(system: LinearSystem, assignment: Mapping) -> list:
    """Left-hand sides of all equations under ``assignment`` (all zero iff a solution)."""
    ring = system.ring
    unknowns = {u.name: u for u in system.unknowns}
    out = []
    for terms in system.equations:
        acc = ring.zero()
        for t in terms:
            u = unknowns[t.unknown]
            p = assignment.get(t.unknown, ring.zero())
            if p.is_zero():
                continue
            given = dict(t.subst)
            binds = {v: given[v] for v in u.variables if v in given}
            acc = acc + t.coeff * p.substitute(binds)
        out.append(acc)
    return out


def solve(system: LinearSystem, verify: bool = True) -> SolutionBasis:
    """Exact solution space of ``system`` within the declared monomial bounds."""
    if not system.unknowns:
        raise SolverError("linear system has no unknowns")
    names = [u.name for u in system.unknowns]
    if len(set(names)) != len(names):
        raise SolverError("duplicate unknown names")
    declared = set(names)
    for terms in system.equations:
        for t in terms:
            if t.unknown not in declared:
                raise SolverError(f"undeclared unknown {t.unknown!r}")
            _ensure_numeric(system.ring, [t.coeff] + [p for _, p in t.subst])
    t0 = time.perf_counter()
    asm = _Assembler(system)
    rows = asm.rows()
    t1 = time.perf_counter()
    basis = linalg.exact_nullspace(rows, len(asm.columns))
    t2 = time.perf_counter()
    vectors = [asm.to_assignment(v) for v in basis]
    if verify:
        for vec in vectors:
            bad = [r for r in evaluate(system, vec) if not r.is_zero()]
            if bad:
                raise VerificationError(f"basis element fails its equations: residual {bad[0]}")
    t3 = time.perf_counter()
    stats = {"columns": len(asm.columns), "rows": len(rows),
             "assemble_s": t1 - t0, "reduce_s": t2 - t1, "verify_s": t3 - t2}
    return SolutionBasis(system.ring, tuple(names), vectors, stats)


def vector_of(system: LinearSystem, assignment: Mapping) -> dict:
    """Column coordinates of an assignment; raises if it does not fit the bounds."""
    asm = _Assembler(system)
    ring = system.ring
    out = {}
    for u in system.unknowns:
        p = assignment.get(u.name)
        if p is None or p.is_zero():
            continue
        idx = [ring.index(v) for v in u.variables]
        for exps, c in p.items():
            if any(exps[k] for k in range(ring.arity) if k not in idx):
                raise ValueError(f"{u.name} assignment uses foreign variables")
            m = tuple(exps[k] for k in idx)
            key = (u.name, m)
            if key not in asm.colindex:
                raise ValueError(f"{u.name} assignment exceeds its bounds")
            out[asm.colindex[key]] = c
    return out


def fits(system: LinearSystem, assignment: Mapping) -> bool:
    try:
        vector_of(system, assignment)
    except ValueError:
        return False
    return True


def quotient(system: LinearSystem, solutions: SolutionBasis, sub: Sequence[Mapping]) -> tuple:
    """(rank of ``sub``, canonical representatives of solutions modulo span(sub))."""
    asm = _Assembler(system)
    ncols = len(asm.columns)
    inner = linalg.canonical_basis([vector_of(system, a) for a in sub], ncols)
    pivots = {min(v): v for v in inner}
    reduced = []
    for a in solutions.vectors:
        vec = {k: Fraction(v) for k, v in vector_of(system, a).items()}
        for pc in sorted(pivots):
            f = vec.get(pc)
            if f:
                for k, v in pivots[pc].items():
                    nv = vec.get(k, 0) - f * v
                    if nv:
                        vec[k] = nv
                    else:
                        vec.pop(k, None)
        if vec:
            reduced.append(vec)
    outer = linalg.canonical_basis(reduced, ncols)
    return len(inner), [asm.to_assignment(v) for v in outer]


# ---- conformal derivations ---------------------------------------------------------

def entry_name(alg: LcsAlgebra, i: int, j: int) -> str:
    return f"{alg.gens[i]}->{alg.gens[j]}"


def _require_numeric(alg: LcsAlgebra) -> None:
    if alg.is_symbolic():
        raise SymbolicParameterError(
            f"{alg.name} has free parameters {list(alg.ring.params)}; solvers need rational values")


def _check_bounds(bd: int, bl: int) -> None:
    if bd < 2 or bl < 2:
        raise ValueError("degree bounds must be at least 2")


def derivation_system(alg: LcsAlgebra, parity, bd: int, bl: int) -> tuple:
    theta = Parity.parse(parity)
    ring = alg.ring
    d, lam, mu = ring.gens("del", "lam", "mu")
    n = alg.n
    sysm = LinearSystem(ring)
    names = {}
    for k, m in product(range(n), repeat=2):
        if alg.parities[m] == alg.parities[k] + theta:
            names[(k, m)] = entry_name(alg, k, m)
            sysm.unknown(UnknownPoly(names[(k, m)], ("del", "lam"), (bd, bl)))
    B = alg.table

    def at(p, dd, ll):
        return p.substitute({"del": dd, "lam": ll})

    for i, j in product(range(n), repeat=2):
        s = sign((alg.parities[i], theta))
        for c in range(n):
            terms = []
            for k in range(n):
                if (k, c) in names and not B[i][j][k].is_zero():
                    terms.append(LinearTermRef.make(names[(k, c)], at(B[i][j][k], d + lam, mu)))
            for m in range(n):
                if (i, m) in names and not B[m][j][c].is_zero():
                    terms.append(LinearTermRef.make(names[(i, m)], -at(B[m][j][c], d, lam + mu), **{"del": -lam - mu}))
                if (j, m) in names and not B[i][m][c].is_zero():
                    terms.append(LinearTermRef.make(names[(j, m)], -s * at(B[i][m][c], d, mu), **{"del": d + mu}))
            sysm.add(terms, ((alg.gens[i], alg.gens[j]), alg.gens[c]))
    return sysm, names


def end_assignment(alg: LcsAlgebra, names: Mapping, matrix) -> dict:
    return {nm: matrix[k][m] for (k, m), nm in names.items()}


def assignment_matrix(alg: LcsAlgebra, names: Mapping, assignment: Mapping) -> tuple:
    z = alg.ring.zero()
    return tuple(tuple(assignment.get(names.get((k, m)), z) if (k, m) in names else z
                       for m in range(alg.n)) for k in range(alg.n))


def inner_derivations(alg: LcsAlgebra, parity, bd: int, bl: int) -> list:
    """Matrices of ad(del^k e_i) of the given parity whose entries fit the bounds."""
    from .maps import ad

    theta = Parity.parse(parity)
    out = []
    for i in range(alg.n):
        if alg.parities[i] != theta:
            continue
        for k in range(bl + 1):
            x = alg.element({alg.gens[i]: alg.ring.var("del") ** k})
            mat = ad(alg, x).matrix
            if all(c.degree("del") <= bd and c.degree("lam") <= bl for row in mat for c in row):
                if any(not c.is_zero() for row in mat for c in row):
                    out.append(mat)
    return out


@dataclass
class DerivationResult:
    algebra: str
    parity: Parity
    bounds: tuple
    basis: SolutionBasis
    inner_dim: int
    outer: list
    stable: bool | None = None
    outer_dim_next: int | None = None

    @property
    def dim(self) -> int:
        return self.basis.dimension

    @property
    def outer_dim(self) -> int:
        return self.dim - self.inner_dim


def _derivations_once(alg: LcsAlgebra, parity, bd: int, bl: int) -> DerivationResult:
    from .maps import ConformalEnd

    sysm, names = derivation_system(alg, parity, bd, bl)
    basis = solve(sysm)
    inner = [end_assignment(alg, names, m) for m in inner_derivations(alg, parity, bd, bl)]
    inner_dim, outer_assign = quotient(sysm, basis, inner)
    theta = Parity.parse(parity)
    outer = [ConformalEnd(theta, assignment_matrix(alg, names, a), alg.ring, "outer") for a in outer_assign]
    return DerivationResult(alg.name, theta, (bd, bl), basis, inner_dim, outer)


def solve_derivations(alg: LcsAlgebra, parity, bound_del: int = 3, bound_lam: int = 3,
                      stability: bool = True) -> DerivationResult:
    """Conformal derivations of one parity with entry degrees within the bounds.

    ``outer`` holds canonical representatives of the quotient by the bounded
    inner derivations.  With ``stability`` the computation is repeated at
    ``bound_lam + 1`` and ``stable`` records whether the outer dimension agrees.
    """
    _require_numeric(alg)
    _check_bounds(bound_del, bound_lam)
    res = _derivations_once(alg, parity, bound_del, bound_lam)
    if stability:
        nxt = _derivations_once(alg, parity, bound_del, bound_lam + 1)
        res.outer_dim_next = nxt.outer_dim
        res.stable = nxt.outer_dim == res.outer_dim
    return res


# ---- conformal biderivations ---------------------------------------------------------

def bider_name(alg: LcsAlgebra, a: int, b: int, c: int) -> str:
    return f"({alg.gens[a]},{alg.gens[b]})->{alg.gens[c]}"


def biderivation_system(alg: LcsAlgebra, parity, bd: int, bl: int) -> tuple:
    """Skew-symmetry and Leibniz equations for a bilinear map of the given parity.

    The Leibniz sign is (-1)^((|a| + parity)|b|): phi(a, -) behaves as a map of
    parity |a| + parity moving past b.
    """
    theta = Parity.parse(parity)
    ring = alg.ring
    d, lam, mu = ring.gens("del", "lam", "mu")
    n = alg.n
    P = alg.parities
    sysm = LinearSystem(ring)
    names = {}
    for a, b, c in product(range(n), repeat=3):
        if P[c] == P[a] + P[b] + theta:
            names[(a, b, c)] = bider_name(alg, a, b, c)
            sysm.unknown(UnknownPoly(names[(a, b, c)], ("del", "lam"), (bd, bl)))
    B = alg.table

    def at(p, dd, ll):
        return p.substitute({"del": dd, "lam": ll})

    one = ring.one()
    for a, b in product(range(n), repeat=2):
        s = sign((P[a], P[b]))
        for c in range(n):
            terms = []
            if (a, b, c) in names:
                terms.append(LinearTermRef.make(names[(a, b, c)], one))
            if (b, a, c) in names:
                terms.append(LinearTermRef.make(names[(b, a, c)], one * s, lam=-d - lam))
            sysm.add(terms, ("skew", alg.gens[a], alg.gens[b], alg.gens[c]))
    for a, b, c in product(range(n), repeat=3):
        s = sign((P[a] + theta, P[b]))
        for out in range(n):
            terms = []
            for k in range(n):
                if (a, k, out) in names and not B[b][c][k].is_zero():
                    terms.append(LinearTermRef.make(names[(a, k, out)], at(B[b][c][k], d + lam, mu)))
            for m in range(n):
                if (a, b, m) in names and not B[m][c][out].is_zero():
                    terms.append(LinearTermRef.make(names[(a, b, m)], -at(B[m][c][out], d, lam + mu),
                                                    **{"del": -lam - mu}))
                if (a, c, m) in names and not B[b][m][out].is_zero():
                    terms.append(LinearTermRef.make(names[(a, c, m)], -s * at(B[b][m][out], d, mu),
                                                    **{"del": d + mu}))
            sysm.add(terms, ("leibniz", alg.gens[a], alg.gens[b], alg.gens[c], alg.gens[out]))
    return sysm, names


@dataclass
class BiderivationResult:
    algebra: str
    bounds: tuple
    parts: dict  # parity -> (SolutionBasis, names)
    inner_dim: int
    outer: list
    stable: bool | None = None
    dim_next: int | None = None

    @property
    def dim(self) -> int:
        return sum(b.dimension for b, _ in self.parts.values())

    @property
    def outer_dim(self) -> int:
        return self.dim - self.inner_dim

    def maps(self) -> list:
        from .biderivations import ConformalBiMap

        out = []
        for par, (basis, names) in self.parts.items():
            for vec in basis.vectors:
                out.append(ConformalBiMap.from_assignment(self._alg, par, names, vec))
        return out


def _biders_once(alg: LcsAlgebra, bd: int, bl: int) -> BiderivationResult:
    from .biderivations import ConformalBiMap

    parts = {}
    inner_dim = 0
    outer = []
    for par in (Parity.EVEN, Parity.ODD):
        sysm, names = biderivation_system(alg, par, bd, bl)
        basis = solve(sysm)
        inner = []
        if par == Parity.EVEN:
            cand = {nm: alg.table[a][b][c] for (a, b, c), nm in names.items()}
            if any(not p.is_zero() for p in cand.values()) and fits(sysm, cand):
                inner = [cand]
        idim, reps = quotient(sysm, basis, inner)
        inner_dim += idim
        outer += [ConformalBiMap.from_assignment(alg, par, names, r) for r in reps]
        parts[par] = (basis, names)
    res = BiderivationResult(alg.name, (bd, bl), parts, inner_dim, outer)
    res._alg = alg
    return res


def solve_biderivations(alg: LcsAlgebra, bound_del: int = 3, bound_lam: int = 3,
                        stability: bool = True) -> BiderivationResult:
    """All conformal biderivations (both parities) within the bounds."""
    _require_numeric(alg)
    _check_bounds(bound_del, bound_lam)
    res = _biders_once(alg, bound_del, bound_lam)
    if stability:
        nxt = _biders_once(alg, bound_del, bound_lam + 1)
        res.dim_next = nxt.dim
        res.stable = nxt.outer_dim == res.outer_dim
    return res


# ---- the key functional equation ---------------------------------------------------------

KEYEQ_RING = Ring("x", ("y", "z"), ())


def keyeq_system(a, b, c, bound: int) -> LinearSystem:
    """(x + b y) f(x+y, z) - (x + a y + z) f(x, z) - (c y - z) f(x, y+z) = 0."""
    ring = KEYEQ_RING
    x, y, z = ring.gens("x", "y", "z")
    a, b, c = (Fraction(v) for v in (a, b, c))
    sysm = LinearSystem(ring)
    sysm.unknown(UnknownPoly("f", ("x", "y"), (bound, bound), bound))
    sysm.add([
        LinearTermRef.make("f", x + y * b, x=x + y, y=z),
        LinearTermRef.make("f", -(x + y * a + z), x=x, y=z),
        LinearTermRef.make("f", -(y * c - z), x=x, y=y + z),
    ], "keyeq")
    return sysm


def solve_keyeq(a, b, c, bound: int = 4) -> SolutionBasis:
    """Solutions f(x, y) of total degree <= bound of the key functional equation."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    return solve(keyeq_system(a, b, c, bound))
