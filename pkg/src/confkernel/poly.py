"""Sparse exact multivariate polynomials over Q with role-tagged indeterminates.

A :class:`Ring` fixes an ordered list of indeterminates: exactly one
``Partial`` (the derivation, written ``del``), then the lambda variables in
declaration order, then parameters.  A :class:`Polynomial` is an immutable map
from exponent vectors to rational coefficients.  Coefficients are stored as
``int`` when integral and as :class:`fractions.Fraction` otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Union


class Role(enum.Enum):
    PARTIAL = "partial"
    LAMBDA = "lambda"
    PARAMETER = "parameter"


@dataclass(frozen=True)
class Indeterminate:
    name: str
    role: Role


class RingMismatchError(ValueError):
    pass


Scalar = Union[int, Fraction]


def as_rational(x) -> Scalar:
    """Normalize an exact scalar: integral values become ``int``."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return as_rational(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return as_rational(Fraction(x.strip()))
    raise TypeError(f"not an exact rational: {x!r}")


class Ring:
    """Ordered indeterminate context shared by polynomials that interact."""

    __slots__ = ("indeterminates", "names", "_index", "_hash")

    def __new__(cls, partial: str = "del", lambdas: Iterable[str] = ("lam", "mu", "nu"),
                params: Iterable[str] = ()):
        return _make_ring(partial, tuple(lambdas), tuple(params))

    @classmethod
    def _create(cls, partial: str, lambdas: tuple, params: tuple) -> "Ring":
        self = object.__new__(cls)
        inds = [Indeterminate(partial, Role.PARTIAL)]
        inds += [Indeterminate(n, Role.LAMBDA) for n in lambdas]
        inds += [Indeterminate(n, Role.PARAMETER) for n in params]
        names = [i.name for i in inds]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate indeterminate names in {names}")
        self.indeterminates = tuple(inds)
        self.names = tuple(names)
        self._index = {n: k for k, n in enumerate(names)}
        self._hash = hash(self.indeterminates)
        return self

    def __reduce__(self):
        return (Ring, (self.partial, self.lambdas, self.params))

    @property
    def arity(self) -> int:
        return len(self.indeterminates)

    @property
    def partial(self) -> str:
        return self.indeterminates[0].name

    @property
    def lambdas(self) -> tuple:
        return tuple(i.name for i in self.indeterminates if i.role is Role.LAMBDA)

    @property
    def params(self) -> tuple:
        return tuple(i.name for i in self.indeterminates if i.role is Role.PARAMETER)

    def index(self, name) -> int:
        if isinstance(name, Indeterminate):
            name = name.name
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not an indeterminate of {self}") from None

    def __contains__(self, name) -> bool:
        if isinstance(name, Indeterminate):
            name = name.name
        return name in self._index

    def role(self, name) -> Role:
        return self.indeterminates[self.index(name)].role

    def with_params(self, *params: str) -> "Ring":
        extra = [p for p in params if p not in self._index]
        if not extra:
            return self
        return Ring(self.partial, self.lambdas, self.params + tuple(extra))

    def without_params(self, *params: str) -> "Ring":
        keep = tuple(p for p in self.params if p not in params)
        return Ring(self.partial, self.lambdas, keep)

    def union(self, other: "Ring") -> "Ring":
        if other.partial != self.partial:
            raise RingMismatchError("rings have different partial indeterminates")
        lams = self.lambdas + tuple(n for n in other.lambdas if n not in self.lambdas)
        pars = self.params + tuple(n for n in other.params if n not in self.params)
        return Ring(self.partial, lams, pars)

    # constructors
    def zero(self) -> "Polynomial":
        return Polynomial(self, {}, _trusted=True)

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = as_rational(c)
        if c == 0:
            return self.zero()
        return Polynomial(self, {(0,) * self.arity: c}, _trusted=True)

    def var(self, name) -> "Polynomial":
        k = self.index(name)
        e = [0] * self.arity
        e[k] = 1
        return Polynomial(self, {tuple(e): 1}, _trusted=True)

    def gens(self, *names) -> tuple:
        return tuple(self.var(n) for n in names)

    def coerce(self, x) -> "Polynomial":
        if isinstance(x, Polynomial):
            if x.ring is not self and x.ring != self:
                raise RingMismatchError(f"polynomial over {x.ring} used in {self}")
            return x
        return self.const(x)

    def parse(self, text: str) -> "Polynomial":
        from .parse import parse

        return parse(text, self)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.indeterminates == other.indeterminates

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Ring({', '.join(self.names)})"


@lru_cache(maxsize=None)
def _make_ring(partial: str, lambdas: tuple, params: tuple) -> Ring:
    return Ring._create(partial, lambdas, params)


def _coerce_pair(p: "Polynomial", q) -> "Polynomial":
    if isinstance(q, Polynomial):
        if q.ring is not p.ring and q.ring != p.ring:
            raise RingMismatchError(f"ring mismatch: {p.ring} vs {q.ring}")
        return q
    return p.ring.const(q)


def _sort_key(item):
    exps = item[0]
    return (sum(exps), exps)


class Polynomial:
    """Immutable sparse polynomial; equality and display use graded-lex order."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping | None = None, *, _trusted: bool = False):
        self.ring = ring
        self._hash = None
        if _trusted:
            self._terms = terms
            return
        clean = {}
        n = ring.arity
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for {ring}")
            c = as_rational(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean

    # ---- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator:
        """Terms in canonical (graded-lex, descending) order."""
        return iter(sorted(self._terms.items(), key=_sort_key, reverse=True))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self._terms.values()), 0)

    def constant_term(self) -> Scalar:
        return self._terms.get((0,) * self.ring.arity, 0)

    def degree(self, var=None) -> int:
        """Degree in ``var`` (total degree if omitted); -1 for zero."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e) for e in self._terms)
        k = self.ring.index(var)
        return max(e[k] for e in self._terms)

    def variables(self) -> set:
        used = set()
        for exps in self._terms:
            used.update(k for k, e in enumerate(exps) if e)
        return {self.ring.names[k] for k in used}

    def uses_role(self, role: Role) -> bool:
        return any(self.ring.role(v) is role for v in self.variables())

    def coefficient(self, monomial: Mapping) -> Scalar:
        e = [0] * self.ring.arity
        for v, k in monomial.items():
            e[self.ring.index(v)] = k
        return self._terms.get(tuple(e), 0)

    # ---- arithmetic -------------------------------------------------------
    def __add__(self, other):
        q = _coerce_pair(self, other)
        if not q._terms:
            return self
        if not self._terms:
            return q
        out = dict(self._terms)
        for e, c in q._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = as_rational(v) if isinstance(v, Fraction) else v
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {e: -c for e, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-_coerce_pair(self, other))

    def __rsub__(self, other):
        return _coerce_pair(self, other) - self

    def scale(self, c) -> "Polynomial":
        c = as_rational(c)
        if c == 0:
            return self.ring.zero()
        if c == 1:
            return self
        out = {}
        for e, v in self._terms.items():
            w = v * c
            out[e] = as_rational(w) if isinstance(w, Fraction) else w
        return Polynomial(self.ring, out, _trusted=True)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        q = _coerce_pair(self, other)
        a, b = self._terms, q._terms
        if not a or not b:
            return self.ring.zero()
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (eb, cb), = b.items()
            if not any(eb):
                return Polynomial(self.ring, a, _trusted=True).scale(cb)
        out: dict = {}
        get = out.get
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                out[e] = get(e, 0) + ca * cb
        clean = {}
        for e, v in out.items():
            if v:
                clean[e] = as_rational(v) if isinstance(v, Fraction) else v
        return Polynomial(self.ring, clean, _trusted=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # ---- equality ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_term() == c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # ---- substitution -----------------------------------------------------
    def substitute(self, bindings: Mapping) -> "Polynomial":
        """Simultaneously replace indeterminates by polynomials of the same ring."""
        ring = self.ring
        bound: dict = {}
        for name, value in bindings.items():
            k = ring.index(name)
            bound[k] = ring.coerce(value)
        if not bound or not self._terms:
            return self
        bidx = sorted(bound)
        powers: dict = {}

        def power(k, e):
            key = (k, e)
            p = powers.get(key)
            if p is None:
                p = bound[k] if e == 1 else power(k, e - 1) * bound[k]
                powers[key] = p
            return p

        groups: dict = {}
        for exps, c in self._terms.items():
            bpart = tuple(exps[k] for k in bidx)
            rest = list(exps)
            for k in bidx:
                rest[k] = 0
            groups.setdefault(bpart, []).append((tuple(rest), c))

        out: dict = {}
        get = out.get
        for bpart, rests in groups.items():
            factor = None
            for k, e in zip(bidx, bpart):
                if e:
                    f = power(k, e)
                    factor = f if factor is None else factor * f
            fterms = factor._terms if factor is not None else {(0,) * ring.arity: 1}
            for rest, c in rests:
                for fe, fc in fterms.items():
                    e = tuple([x + y for x, y in zip(rest, fe)])
                    out[e] = get(e, 0) + c * fc
        clean = {e: (as_rational(v) if isinstance(v, Fraction) else v) for e, v in out.items() if v}
        return Polynomial(ring, clean, _trusted=True)

    def __call__(self, **bindings) -> "Polynomial":
        return self.substitute(bindings)

    def coefficients_in(self, vars: Iterable) -> dict:
        """Split as sum of (monomial in ``vars``) * (coefficient in the rest).

        Keys are exponent tuples over ``vars`` in the given order.
        """
        ring = self.ring
        idx = [ring.index(v) for v in vars]
        out: dict = {}
        for exps, c in self._terms.items():
            key = tuple(exps[k] for k in idx)
            rest = list(exps)
            for k in idx:
                rest[k] = 0
            d = out.setdefault(key, {})
            rest = tuple(rest)
            d[rest] = d.get(rest, 0) + c
        return {k: Polynomial(ring, {e: c for e, c in d.items() if c}, _trusted=True)
                for k, d in out.items()}

    def to_ring(self, ring: Ring) -> "Polynomial":
        """Re-express in another ring containing every indeterminate used."""
        if ring is self.ring or ring == self.ring:
            return self
        src = self.ring.names
        used = [k for k in range(len(src)) if any(e[k] for e in self._terms)]
        target = {k: ring.index(src[k]) for k in used}
        out = {}
        for exps, c in self._terms.items():
            e = [0] * ring.arity
            for k in used:
                e[target[k]] = exps[k]
            out[tuple(e)] = c
        return Polynomial(ring, out, _trusted=True)

    # ---- display ----------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names = self.ring.names
        parts = []
        for exps, c in self.items():
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e)
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


PolyLike = Union[Polynomial, int, Fraction]


def vector_is_zero(vec) -> bool:
    return all(p.is_zero() for p in vec)
